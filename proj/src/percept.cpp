#include "pesao/percept.hpp"

#include <cmath>
#include <cstdio>

namespace pesao {

namespace {

struct Basis {
  Vec3 fwd, left, up;
};

Basis head_basis(const HeadPose& h) {
  const double y = deg2rad(h.yaw), p = deg2rad(h.pitch), r = deg2rad(h.roll);
  const Vec3 fwd{std::cos(p) * std::cos(y), std::cos(p) * std::sin(y), std::sin(p)};
  const Vec3 left0{-std::sin(y), std::cos(y), 0.0};
  const Vec3 up0{-std::sin(p) * std::cos(y), -std::sin(p) * std::sin(y), std::cos(p)};
  return {fwd, left0 * std::cos(r) + up0 * std::sin(r), up0 * std::cos(r) - left0 * std::sin(r)};
}

Vec3 rotz(Vec3 v, double deg) {
  const double c = std::cos(deg2rad(deg)), s = std::sin(deg2rad(deg));
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

}  // namespace

Vec3 HeadPose::forward() const { return head_basis(*this).fwd; }

Vec3 ObserverPose::gaze_direction() const {
  const auto b = head_basis(head);
  const double az = deg2rad(gaze_az), el = deg2rad(gaze_el);
  return b.fwd * (std::cos(el) * std::cos(az)) + b.left * (std::cos(el) * std::sin(az)) +
         b.up * std::sin(el);
}

bool in_visual_field(double az, double el) {
  return std::abs(az) <= kVisualFieldH / 2 + 1e-9 && std::abs(el) <= kVisualFieldV / 2 + 1e-9;
}

std::array<double, 2> gaze_angles_to(const HeadPose& head, Vec3 p) {
  const auto b = head_basis(head);
  const Vec3 d = (p - head.position).normalized();
  return {rad2deg(std::atan2(d.dot(b.left), d.dot(b.fwd))),
          rad2deg(std::asin(std::clamp(d.dot(b.up), -1.0, 1.0)))};
}

std::array<double, 2> head_angles_to(Vec3 from, Vec3 p) {
  const Vec3 d = p - from;
  return {rad2deg(std::atan2(d.y, d.x)), rad2deg(std::atan2(d.z, std::hypot(d.x, d.y)))};
}

ObserverPose start_pose(const Scene& scene) {
  ObserverPose p;
  p.body = scene.start_position;
  p.body_yaw = scene.start_yaw;
  p.head.position = {scene.start_position.x, scene.start_position.y, kStandingEyeHeight};
  p.head.yaw = scene.start_yaw;
  return p;
}

Vec3 ObjectFrame::to_world(Vec3 local) const {
  return origin + rotz(Vec3{local.x - cx, local.y - cy, local.z} * kVoxelEdge, yaw);
}

Vec3 ObjectFrame::to_local(Vec3 world) const {
  const Vec3 d = rotz((world - origin) * (1.0 / kVoxelEdge), -yaw);
  return {d.x + cx, d.y + cy, d.z};
}

Vec3 ObjectFrame::direction_to_local(Vec3 dir) const { return rotz(dir * (1.0 / kVoxelEdge), -yaw); }

ObjectFrame object_frame(const Scene& scene, Target which) {
  const bool a = which == Target::A;
  const auto& obj = a ? scene.object_a : scene.object_b;
  const auto& post = a ? scene.post_a : scene.post_b;
  int lo[3] = {kGridExtent, kGridExtent, kGridExtent}, hi[3] = {0, 0, 0};
  for (const auto& v : obj.voxels()) {
    const int c[3] = {v.x, v.y, v.z};
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], c[i]);
      hi[i] = std::max(hi[i], c[i] + 1);
    }
  }
  ObjectFrame f;
  f.origin = {post.position.x, post.position.y, post.mount_height};
  f.yaw = a ? scene.yaw_a : scene.yaw_b;
  f.cx = 0.5 * (lo[0] + hi[0]);
  f.cy = 0.5 * (lo[1] + hi[1]);
  f.cz = 0.5 * (lo[2] + hi[2]);
  return f;
}

std::string Element::token() const {
  char buf[48];
  std::snprintf(buf, sizeof buf, "p%d.b%d.f%d", part, block, face);
  return buf;
}

SceneView::SceneView(const Scene& s)
    : scene(&s),
      frame{object_frame(s, Target::A), object_frame(s, Target::B)},
      grid{s.object_a.grid(), s.object_b.grid()},
      parts{decompose_parts(s.object_a), decompose_parts(s.object_b)} {}

Element SceneView::make_element(Target t, const Voxel& v, int face) const {
  Element e;
  e.target = t;
  e.voxel = v;
  e.face = face;
  e.block = object(t).block_of(v);
  e.part = e.block >= 0 ? parts[static_cast<std::size_t>(slot(t))].part_of_block[static_cast<std::size_t>(e.block)] : -1;
  e.world = frame[static_cast<std::size_t>(slot(t))].to_world(face_center(v, face));
  return e;
}

bool SceneView::blocked(Vec3 from, Vec3 to) const {
  for (std::size_t i = 0; i < 2; ++i)
    if (segment_blocked(grid[i], frame[i].to_local(from), frame[i].to_local(to))) return true;
  return false;
}

std::vector<Element> SceneView::visible(Target t, Vec3 eye) const {
  const auto s = static_cast<std::size_t>(slot(t));
  const auto& other = frame[1 - s];
  const auto& other_grid = grid[1 - s];
  std::vector<Element> out;
  for (const auto& lf : visible_faces(grid[s], frame[s].to_local(eye))) {
    auto e = make_element(t, lf.voxel, lf.face);
    if (segment_blocked(other_grid, other.to_local(eye), other.to_local(e.world))) continue;
    out.push_back(e);
  }
  return out;
}

std::optional<Element> SceneView::hit(Vec3 origin, Vec3 dir) const {
  const Vec3 d = dir.normalized();
  std::optional<Element> best;
  double best_t = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    auto h = first_hit(grid[i], frame[i].to_local(origin), frame[i].direction_to_local(d));
    // Local direction is scaled by 1/edge, so t is in world meters.
    if (h && (!best || h->t < best_t)) {
      best_t = h->t;
      best = make_element(i == 0 ? Target::A : Target::B, h->voxel, h->face);
    }
  }
  return best;
}

Percept visible_elements(const SceneView& view, const ObserverPose& pose, double foveal_radius_deg) {
  Percept p;
  const Vec3 eye = pose.head.position;
  const Vec3 dir = pose.gaze_direction();
  p.fixated_element = view.hit(eye, dir);
  p.fixated = p.fixated_element ? p.fixated_element->target : Target::Environment;
  for (auto t : {Target::A, Target::B}) {
    auto v = view.visible(t, eye);
    p.visible.insert(p.visible.end(), v.begin(), v.end());
  }
  for (std::size_t i = 0; i < p.visible.size(); ++i)
    if (angle_between_deg(dir, p.visible[i].world - eye) <= foveal_radius_deg) p.foveal.push_back(i);
  return p;
}

Percept visible_elements(const Scene& scene, const ObserverPose& pose) {
  return visible_elements(SceneView(scene), pose);
}

int sector_of(Vec3 center, Vec3 head) {
  const Vec3 d = head - center;
  return (d.x > 0 ? 1 : 0) | (d.y > 0 ? 2 : 0) | (d.z > 0 ? 4 : 0);
}

int sector_index(const Scene& scene, const ObserverPose& pose, Target target) {
  if (target == Target::Environment) throw Error(ErrorCode::InvalidArgument, "sectors exist only for objects");
  return sector_of(object_frame(scene, target).center(), pose.head.position);
}

ActResult act(const ObserverPose& pose, const Action& action, const Workspace& workspace,
              const ActionCosts& costs) {
  ActResult r{pose, 0.0, 0.0};
  if (const auto* s = std::get_if<Saccade>(&action)) {
    if (!in_visual_field(s->az, s->el))
      throw Error(ErrorCode::InvalidArgument, "saccade target outside the visual field");
    if (!(s->duration_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "fixation duration must be positive");
    r.pose.gaze_az = s->az;
    r.pose.gaze_el = s->el;
    r.elapsed_s = s->duration_s;
  } else if (const auto* h = std::get_if<HeadTurn>(&action)) {
    HeadPose next = pose.head;
    next.yaw = h->yaw;
    next.pitch = h->pitch;
    r.elapsed_s = angle_between_deg(pose.head.forward(), next.forward()) / costs.head_deg_per_s;
    r.pose.head = next;
    r.pose.body_yaw = h->yaw;
    r.pose.gaze_az = r.pose.gaze_el = 0.0;
  } else {
    const auto& w = std::get<Walk>(action);
    if (!workspace.contains(w.head.xy())) throw Error(ErrorCode::InvalidArgument, "walk target outside the workspace");
    r.path_m = (w.head - pose.head.position).norm();
    r.elapsed_s = r.path_m / costs.walk_m_per_s + costs.walk_overhead_s;
    r.pose.head.position = w.head;
    r.pose.head.yaw = w.yaw;
    r.pose.head.pitch = w.pitch;
    r.pose.body = w.head.xy();
    r.pose.body_yaw = w.yaw;
    r.pose.gaze_az = r.pose.gaze_el = 0.0;
  }
  return r;
}

double chi3_cdf(double x) {
  if (x <= 0.0) return 0.0;
  return std::erf(x / std::sqrt(2.0)) - std::sqrt(2.0 / kPi) * x * std::exp(-0.5 * x * x);
}

double head_sigma_for(double radius_m, double coverage) {
  if (!(coverage > 0.0 && coverage < 1.0) || !(radius_m > 0.0))
    throw Error(ErrorCode::InvalidArgument, "coverage must be in (0,1) and radius positive");
  double lo = 0.0, hi = 20.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi3_cdf(mid) < coverage ? lo : hi) = mid;
  }
  return radius_m / (0.5 * (lo + hi));
}

NoiseModel NoiseModel::measured() {
  NoiseModel m;
  m.enabled = true;
  m.head_sigma_m = head_sigma_for(0.0004, 0.97);
  // Angular error magnitude of a 2D isotropic Gaussian is Rayleigh with
  // mean sigma * sqrt(pi / 2).
  m.gaze_sigma_deg = 1.42 / std::sqrt(kPi / 2.0);
  return m;
}

Vec3 perturb_head(Vec3 p, const NoiseModel& m, Rng& rng) {
  if (!m.enabled) return p;
  const double a = standard_normal(rng), b = standard_normal(rng), c = standard_normal(rng);
  return p + Vec3{a, b, c} * m.head_sigma_m;
}

Vec3 perturb_direction(Vec3 dir, const NoiseModel& m, Rng& rng) {
  if (!m.enabled) return dir;
  const Vec3 d = dir.normalized();
  const Vec3 helper = std::abs(d.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  const Vec3 u = d.cross(helper).normalized();
  const Vec3 v = d.cross(u);
  const double a = deg2rad(m.gaze_sigma_deg) * standard_normal(rng);
  const double b = deg2rad(m.gaze_sigma_deg) * standard_normal(rng);
  const double theta = std::hypot(a, b);
  if (theta == 0.0) return d;
  const Vec3 w = (u * a + v * b) * (1.0 / theta);
  return d * std::cos(theta) + w * std::sin(theta);
}

ObserverPose apply_noise(const ObserverPose& pose, const NoiseModel& m, std::uint64_t seed) {
  if (!m.enabled) return pose;
  auto rng = make_rng(seed);
  ObserverPose out = pose;
  out.head.position = perturb_head(pose.head.position, m, rng);
  const Vec3 g = perturb_direction(pose.gaze_direction(), m, rng);
  const auto ang = gaze_angles_to(pose.head, pose.head.position + g);
  out.gaze_az = ang[0];
  out.gaze_el = ang[1];
  return out;
}

}  // namespace pesao
