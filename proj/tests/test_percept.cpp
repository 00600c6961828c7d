#include <cmath>
#include <set>

#include "doctest.h"
#include "pesao/percept.hpp"

using namespace pesao;

namespace {

const ObjectLibrary& lib() {
  static const ObjectLibrary l = generate_library(21);
  return l;
}

Scene any_scene(std::uint64_t seed, std::size_t i = 0) {
  return build_scene(sample_session(lib(), seed)[i], lib());
}

BlockObject single_block(int x, int y) {
  BlockObject o;
  o.blocks = {{{x, y, 0}}};
  return o;
}

// Oracle: march along eye -> face center in tiny steps and test each sample
// point for containment in any voxel of either object.
bool oracle_visible(const Scene& s, Target t, const Voxel& v, int f, Vec3 eye) {
  const ObjectFrame fr[2] = {object_frame(s, Target::A), object_frame(s, Target::B)};
  const std::vector<Voxel> vox[2] = {s.object_a.voxels(), s.object_b.voxels()};
  const int k = t == Target::A ? 0 : 1;
  const std::set<Voxel> own(vox[k].begin(), vox[k].end());
  if (f == kNegZ && v.z == 0) return false;
  if (own.count(face_neighbor(v, f))) return false;
  const Vec3 c_local = face_center(v, f);
  const Vec3 c = fr[k].to_world(c_local);
  const Vec3 n = fr[k].to_world(c_local + face_normal(f)) - c;
  if (n.dot(eye - c) <= 0.0) return false;
  const int steps = 6000;
  for (int i = 1; i < steps; ++i) {
    const Vec3 p = eye + (c - eye) * (static_cast<double>(i) / steps);
    for (int j = 0; j < 2; ++j) {
      const Vec3 q = fr[j].to_local(p);
      const Voxel cell{static_cast<int>(std::floor(q.x)), static_cast<int>(std::floor(q.y)),
                       static_cast<int>(std::floor(q.z))};
      if (j == k && cell == v) continue;  // arriving at the face itself
      if (std::binary_search(vox[j].begin(), vox[j].end(), cell)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("single isolated block shows three faces to an oblique eye") {
  Scene s = any_scene(1);
  s.object_a = single_block(3, 3);
  s.object_b = single_block(3, 3);
  const SceneView view(s);
  const Vec3 eye = view.frame[0].to_world({13.5, 5.0, 2.0});
  const auto vis = view.visible(Target::A, eye);
  std::set<int> faces;
  for (const auto& e : vis) faces.insert(e.face);
  CHECK(vis.size() == 3);
  CHECK(faces == std::set<int>{kPosX, kPosY, kPosZ});
}

TEST_CASE("an element behind an occluding block is absent") {
  Scene s = any_scene(1);
  BlockObject o;
  o.blocks = {{{1, 3, 0}}, {{4, 3, 0}}};
  s.object_a = o;
  s.object_b = single_block(0, 0);
  const SceneView view(s);
  const Vec3 eye = view.frame[0].to_world({12.0, 3.5, 0.5});
  bool hidden_present = false, front_present = false;
  for (const auto& e : view.visible(Target::A, eye)) {
    if (e.voxel == Voxel{1, 3, 0} && e.face == kPosX) hidden_present = true;
    if (e.voxel == Voxel{4, 3, 0} && e.face == kPosX) front_present = true;
  }
  CHECK_FALSE(hidden_present);
  CHECK(front_present);
  CHECK(view.blocked(eye, view.frame[0].to_world(face_center({1, 3, 0}, kPosX))));
}

TEST_CASE("visible set equals a dense ray-marching oracle on 100 random poses") {
  auto rng = make_rng(99);
  int checked = 0, agree = 0;
  for (int i = 0; i < 100; ++i) {
    const Scene s = any_scene(static_cast<std::uint64_t>(i % 10), static_cast<std::size_t>(i % 18));
    const SceneView view(s);
    const Vec3 eye{0.3 + 3.9 * uniform01(rng), 0.3 + 3.0 * uniform01(rng), 1.0 + 0.9 * uniform01(rng)};
    for (auto t : {Target::A, Target::B}) {
      std::set<std::pair<Voxel, int>> got;
      for (const auto& e : view.visible(t, eye)) got.insert({e.voxel, e.face});
      std::set<std::pair<Voxel, int>> want;
      for (const auto& v : (t == Target::A ? s.object_a : s.object_b).voxels())
        for (int f = 0; f < 6; ++f)
          if (oracle_visible(s, t, v, f, eye)) want.insert({v, f});
      ++checked;
      if (got == want) ++agree;
    }
  }
  CHECK(agree == checked);
}

TEST_CASE("percept: foveal subset and fixated element") {
  const Scene s = any_scene(4, 3);
  const SceneView view(s);
  auto pose = start_pose(s);
  // Stand in front of A and look at one of its visible faces.
  const Vec3 c = view.frame[0].center();
  const Vec3 eye = c + Vec3{0.0, -0.6, 0.2};
  const auto ha = head_angles_to(eye, c);
  pose = act(pose, Walk{eye, ha[0], ha[1]}).pose;
  const auto vis = view.visible(Target::A, eye);
  REQUIRE_FALSE(vis.empty());
  const auto g = gaze_angles_to(pose.head, vis[0].world);
  pose = act(pose, Saccade{g[0], g[1]}).pose;
  const auto p = visible_elements(view, pose);
  CHECK(p.fixated == Target::A);
  REQUIRE(p.fixated_element.has_value());
  CHECK(p.fixated_element->voxel == vis[0].voxel);
  CHECK(p.fixated_element->face == vis[0].face);
  for (auto i : p.foveal) CHECK(i < p.visible.size());
  CHECK_FALSE(p.foveal.empty());
  CHECK(p.fixated_element->token().rfind("p", 0) == 0);
  // Looking straight up sees neither object.
  auto up = pose;
  up.gaze_el = 50.0;
  up.head.pitch = 40.0;
  CHECK(visible_elements(view, up).fixated == Target::Environment);
}

TEST_CASE("sector membership") {
  const Vec3 c{1.0, 2.0, 1.5};
  // Jitter within an octant keeps the index.
  const int base = sector_of(c, c + Vec3{0.0001, 0.5, 0.1});
  for (int i = 0; i < 20; ++i) CHECK(sector_of(c, c + Vec3{0.001 * (i + 1), 0.5 - 0.01 * i, 0.1}) == base);
  for (int k = 0; k < 8; ++k) {
    const Vec3 off = sector_station_offset(k);
    CHECK(sector_of(c, c + off) == k);
    CHECK(sector_of(c, c - off) != k);
  }
  std::set<int> visited;
  for (int a = 0; a < 360; ++a) {
    const double r = deg2rad(a + 0.5);
    visited.insert(sector_of(c, c + Vec3{std::cos(r), std::sin(r), 0.3}));
  }
  CHECK(visited.size() == 4);
}

TEST_CASE("action costs") {
  const Scene s = any_scene(2);
  const auto p0 = start_pose(s);
  const auto sac = act(p0, Saccade{0.0, 0.0});
  CHECK(sac.elapsed_s == doctest::Approx(0.3));
  CHECK(sac.path_m == 0.0);
  CHECK_THROWS_AS(act(p0, Saccade{120.0, 0.0}), Error);
  const auto turn = act(p0, HeadTurn{p0.head.yaw + 90.0, 0.0});
  CHECK(turn.elapsed_s == doctest::Approx(1.0));
  CHECK(turn.path_m == 0.0);
  CHECK(turn.pose.body == p0.body);
  const Vec2 dir = kPostMidpoint - p0.body;
  const Vec2 step = dir * (2.0 / dir.norm());
  const Vec3 to = p0.head.position + Vec3{step.x, step.y, 0.0};
  const auto walk = act(p0, Walk{to, 0.0, 0.0});
  CHECK(walk.path_m == doctest::Approx(2.0));
  CHECK(walk.elapsed_s == doctest::Approx(2.5));
  CHECK_THROWS_AS(act(p0, Walk{{-1.0, 1.0, 1.6}, 0.0, 0.0}), Error);
}

TEST_CASE("head path is at least the straight-line displacement") {
  auto rng = make_rng(5);
  const Scene s = any_scene(3);
  auto pose = start_pose(s);
  const Vec3 first = pose.head.position;
  double path = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Vec3 to{0.2 + 3.9 * uniform01(rng), 0.2 + 3.0 * uniform01(rng), 1.2 + 0.45 * uniform01(rng)};
    const auto r = act(pose, Walk{to, 360.0 * uniform01(rng), 0.0});
    path += r.path_m;
    pose = r.pose;
    CHECK(path + 1e-12 >= (pose.head.position - first).norm());
  }
}

TEST_CASE("noise magnitudes") {
  const auto m = NoiseModel::measured();
  CHECK(chi3_cdf(0.0004 / m.head_sigma_m) == doctest::Approx(0.97).epsilon(1e-9));
  const Scene s = any_scene(2);
  auto pose = start_pose(s);
  pose.gaze_az = 10.0;
  pose.gaze_el = -5.0;
  const Vec3 g0 = pose.gaze_direction();
  int within = 0;
  double err_sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto q = apply_noise(pose, m, static_cast<std::uint64_t>(i));
    if ((q.head.position - pose.head.position).norm() <= 0.0004) ++within;
    err_sum += angle_between_deg(g0, q.gaze_direction());
  }
  const double frac = static_cast<double>(within) / n;
  CHECK(frac >= 0.96);
  CHECK(frac <= 0.98);
  CHECK(std::abs(err_sum / n - 1.42) <= 0.05 * 1.42);

  NoiseModel off;
  const auto q = apply_noise(pose, off, 7);
  CHECK(q.head.position == pose.head.position);
  CHECK(q.gaze_az == pose.gaze_az);
  const auto r1 = apply_noise(pose, m, 11), r2 = apply_noise(pose, m, 11);
  CHECK(r1.head.position == r2.head.position);
  CHECK(r1.gaze_el == r2.gaze_el);
}
