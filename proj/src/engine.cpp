#include "pesao/engine.hpp"

#include <algorithm>
#include <cmath>

namespace pesao {

namespace {

constexpr double kComfortAz = 60.0;
constexpr double kComfortEl = 45.0;
constexpr double kEnvironmentDepth = 3.0;
constexpr int kFixationMs = 300;
constexpr int kLocateMs = 200;

double norm_yaw(double d) {
  d = std::fmod(d, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

std::int64_t to_ms(double s) { return static_cast<std::int64_t>(std::llround(s * 1000.0)); }

int int_param(const Bindings& b, const std::string& key, int fallback) {
  auto it = b.find(key);
  if (it == b.end()) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Configuration, "parameter " + key + " must be an integer, got '" + it->second + "'");
  }
}

}  // namespace

Executive::Executive(const Scene& scene, const NoiseModel& noise, std::uint64_t seed)
    : scene_(scene),
      view_(scene_),
      noise_(noise),
      rng_(make_rng(mix_seed(seed, 1))),
      noise_rng_(make_rng(mix_seed(seed, 2))),
      pose_(start_pose(scene)) {
  trace_.meta.config = scene.config;
  trace_.meta.engine_version = kEngineVersion;
  trace_.meta.seed = seed;
}

int Executive::target_fixations() const {
  int n = 0;
  for (const auto& r : trace_.records)
    if (r.on_object()) ++n;
  return n;
}

int Executive::part_count() const { return std::max(view_.parts[0].count(), view_.parts[1].count()); }

std::vector<int> Executive::open_parts() const {
  std::vector<int> out;
  for (int p = 0; p < part_count(); ++p)
    if (!state_.conquered.count(p)) out.push_back(p);
  return out;
}

bool Executive::ledger_complete() const { return open_parts().empty(); }

std::vector<Station> Executive::sector_stations(Target t) const {
  const Vec3 c = view_.frame[static_cast<std::size_t>(view_.slot(t))].center();
  std::vector<Station> out;
  for (int s = 0; s < 8; ++s) {
    Station st;
    st.eye = c + sector_station_offset(s);
    const auto a = head_angles_to(st.eye, c);
    st.yaw = a[0];
    st.pitch = a[1];
    if (scene_.workspace.contains(st.eye.xy())) out.push_back(st);
  }
  return out;
}

std::vector<Station> Executive::comparison_stations() const {
  const Vec3 mid = (view_.frame[0].center() + view_.frame[1].center()) * 0.5;
  std::vector<Station> out;
  for (const Vec2 off : {Vec2{0.0, -0.9}, Vec2{0.0, 0.55}})
    for (double h : {kStandingEyeHeight, kCrouchedEyeHeight}) {
      Station st;
      const Vec2 p = kPostMidpoint + off;
      st.eye = {p.x, p.y, h};
      const auto a = head_angles_to(st.eye, mid);
      st.yaw = a[0];
      st.pitch = a[1];
      if (scene_.workspace.contains(p)) out.push_back(st);
    }
  return out;
}

bool Executive::part_visible_from(Vec3 eye, Target t, int part) const {
  const std::array<double, 4> key{eye.x, eye.y, eye.z, static_cast<double>(view_.slot(t))};
  auto it = vis_cache_.find(key);
  if (it == vis_cache_.end()) {
    std::vector<int> parts;
    for (const auto& e : view_.visible(t, eye)) parts.push_back(e.part);
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    it = vis_cache_.emplace(key, std::move(parts)).first;
  }
  if (part < 0) return !it->second.empty();
  return std::binary_search(it->second.begin(), it->second.end(), part);
}

std::optional<Station> Executive::nearest_station(const std::vector<Station>& candidates, Target t, int part,
                                                  std::uint8_t avoid_sectors) const {
  const Vec3 c = view_.frame[static_cast<std::size_t>(view_.slot(t))].center();
  std::optional<Station> best;
  double best_key = 0.0;
  for (const auto& s : candidates) {
    if (!part_visible_from(s.eye, t, part)) continue;
    const bool avoided = (avoid_sectors >> sector_of(c, s.eye)) & 1;
    const double key = (avoided ? 1e6 : 0.0) + (s.eye - pose_.head.position).norm();
    if (!best || key < best_key - 1e-12) {
      best = s;
      best_key = key;
    }
  }
  return best;
}

void Executive::move_to(const Station& s) {
  if ((s.eye - pose_.head.position).norm() > 1e-9) {
    const auto r = act(pose_, Walk{s.eye, norm_yaw(s.yaw), s.pitch}, scene_.workspace);
    trace_.motions.push_back({quantize6(clock_ms_ / 1000.0), MotionKind::Walk, quantize6(r.path_m)});
    clock_ms_ += to_ms(r.elapsed_s);
    pose_ = r.pose;
  } else if (std::abs(norm_yaw(s.yaw - pose_.head.yaw)) > 1e-9 || std::abs(s.pitch - pose_.head.pitch) > 1e-9) {
    const auto r = act(pose_, HeadTurn{norm_yaw(s.yaw), s.pitch}, scene_.workspace);
    trace_.motions.push_back({quantize6(clock_ms_ / 1000.0), MotionKind::HeadTurn, 0.0});
    clock_ms_ += to_ms(r.elapsed_s);
    pose_ = r.pose;
  }
}

void Executive::face(Vec3 point) {
  const auto a = head_angles_to(pose_.head.position, point);
  move_to(Station{pose_.head.position, a[0], a[1]});
}

void Executive::record(const ObserverPose& true_pose, int duration_ms, OperationKind annotation) {
  const ObserverPose noisy = apply_noise(true_pose, noise_, noise_.enabled ? noise_rng_() : 0);
  const Vec3 eye = true_pose.head.position;
  const Vec3 dir = noisy.gaze_direction();
  const auto hit = view_.hit(eye, dir);

  FixationRecord r;
  r.t_start = clock_ms_ / 1000.0;
  r.duration_ms = duration_ms;
  r.head = noisy.head;
  r.head.yaw = norm_yaw(r.head.yaw);
  r.annotation = annotation;
  if (hit) {
    r.target = hit->target;
    r.gaze = hit->world;
    r.element = ElementRef{hit->part, hit->block, hit->face};
    const int s = sector_of(view_.frame[static_cast<std::size_t>(view_.slot(hit->target))].center(), eye);
    r.sector = s;
    state_.visited_sectors[static_cast<std::size_t>(view_.slot(hit->target))] |= static_cast<std::uint8_t>(1u << s);
  } else {
    r.target = Target::Environment;
    r.gaze = eye + dir * kEnvironmentDepth;
  }
  quantize(r);
  trace_.records.push_back(r);
  clock_ms_ += duration_ms;
}

Executive::Observation Executive::look(Target t, int part, int duration_ms, OperationKind annotation) {
  const auto s = static_cast<std::size_t>(view_.slot(t));
  const Vec3 eye = pose_.head.position;
  const auto visible = view_.visible(t, eye);
  std::optional<Element> best;
  for (int filter : {part, -1}) {
    double best_cos = -2.0;
    for (const auto& e : visible) {
      if (filter >= 0 && e.part != filter) continue;
      const Vec3 n = view_.frame[s].to_world(face_center(e.voxel, e.face) + face_normal(e.face)) - e.world;
      const double c = n.normalized().dot((eye - e.world).normalized());
      if (c > best_cos + 1e-12) {
        best = e;
        best_cos = c;
      }
    }
    if (best) break;
  }
  const Vec3 point = best ? best->world : view_.frame[s].center();

  auto g = gaze_angles_to(pose_.head, point);
  if (std::abs(g[0]) > kComfortAz || std::abs(g[1]) > kComfortEl) {
    face(view_.frame[s].center());
    g = gaze_angles_to(pose_.head, point);
    if (!in_visual_field(g[0], g[1])) {
      face(point);
      g = gaze_angles_to(pose_.head, point);
    }
  }
  pose_ = act(pose_, Saccade{g[0], g[1], duration_ms / 1000.0}).pose;
  interval_.push_back({t, part, duration_ms, pose_.head.position, pose_.head.yaw, pose_.head.pitch});
  const std::size_t before = trace_.records.size();
  record(pose_, duration_ms, annotation);
  const auto& r = trace_.records[before];
  Observation o;
  o.target = r.target;
  o.part = r.element ? r.element->part : -1;
  o.intended = part;
  return o;
}

Executive::Observation Executive::look_environment(double yaw, double pitch, OperationKind annotation) {
  move_to(Station{pose_.head.position, yaw, pitch});
  pose_.gaze_az = pose_.gaze_el = 0.0;
  const std::size_t before = trace_.records.size();
  record(pose_, kFixationMs, annotation);
  const auto& r = trace_.records[before];
  return {r.target, r.element ? r.element->part : -1, -1};
}

void Executive::note(const std::string& token) { trace_.notes.push_back({quantize6(clock_ms_ / 1000.0), token}); }

void Executive::dismiss() {
  note("dismiss");
  ++state_.reformulations;
}

int Executive::compare(const Observation& a, const Observation& b) const {
  // A fixation that slipped off its intended part says nothing either way;
  // aiming at a part the object does not have is itself evidence.
  auto landed = [&](const Observation& o) { return o.intended < 0 || o.part == o.intended || !has_part(o.target, o.intended); };
  if (a.target != Target::A || b.target != Target::B || !landed(a) || !landed(b)) return -1;
  return parts_equal(a.part, b.part) ? 1 : 0;
}

bool Executive::has_part(Target t, int part) const {
  return t != Target::Environment && part >= 0 && part < view_.parts[static_cast<std::size_t>(view_.slot(t))].count();
}

bool Executive::parts_equal(int part_a, int part_b) const {
  if (part_a < 0 || part_b < 0 || part_a != part_b) return false;
  if (part_a >= view_.parts[0].count() || part_b >= view_.parts[1].count()) return false;
  return view_.parts[0].part_voxels(scene_.object_a, part_a) == view_.parts[1].part_voxels(scene_.object_b, part_b);
}

void Executive::initialize() {
  current_ = OperationKind::ThreeDLayout;
  const Vec3 eye = pose_.head.position;
  const double toward = head_angles_to(eye, {kPostMidpoint.x, kPostMidpoint.y, eye.z})[0];
  // Turn round into the first pan position, then sweep across the room.
  for (double offset : {40.0, 0.0, -40.0}) look_environment(norm_yaw(toward + offset), 10.0, OperationKind::ThreeDLayout);
  current_ = OperationKind::LocateTargets;
  interval_.clear();
  look(Target::A, -1, kLocateMs, OperationKind::LocateTargets);
  look(Target::B, -1, kLocateMs, OperationKind::LocateTargets);
  interval_.clear();
}

DeployStatus Executive::settle(const std::vector<std::array<Observation, 2>>& pairs) {
  for (const auto& pr : pairs) {
    const int cmp = compare(pr[0], pr[1]);
    if (cmp < 0) continue;
    if (cmp == 1) {
      state_.conquered.insert(pr[0].part);
      continue;
    }
    // Remember what was intended so the outlier can be re-examined.
    state_.outlier = std::array<int, 2>{pr[0].intended >= 0 ? pr[0].intended : pr[0].part,
                                        pr[1].intended >= 0 ? pr[1].intended : pr[1].part};
    note("outlier");
    return outlier_detection();
  }
  if (ledger_complete()) {
    state_.candidate = GroundTruth::Same;
    state_.confidence = 0.5;
    concluding_ = interval_;
    note("candidate_same");
    return DeployStatus::Candidate;
  }
  return DeployStatus::Done;
}

DeployStatus Executive::outlier_detection() {
  if (!state_.outlier) return DeployStatus::NotApplicable;
  // Re-fixate the parts the mismatching fixations were aimed at.
  const int pa = (*state_.outlier)[0], pb = (*state_.outlier)[1];
  current_ = OperationKind::OutlierDetection;
  interval_.clear();
  auto cands = comparison_stations();
  Observation oa, ob;
  for (int side = 0; side < 2; ++side) {
    const Target t = side == 0 ? Target::A : Target::B;
    const int p = side == 0 ? pa : pb;
    if (!part_visible_from(pose_.head.position, t, p)) {
      auto all = cands;
      const auto sec = sector_stations(t);
      all.insert(all.end(), sec.begin(), sec.end());
      if (auto st = nearest_station(all, t, p)) move_to(*st);
    }
    (side == 0 ? oa : ob) = look(t, p, kFixationMs, OperationKind::OutlierDetection);
  }
  const bool on_targets = oa.target == Target::A && ob.target == Target::B &&
                          (oa.part == pa || !has_part(Target::A, pa)) && (ob.part == pb || !has_part(Target::B, pb));
  if (on_targets && !parts_equal(oa.part, ob.part)) {
    state_.candidate = GroundTruth::Different;
    state_.confidence = 0.5;
    concluding_ = interval_;
    note("candidate_different");
    return DeployStatus::Candidate;
  }
  if (on_targets) state_.conquered.insert(oa.part);
  state_.outlier.reset();
  dismiss();
  return DeployStatus::Dismissed;
}

DeployStatus Executive::global_gist(int coverage) {
  current_ = OperationKind::GlobalGist;
  interval_.clear();
  std::vector<Observation> seen[2];
  std::vector<int> planned;
  for (int side = 0; side < 2; ++side) {
    const Target t = side == 0 ? Target::A : Target::B;
    const auto slot = static_cast<std::size_t>(side);
    const Vec3 c = view_.frame[slot].center();
    const int have = std::popcount(static_cast<unsigned>(state_.visited_sectors[slot]));
    int runs = std::max(2, coverage - have);
    if (side == 1) runs = std::max(runs, static_cast<int>(planned.size()));
    std::uint8_t used = 0;
    const auto stations = sector_stations(t);
    for (int i = 0; i < runs && !over_budget(); ++i) {
      const std::uint8_t avoid = static_cast<std::uint8_t>(used | state_.visited_sectors[slot]);
      int part = -1;
      if (side == 1 && i < static_cast<int>(planned.size())) part = planned[static_cast<std::size_t>(i)];
      std::optional<Station> st;
      if (part >= 0) {
        // Prefer a fresh sector, but never one already used in this run.
        std::vector<Station> fresh;
        for (const auto& s : stations)
          if (!((used >> sector_of(c, s.eye)) & 1)) fresh.push_back(s);
        st = nearest_station(fresh, t, part, avoid);
      }
      if (!st) {
        std::vector<Station> fresh;
        for (const auto& s : stations)
          if (!((used >> sector_of(c, s.eye)) & 1)) fresh.push_back(s);
        st = nearest_station(fresh, t, -1, avoid);
        if (side == 1 && part >= 0 && st && !part_visible_from(st->eye, t, part)) part = -1;
      }
      if (!st) break;
      move_to(*st);
      used |= static_cast<std::uint8_t>(1u << sector_of(c, st->eye));
      if (side == 0) {
        for (int p : open_parts())
          if (part_visible_from(st->eye, t, p)) {
            part = p;
            break;
          }
        planned.push_back(part);
      }
      seen[side].push_back(look(t, part, kFixationMs, OperationKind::GlobalGist));
    }
  }
  std::vector<std::array<Observation, 2>> pairs;
  // Only fixations aimed at the same part on both objects are compared.
  for (std::size_t i = 0; i < std::min(seen[0].size(), seen[1].size()); ++i)
    if (seen[0][i].intended >= 0 && seen[1][i].intended == seen[0][i].intended) pairs.push_back({seen[0][i], seen[1][i]});
  return settle(pairs);
}

DeployStatus Executive::divide_and_conquer() {
  const auto open = open_parts();
  if (open.empty()) return DeployStatus::NotApplicable;
  current_ = OperationKind::DivideAndConquer;
  interval_.clear();
  for (int p : open) {
    if (over_budget()) return DeployStatus::Done;
    Observation obs[2];
    for (int side = 0; side < 2; ++side) {
      const Target t = side == 0 ? Target::A : Target::B;
      if (!part_visible_from(pose_.head.position, t, p)) {
        auto all = comparison_stations();
        const auto sec = sector_stations(t);
        all.insert(all.end(), sec.begin(), sec.end());
        if (auto st = nearest_station(all, t, p))
          move_to(*st);
        else if (auto any = nearest_station(all, t, -1))
          move_to(*any);
      }
      obs[side] = look(t, p, kFixationMs, OperationKind::DivideAndConquer);
    }
    const auto status = settle({{obs[0], obs[1]}});
    if (status != DeployStatus::Done) return status;
  }
  return DeployStatus::Done;
}

DeployStatus Executive::coarse_to_fine(int part) {
  if (part < 0 || part >= part_count()) return DeployStatus::NotApplicable;
  current_ = OperationKind::CoarseToFine;
  interval_.clear();
  const int n = 3 + std::min(2, state_.coarse_deployments);
  ++state_.coarse_deployments;
  Observation last[2];
  for (int side = 0; side < 2; ++side) {
    const Target t = side == 0 ? Target::A : Target::B;
    auto all = comparison_stations();
    const auto sec = sector_stations(t);
    all.insert(all.end(), sec.begin(), sec.end());
    if (auto st = nearest_station(all, t, part))
      move_to(*st);
    else if (auto any = nearest_station(all, t, -1))
      move_to(*any);
    for (int i = 0; i < n && !over_budget(); ++i)
      last[side] = look(t, part, kFixationMs + 100 * i, OperationKind::CoarseToFine);
  }
  return settle({{last[0], last[1]}});
}

DeployStatus Executive::alternating(int part, int reps, bool move_between) {
  if (part < 0 || part >= part_count() || reps < 2) return DeployStatus::NotApplicable;
  const OperationKind kind = move_between ? OperationKind::AlternatingView : OperationKind::AlternatingFixation;
  std::vector<Station> where[2];
  if (!move_between) {
    std::vector<Station> both;
    for (const auto& s : comparison_stations())
      if (part_visible_from(s.eye, Target::A, part) && part_visible_from(s.eye, Target::B, part)) both.push_back(s);
    if (both.empty()) return DeployStatus::NotApplicable;
    std::stable_sort(both.begin(), both.end(), [&](const Station& x, const Station& y) {
      return (x.eye - pose_.head.position).norm() < (y.eye - pose_.head.position).norm();
    });
    where[0] = where[1] = {both.front()};
  } else {
    for (int side = 0; side < 2; ++side) {
      const Target t = side == 0 ? Target::A : Target::B;
      for (const auto& s : sector_stations(t))
        if (part_visible_from(s.eye, t, part)) where[side].push_back(s);
      if (where[side].empty()) return DeployStatus::NotApplicable;
    }
    const Vec3 from = pose_.head.position;
    std::stable_sort(where[0].begin(), where[0].end(),
                     [&](const Station& x, const Station& y) { return (x.eye - from).norm() < (y.eye - from).norm(); });
    const Vec3 a0 = where[0].front().eye;
    std::stable_sort(where[1].begin(), where[1].end(),
                     [&](const Station& x, const Station& y) { return (x.eye - a0).norm() < (y.eye - a0).norm(); });
  }
  current_ = kind;
  interval_.clear();
  std::vector<std::array<Observation, 2>> pairs;
  for (int r = 0; r < reps && !over_budget(); ++r) {
    std::array<Observation, 2> pr;
    for (int side = 0; side < 2; ++side) {
      const auto& list = where[side];
      move_to(list[static_cast<std::size_t>(r) % list.size()]);
      pr[static_cast<std::size_t>(side)] = look(side == 0 ? Target::A : Target::B, part, kFixationMs, kind);
    }
    pairs.push_back(pr);
  }
  return settle(pairs);
}

DeployStatus Executive::deploy(OperationKind kind, const Bindings& params) {
  switch (kind) {
    case OperationKind::GlobalGist:
      return global_gist(int_param(params, "coverage", kDefaultCoverage));
    case OperationKind::DivideAndConquer:
      return divide_and_conquer();
    case OperationKind::CoarseToFine:
      return coarse_to_fine(int_param(params, "part", -1));
    case OperationKind::AlternatingFixation:
      return alternating(int_param(params, "part", -1), int_param(params, "reps", 2), false);
    case OperationKind::AlternatingView:
      return alternating(int_param(params, "part", -1), int_param(params, "reps", 2), true);
    case OperationKind::OutlierDetection:
      return outlier_detection();
    default:
      return DeployStatus::NotApplicable;
  }
}

bool Executive::confirm() {
  if (!state_.candidate || concluding_.empty()) return state_.candidate.has_value();
  const auto plan = concluding_;
  current_ = OperationKind::StrategyRepetition;
  interval_.clear();
  std::vector<Observation> seen[2];
  for (const auto& f : plan) {
    if (over_budget()) break;
    move_to(Station{f.eye, f.yaw, f.pitch});
    seen[f.target == Target::A ? 0 : 1].push_back(look(f.target, f.part, f.duration_ms, OperationKind::StrategyRepetition));
  }
  concluding_ = plan;
  bool any_equal = false, any_mismatch = false;
  std::vector<int> failed;
  for (std::size_t i = 0; i < std::min(seen[0].size(), seen[1].size()); ++i) {
    const int cmp = compare(seen[0][i], seen[1][i]);
    if (cmp == 1) any_equal = true;
    if (cmp == 0) {
      any_mismatch = true;
      failed.push_back(seen[0][i].part);
    }
  }
  // Inconclusive replays do not overturn either candidate.
  const bool confirmed = *state_.candidate == GroundTruth::Same ? !any_mismatch : !any_equal;
  if (confirmed) {
    state_.confidence = std::min(1.0, state_.confidence + 0.25);
    note("confirmed");
    return true;
  }
  note("uncertain");
  ++state_.reformulations;
  if (*state_.candidate == GroundTruth::Same)
    for (int p : failed) state_.conquered.erase(p);
  state_.candidate.reset();
  state_.outlier.reset();
  concluding_.clear();
  return false;
}

void Executive::finish(GroundTruth answer) {
  trace_.answer = answer;
  trace_.correct = answer == scene_.config.ground_truth;
}

void Executive::force_answer() {
  note("budget");
  GroundTruth g = GroundTruth::Same;
  if (state_.candidate)
    g = *state_.candidate;
  else if (state_.outlier)
    g = GroundTruth::Different;
  finish(g);
}

namespace {

Bindings bind_method(const CognitiveProgram& m, const Executive& ex, Rng& rng) {
  Bindings b;
  auto open = ex.open_parts();
  if (open.empty())
    for (int p = 0; p < ex.part_count(); ++p) open.push_back(p);
  std::size_t next = open.empty() ? 0 : uniform_index(rng, open.size());
  for (const auto& node : m.nodes)
    for (const auto& p : node.params) {
      if (p.value) continue;
      const std::string key = node.id + "." + p.name;
      if (p.name == "part" && !open.empty())
        b[key] = std::to_string(open[next++ % open.size()]);
      else if (p.name == "reps")
        b[key] = "2";
      else if (p.name == "coverage")
        b[key] = std::to_string(kDefaultCoverage);
    }
  return b;
}

Bindings node_params(const ProgramNode& n) {
  Bindings b;
  for (const auto& p : n.params)
    if (p.value) b[p.name] = *p.value;
  return b;
}

}  // namespace

TrialResult run_trial(const Scene& scene, const StrategyLibrary& strategies, const NoiseModel& noise,
                      std::uint64_t seed) {
  validate(strategies);
  Executive ex(scene, noise, seed);
  ex.initialize();
  std::vector<double> weights;
  for (const auto& m : strategies.methods) weights.push_back(m.weight);

  const DeployStatus kFallback = DeployStatus::NotApplicable;
  int idle = 0;
  bool answered = false;
  while (!answered) {
    if (ex.over_budget()) {
      ex.force_answer();
      break;
    }
    const auto& method = strategies.methods[sample_choice(weights, ex.rng())];
    const auto script = instantiate(method, bind_method(method, ex, ex.rng()));

    bool acted = false;
    DeployStatus last = kFallback;
    int node = script.entry;
    for (int steps = 0; steps < 64 && node >= 0 && !ex.over_budget(); ++steps) {
      const auto& n = script.nodes[static_cast<std::size_t>(node)];
      if (!n.choice && is_strategy_kind(n.kind)) {
        const std::size_t before = ex.trace().records.size();
        last = ex.deploy(n.kind, node_params(n));
        acted = acted || ex.trace().records.size() != before;
        if (last == DeployStatus::Candidate || last == DeployStatus::Dismissed) break;
        if (last == DeployStatus::NotApplicable && !acted) break;
      }
      const auto outs = script.outgoing(node);
      if (outs.empty()) break;
      std::vector<double> w;
      for (int a : outs) w.push_back(script.arcs[static_cast<std::size_t>(a)].weight);
      node = script.arcs[static_cast<std::size_t>(outs[sample_choice(w, ex.rng())])].to;
    }

    if (!acted) {
      // Nothing ran: resample without leaving a trace; fall back to a
      // part-wise comparison if the library keeps proposing inapplicable work.
      if (++idle < 50) continue;
      idle = 0;
      last = ex.deploy(OperationKind::DivideAndConquer, {});
      if (last == DeployStatus::NotApplicable) last = ex.deploy(OperationKind::GlobalGist, {});
    }
    idle = 0;
    if (last == DeployStatus::Dismissed) continue;
    if (last != DeployStatus::Candidate) {
      if (!ex.over_budget()) ex.dismiss();
      continue;
    }
    // Confirmation.
    for (;;) {
      if (ex.over_budget()) {
        ex.force_answer();
        answered = true;
        break;
      }
      const bool forced = ex.target_fixations() < kMinTargetFixations;
      if (!forced && !(uniform01(ex.rng()) < strategies.confirm)) {
        ex.finish(*ex.state().candidate);
        answered = true;
        break;
      }
      if (!ex.confirm()) break;
      if (ex.target_fixations() >= kMinTargetFixations) {
        ex.finish(*ex.state().candidate);
        answered = true;
        break;
      }
    }
  }
  Trace t = ex.take_trace();
  validate(t);
  return {*t.answer, std::move(t)};
}

TrialResult run_trial(const TrialConfig& config, const ObjectLibrary& objects, const StrategyLibrary& strategies,
                      const NoiseModel& noise, std::uint64_t seed) {
  return run_trial(build_scene(config, objects), strategies, noise, seed);
}

}  // namespace pesao
