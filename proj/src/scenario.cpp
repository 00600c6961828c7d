#include "pesao/scenario.hpp"

#include <array>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

namespace pesao {

std::string to_line(const TrialConfig& c) {
  std::ostringstream os;
  os << "trial " << c.trial_index << ' ' << c.object_a << ' ' << c.object_b << ' '
     << to_string(c.ground_truth) << ' ' << c.orientation_diff << ' ' << to_string(c.start) << ' '
     << to_string(c.complexity) << ' ' << c.seed;
  return os.str();
}

TrialConfig parse_trial_line(const std::string& line) {
  std::istringstream is(line);
  std::string tag, gt, start, cls, extra;
  TrialConfig c;
  if (!(is >> tag >> c.trial_index >> c.object_a >> c.object_b >> gt >> c.orientation_diff >> start >>
        cls >> c.seed) ||
      tag != "trial" || (is >> extra))
    throw Error(ErrorCode::Parse, "malformed trial line: " + line);
  auto g = parse_ground_truth(gt);
  auto s = parse_start(start);
  auto k = parse_complexity(cls);
  if (!g || !s || !k) throw Error(ErrorCode::Parse, "bad enum token in trial line: " + line);
  if (c.orientation_diff != 0 && c.orientation_diff != 90 && c.orientation_diff != 180)
    throw Error(ErrorCode::Parse, "orientation must be 0, 90 or 180: " + line);
  if (c.trial_index < 1) throw Error(ErrorCode::Parse, "trial index must be >= 1: " + line);
  c.ground_truth = *g;
  c.start = *s;
  c.complexity = *k;
  return c;
}

std::vector<TrialConfig> sample_session(const ObjectLibrary& library, std::uint64_t seed) {
  if (auto err = validate(library)) throw Error(ErrorCode::InvalidArgument, "invalid library: " + *err);
  auto rng = make_rng(mix_seed(seed, 0x5e55));

  std::vector<Complexity> order;
  for (auto c : kComplexities)
    for (int i = 0; i < kTrialsPerClass; ++i) order.push_back(c);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);

  std::set<std::tuple<std::string, int, int, int>> used;
  std::vector<TrialConfig> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto pool = library.of_class(order[i]);
    TrialConfig c;
    c.complexity = order[i];
    c.trial_index = static_cast<int>(i) + 1;
    c.seed = mix_seed(seed, static_cast<std::uint64_t>(c.trial_index), 0x7a1);
    // 72 combinations per class for 6 draws; rejection terminates quickly.
    for (;;) {
      c.object_a = pool[uniform_index(rng, pool.size())]->id;
      c.ground_truth = uniform_index(rng, 2) == 0 ? GroundTruth::Same : GroundTruth::Different;
      c.orientation_diff = kOrientationDiffs[uniform_index(rng, kOrientationDiffs.size())];
      c.start = kStartPositions[uniform_index(rng, kStartPositions.size())];
      auto key = std::make_tuple(c.object_a, static_cast<int>(c.ground_truth), c.orientation_diff,
                                 static_cast<int>(c.start));
      if (used.insert(key).second) break;
    }
    c.object_b = c.ground_truth == GroundTruth::Same ? c.object_a
                                                     : mutant_id(c.object_a, mix_seed(c.seed, 0x3d));
    out.push_back(std::move(c));
  }
  return out;
}

TrialConfig sample_trial_config(const ObjectLibrary& library, int trial_index, std::uint64_t seed) {
  if (trial_index < 1 || trial_index > kTrialsPerSession)
    throw Error(ErrorCode::InvalidArgument, "trial index must be in 1..18");
  return sample_session(library, seed)[static_cast<std::size_t>(trial_index - 1)];
}

Vec2 start_position_for(StartPosition start) {
  switch (start) {
    case StartPosition::Long:
      return kPostMidpoint - Vec2{0.0, kLongStartDistance};
    case StartPosition::Short:
      return kPostMidpoint - Vec2{kShortStartDistance, 0.0};
    case StartPosition::Corner: {
      const double d = kCornerStartDistance * std::cos(deg2rad(45.0));
      return kPostMidpoint - Vec2{d, d};
    }
  }
  return kPostMidpoint;
}

Scene build_scene(const TrialConfig& config, const ObjectLibrary& library) {
  if (config.orientation_diff != 0 && config.orientation_diff != 90 && config.orientation_diff != 180)
    throw Error(ErrorCode::InvalidArgument, "orientation_diff must be 0, 90 or 180");
  Scene s;
  s.config = config;
  s.post_a.position = kPostMidpoint - Vec2{kPostSeparation / 2, 0.0};
  s.post_b.position = kPostMidpoint + Vec2{kPostSeparation / 2, 0.0};
  auto rng = make_rng(mix_seed(config.seed, 0x5ce));
  s.yaw_a = 90 * static_cast<int>(uniform_index(rng, 4));
  s.yaw_b = (s.yaw_a + config.orientation_diff) % 360;
  s.start_position = start_position_for(config.start);
  const Vec2 away = s.start_position - kPostMidpoint;
  s.start_yaw = rad2deg(std::atan2(away.y, away.x));

  for (const Vec2 p : {s.post_a.position, s.post_b.position, s.start_position})
    if (!s.workspace.contains(p))
      throw Error(ErrorCode::InvalidArgument, "placement leaves the workspace");

  s.object_a = canonical_object(resolve_object(library, config.object_a));
  s.object_b = canonical_object(resolve_object(library, config.object_b));
  if (s.object_a.complexity != config.complexity)
    throw Error(ErrorCode::InvalidArgument, "object class does not match trial class");
  const bool same = is_same(s.object_a, s.object_b);
  if (same != (config.ground_truth == GroundTruth::Same))
    throw Error(ErrorCode::InvalidArgument, "ground truth disagrees with the referenced objects");
  return s;
}

namespace {

// Cell counts use floor division; the small epsilon keeps exact quotients
// such as 180/2 from landing one below after rounding.
std::uint64_t cells(double span, double quantum) {
  if (!(quantum > 0.0) || !(span > 0.0))
    throw Error(ErrorCode::InvalidArgument, "quantization spans and quanta must be positive");
  return static_cast<std::uint64_t>(std::floor(span / quantum + 1e-9));
}

}  // namespace

StateCounts state_counts(const StateQuantization& q) {
  StateCounts c;
  c.fixation_angles = cells(q.visual_field_h, q.gaze_cell_h) * cells(q.visual_field_v, q.gaze_cell_v);
  c.head_poses = cells(q.head_span_yaw, q.head_quantum) * cells(q.head_span_pitch, q.head_quantum);
  c.positions = cells(q.workspace_width * q.workspace_depth, q.position_cell_w * q.position_cell_d);
  c.body_orientations = cells(q.body_yaw_span, q.body_yaw_quantum);
  return c;
}

std::uint64_t state_space_size(const StateQuantization& q) { return state_counts(q).total(); }

}  // namespace pesao
