#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pesao/common.hpp"
#include "pesao/objectgen.hpp"

namespace pesao {

struct TrialConfig {
  std::string object_a;
  std::string object_b;
  GroundTruth ground_truth = GroundTruth::Same;
  int orientation_diff = 0;
  StartPosition start = StartPosition::Long;
  Complexity complexity = Complexity::Easy;
  int trial_index = 1;
  std::uint64_t seed = 0;

  friend bool operator==(const TrialConfig&, const TrialConfig&) = default;
};

inline constexpr int kTrialsPerSession = 18;
inline constexpr int kTrialsPerClass = 6;

/// "trial <index> <objA> <objB> <same|different> <orient> <start> <class> <seed>"
std::string to_line(const TrialConfig& config);
TrialConfig parse_trial_line(const std::string& line);

/// The 18 configurations of one session: six per complexity class in random
/// order, every other variable uniform, no (object, sameness, orientation,
/// start) configuration repeated. "Different" trials pair a library object
/// with a single-edit mutant of itself.
std::vector<TrialConfig> sample_session(const ObjectLibrary& library, std::uint64_t seed);

/// trial_index in 1..18 of the session drawn from `seed`.
TrialConfig sample_trial_config(const ObjectLibrary& library, int trial_index, std::uint64_t seed);

struct Workspace {
  double width = 4.3;   // x extent, meters
  double depth = 3.4;   // y extent, meters
  bool contains(Vec2 p) const { return p.x >= 0.0 && p.y >= 0.0 && p.x <= width && p.y <= depth; }
};

struct Post {
  Vec2 position;
  double mount_height = kMountHeightMeters;
  static constexpr double kMountHeightMeters = 1.4;
};

/// Post layout: posts 1 m apart on a line parallel to x. The midpoint sits
/// off-center so the short start (3.0 m along the post line) and the long
/// start (2.5 m across it) both fit inside the 4.3 x 3.4 m space.
inline constexpr Vec2 kPostMidpoint{3.3, 2.75};
inline constexpr double kPostSeparation = 1.0;
inline constexpr double kLongStartDistance = 2.5;
inline constexpr double kCornerStartDistance = 2.8;
inline constexpr double kShortStartDistance = 3.0;
inline constexpr double kStandingEyeHeight = 1.65;

struct Scene {
  Workspace workspace;
  Post post_a;
  Post post_b;
  int yaw_a = 0;  // degrees, multiple of 90
  int yaw_b = 0;
  Vec2 start_position;
  double start_yaw = 0.0;  // degrees; facing away from the posts
  BlockObject object_a;    // canonical pose
  BlockObject object_b;
  TrialConfig config;
};

/// Throws Error(InvalidArgument) for configs whose placement would leave the
/// workspace or whose objects cannot be resolved.
Scene build_scene(const TrialConfig& config, const ObjectLibrary& library);

/// Start position for a start kind, before workspace validation.
Vec2 start_position_for(StartPosition start);

struct StateQuantization {
  double visual_field_h = 180.0;
  double visual_field_v = 100.0;
  double gaze_cell_h = 2.0;
  double gaze_cell_v = 2.0;
  double head_span_yaw = 180.0;
  double head_span_pitch = 180.0;
  double head_quantum = 5.0;
  double workspace_width = 4.3;
  double workspace_depth = 3.4;
  double position_cell_w = 0.4;
  double position_cell_d = 0.4;
  double body_yaw_span = 360.0;
  double body_yaw_quantum = 5.0;
};

struct StateCounts {
  std::uint64_t fixation_angles = 0;
  std::uint64_t head_poses = 0;
  std::uint64_t positions = 0;
  std::uint64_t body_orientations = 0;
  std::uint64_t total() const { return fixation_angles * head_poses * positions * body_orientations; }
};

StateCounts state_counts(const StateQuantization& q);
std::uint64_t state_space_size(const StateQuantization& q);

}  // namespace pesao
