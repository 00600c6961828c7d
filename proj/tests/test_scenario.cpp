#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "pesao/scenario.hpp"

using namespace pesao;

namespace {

const ObjectLibrary& lib() {
  static const ObjectLibrary l = generate_library(11);
  return l;
}

}  // namespace

TEST_CASE("a session holds six trials per class") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = sample_session(lib(), seed);
    REQUIRE(s.size() == 18);
    std::map<Complexity, int> per;
    std::set<std::tuple<std::string, int, int, int>> keys;
    for (std::size_t i = 0; i < s.size(); ++i) {
      per[s[i].complexity]++;
      CHECK(s[i].trial_index == static_cast<int>(i) + 1);
      CHECK((s[i].orientation_diff == 0 || s[i].orientation_diff == 90 || s[i].orientation_diff == 180));
      keys.insert({s[i].object_a, static_cast<int>(s[i].ground_truth), s[i].orientation_diff,
                   static_cast<int>(s[i].start)});
    }
    CHECK(per[Complexity::Easy] == 6);
    CHECK(per[Complexity::Medium] == 6);
    CHECK(per[Complexity::Hard] == 6);
    CHECK(keys.size() == 18);
  }
}

TEST_CASE("sample_trial_config is deterministic and matches the session") {
  const auto s = sample_session(lib(), 42);
  for (int i = 1; i <= 18; ++i) CHECK(sample_trial_config(lib(), i, 42) == s[static_cast<std::size_t>(i - 1)]);
  CHECK_THROWS_AS(sample_trial_config(lib(), 0, 42), Error);
  CHECK_THROWS_AS(sample_trial_config(lib(), 19, 42), Error);
}

TEST_CASE("start positions are uniform within a binomial bound") {
  const int n = 10000;
  std::map<StartPosition, int> count;
  std::map<int, int> orient;
  int same = 0;
  for (int i = 0; i < n; ++i) {
    const auto c = sample_trial_config(lib(), 1 + i % 18, static_cast<std::uint64_t>(i) * 7919);
    count[c.start]++;
    orient[c.orientation_diff]++;
    if (c.ground_truth == GroundTruth::Same) ++same;
  }
  const double p = 1.0 / 3.0;
  const double sd = std::sqrt(n * p * (1 - p));
  for (auto s : kStartPositions) CHECK(std::abs(count[s] - n * p) <= 3 * sd);
  for (int o : kOrientationDiffs) CHECK(std::abs(orient[o] - n * p) <= 3 * sd);
  CHECK(std::abs(same - n * 0.5) <= 3 * std::sqrt(n * 0.25));
}

TEST_CASE("trial line round trip") {
  for (const auto& c : sample_session(lib(), 5)) {
    const auto line = to_line(c);
    CHECK(line.rfind("trial ", 0) == 0);
    CHECK(parse_trial_line(line) == c);
  }
  CHECK_THROWS_AS(parse_trial_line("trial 1 E1 E1 same 45 long easy 3"), Error);
  CHECK_THROWS_AS(parse_trial_line("trial 1 E1 E1 maybe 0 long easy 3"), Error);
  CHECK_THROWS_AS(parse_trial_line("trial 1 E1"), Error);
}

TEST_CASE("scene geometry per start kind") {
  for (std::uint64_t seed = 0; seed < 6; ++seed)
    for (const auto& c : sample_session(lib(), seed)) {
      const auto s = build_scene(c, lib());
      CHECK(s.workspace.contains(s.post_a.position));
      CHECK(s.workspace.contains(s.post_b.position));
      CHECK(s.workspace.contains(s.start_position));
      CHECK(((s.yaw_b - s.yaw_a) % 360 + 360) % 360 == c.orientation_diff);
      CHECK(is_same(s.object_a, s.object_b) == (c.ground_truth == GroundTruth::Same));
      const double da = (s.start_position - s.post_a.position).norm();
      const double db = (s.start_position - s.post_b.position).norm();
      if (c.start == StartPosition::Long) CHECK(std::abs(da - db) < 1e-3);
      if (c.start == StartPosition::Corner) CHECK(std::abs(da - db) > 0.05);
      if (c.start == StartPosition::Short) {
        const Vec2 u = s.post_a.position - s.start_position;
        const Vec2 v = s.post_b.position - s.start_position;
        const double ang = rad2deg(std::atan2(u.x * v.y - u.y * v.x, u.x * v.x + u.y * v.y));
        CHECK(std::abs(ang) < 0.5);
        CHECK(std::abs(da - db) > 0.5);
      }
      // Facing away: the posts lie behind the start heading.
      const Vec2 heading{std::cos(deg2rad(s.start_yaw)), std::sin(deg2rad(s.start_yaw))};
      const Vec2 to_mid = kPostMidpoint - s.start_position;
      CHECK(heading.x * to_mid.x + heading.y * to_mid.y < 0.0);
      // Determinism.
      const auto again = build_scene(c, lib());
      CHECK(again.yaw_a == s.yaw_a);
      CHECK(again.object_b.blocks == s.object_b.blocks);
    }
}

TEST_CASE("build_scene rejects inconsistent configs") {
  auto c = sample_session(lib(), 3)[0];
  c.ground_truth = c.ground_truth == GroundTruth::Same ? GroundTruth::Different : GroundTruth::Same;
  CHECK_THROWS_AS(build_scene(c, lib()), Error);
  c = sample_session(lib(), 3)[0];
  c.orientation_diff = 45;
  CHECK_THROWS_AS(build_scene(c, lib()), Error);
  c = sample_session(lib(), 3)[0];
  c.object_a = "nope";
  CHECK_THROWS_AS(build_scene(c, lib()), Error);
}

TEST_CASE("state space arithmetic") {
  const StateQuantization q;
  const auto c = state_counts(q);
  CHECK(c.fixation_angles == 4500);
  CHECK(c.head_poses == 1296);
  CHECK(c.positions == 91);
  CHECK(c.body_orientations == 72);
  CHECK(state_space_size(q) == 38211264000ULL);

  StateQuantization one = q;
  one.gaze_cell_h = one.visual_field_h;
  one.gaze_cell_v = one.visual_field_v;
  one.head_quantum = 180.0;
  one.position_cell_w = one.workspace_width;
  one.position_cell_d = one.workspace_depth;
  one.body_yaw_quantum = 360.0;
  CHECK(state_space_size(one) == 1);

  // Monotone nonincreasing in every quantum.
  std::uint64_t prev = state_space_size(q);
  for (double g = 2.0; g <= 20.0; g += 1.5) {
    StateQuantization r = q;
    r.gaze_cell_h = g;
    const auto n = state_space_size(r);
    CHECK(n <= prev);
    prev = n;
  }
  prev = state_space_size(q);
  for (double p = 0.4; p <= 3.0; p += 0.13) {
    StateQuantization r = q;
    r.position_cell_w = p;
    const auto n = state_space_size(r);
    CHECK(n <= prev);
    prev = n;
  }
}
