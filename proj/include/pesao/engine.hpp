#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pesao/percept.hpp"
#include "pesao/program.hpp"
#include "pesao/tracefmt.hpp"

namespace pesao {

inline constexpr const char* kEngineVersion = "pesao-engine 1.0";
inline constexpr int kFixationBudget = 1000;
inline constexpr int kMinTargetFixations = 6;
inline constexpr int kDefaultCoverage = 4;

/// Working memory of the executive controller.
struct ExecutiveState {
  std::array<std::uint8_t, 2> visited_sectors{};  // bitmask per object
  std::set<int> conquered;                        // part indices compared equal on both objects
  std::optional<std::array<int, 2>> outlier;      // parts (A, B) a mismatching pair was aimed at
  std::optional<GroundTruth> candidate;
  double confidence = 0.0;
  int coarse_deployments = 0;
  int reformulations = 0;  // dismissed or uncertain threads
};

/// Dismissed: an outlier was not confirmed on re-fixation and the thread
/// ends without a candidate (the dismiss note is already recorded).
enum class DeployStatus { Done, NotApplicable, Candidate, Dismissed };

/// One planned fixation; kept so a concluding strategy can be replayed.
struct FixationPlan {
  Target target = Target::A;
  int part = 0;
  int duration_ms = 300;
  Vec3 eye;
  double yaw = 0.0;
  double pitch = 0.0;
};

/// Viewing position with its head orientation.
struct Station {
  Vec3 eye;
  double yaw = 0.0;
  double pitch = 0.0;
};

/// Runs the hypothesize-deploy-test loop for one trial and records the
/// annotated trace.
class Executive {
 public:
  Executive(const Scene& scene, const NoiseModel& noise, std::uint64_t seed);
  Executive(const Executive&) = delete;
  Executive& operator=(const Executive&) = delete;

  /// Turnaround, environment scan and the two short target fixations.
  void initialize();

  /// Executes one strategy with bound parameters. Returns NotApplicable
  /// without touching the trace when the strategy cannot run.
  DeployStatus deploy(OperationKind kind, const Bindings& params);

  /// Replays the last concluding strategy and settles or drops the
  /// candidate. Returns true when the candidate was confirmed.
  bool confirm();

  /// Records a candidate-free method end.
  void dismiss();
  void note(const std::string& token);

  void finish(GroundTruth answer);
  void force_answer();

  bool over_budget() const { return static_cast<int>(trace_.records.size()) >= kFixationBudget; }
  int target_fixations() const;
  int part_count() const;
  bool ledger_complete() const;
  /// Uncompared parts in index order.
  std::vector<int> open_parts() const;
  Rng& rng() { return rng_; }

  const ExecutiveState& state() const { return state_; }
  const Trace& trace() const { return trace_; }
  Trace take_trace() { return std::move(trace_); }
  const SceneView& view() const { return view_; }
  const ObserverPose& pose() const { return pose_; }

  std::vector<Station> sector_stations(Target t) const;
  std::vector<Station> comparison_stations() const;

 private:
  struct Observation {
    Target target = Target::Environment;
    int part = -1;      // observed
    int intended = -1;  // part the fixation was aimed at
  };

  void move_to(const Station& s);
  void face(Vec3 point);
  Observation look(Target t, int part, int duration_ms, OperationKind annotation);
  Observation look_environment(double yaw, double pitch, OperationKind annotation);
  void record(const ObserverPose& true_pose, int duration_ms, OperationKind annotation);
  std::optional<Station> nearest_station(const std::vector<Station>& candidates, Target t, int part,
                                         std::uint8_t avoid_sectors = 0) const;
  bool part_visible_from(Vec3 eye, Target t, int part) const;
  bool has_part(Target t, int part) const;
  /// 1 equal, 0 mismatch, -1 inconclusive.
  int compare(const Observation& a, const Observation& b) const;
  bool parts_equal(int part_a, int part_b) const;
  /// Compares observed part pairs; records an outlier or conquers.
  DeployStatus settle(const std::vector<std::array<Observation, 2>>& pairs);
  DeployStatus outlier_detection();

  DeployStatus global_gist(int coverage);
  DeployStatus divide_and_conquer();
  DeployStatus coarse_to_fine(int part);
  DeployStatus alternating(int part, int reps, bool move_between);

  Scene scene_;  // owned: view_ points into it
  SceneView view_;
  NoiseModel noise_;
  Rng rng_;
  Rng noise_rng_;
  ObserverPose pose_;
  std::int64_t clock_ms_ = 0;
  ExecutiveState state_;
  Trace trace_;
  std::vector<FixationPlan> interval_;     // fixations of the running operation
  std::vector<FixationPlan> concluding_;   // fixations of the operation that produced the candidate
  OperationKind current_ = OperationKind::Answer;
  mutable std::map<std::array<double, 4>, std::vector<int>> vis_cache_;
};

struct TrialResult {
  GroundTruth answer = GroundTruth::Same;
  Trace trace;
};

TrialResult run_trial(const TrialConfig& config, const ObjectLibrary& objects, const StrategyLibrary& strategies,
                      const NoiseModel& noise, std::uint64_t seed);
TrialResult run_trial(const Scene& scene, const StrategyLibrary& strategies, const NoiseModel& noise,
                      std::uint64_t seed);

}  // namespace pesao
