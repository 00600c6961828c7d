#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pesao/program.hpp"
#include "pesao/tracefmt.hpp"

namespace pesao {

/// Detector thresholds. Defaults are documented in the README.
struct DetectorConfig {
  double locate_max_ms = 300.0;          // LocateTargets fixations are shorter than this
  double closeness_factor = 0.25;        // × bounding-sphere diameter, for connected-component tracing
  double stationary_m = 0.10;            // head displacement bound for AlternatingFixation
  double stationary_deg = 10.0;          // head rotation bound for AlternatingFixation
  double body_displacement_m = 0.4;      // PointOfViewChange threshold
  int min_alternations = 2;              // A.p B.p repeated at least this often
  int min_coarse_run = 3;                // fixations per object in CoarseToFine
  int min_gist_sectors = 2;              // distinct sectors per object in GlobalGist
};

struct OperationInterval {
  double t0 = 0.0;
  double t1 = 0.0;
  OperationKind kind = OperationKind::Answer;
  std::vector<std::size_t> evidence;  // record indices
  std::string rule;
  double confidence = 1.0;

  friend bool operator==(const OperationInterval&, const OperationInterval&) = default;
};

struct Initialization {
  std::optional<OperationInterval> layout;  // ThreeDLayout
  std::optional<OperationInterval> locate;  // LocateTargets
  bool flagged() const { return !layout || !locate; }
};

Initialization detect_initialization(const Trace& t, const DetectorConfig& cfg = {});

/// Strategy intervals (the five strategies plus OutlierDetection) in
/// temporal order. Records are split into segments at notes and parsed
/// greedily.
std::vector<OperationInterval> detect_strategy_operations(const Trace& t, const DetectorConfig& cfg = {});

/// StrategyRepetition intervals: a segment following a candidate (or a
/// confirmation) whose (target, part) sequence equals the fixations leading
/// up to the candidate. `prior` supplies the strategy intervals; any of them
/// lying inside a repetition are superseded by it in detect_operations.
std::vector<OperationInterval> detect_confirmation(const Trace& t, const std::vector<OperationInterval>& prior,
                                                   const DetectorConfig& cfg = {});

/// Initialization, strategies and confirmations, sorted by start time.
std::vector<OperationInterval> detect_operations(const Trace& t, const DetectorConfig& cfg = {});

/// Re-evaluates the rule predicate of an interval on its evidence records.
bool rule_holds(const Trace& t, const OperationInterval& iv, const DetectorConfig& cfg = {});

/// Visual elemental operation of a fixation segment (≥ 2 records):
/// TraceConnectedComponents when the median gaze step is below
/// closeness_factor × diameter, else CompareArbitraryComponents.
std::optional<OperationKind> classify_elemental(const Trace& t, std::span<const std::size_t> records,
                                                double object_diameter_m, const DetectorConfig& cfg = {});
/// Spatial elemental operation of a motion between two head positions:
/// PointOfViewChange when the body moved at least body_displacement_m
/// horizontally, else ViewingAngleChange.
OperationKind classify_elemental(Vec3 head_before, Vec3 head_after, const DetectorConfig& cfg = {});
/// Motion i of the trace, using the fixations around it.
std::optional<OperationKind> classify_motion(const Trace& t, std::size_t motion, const DetectorConfig& cfg = {});

/// Engine ground truth: maximal runs of equal annotations, split at notes.
std::vector<OperationInterval> annotated_intervals(const Trace& t);

double temporal_iou(const OperationInterval& a, const OperationInterval& b);

struct DetectionScore {
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
  double precision() const;
  double recall() const;
  double f1() const;
};

/// Accumulates per-kind scores; intervals match one-to-one (greedy by IoU)
/// when they share a kind and overlap with IoU ≥ min_iou.
void score_detection(const std::vector<OperationInterval>& detected, const std::vector<OperationInterval>& truth,
                     std::map<OperationKind, DetectionScore>& scores, double min_iou = 0.5);

struct TrialNode {
  OperationKind kind = OperationKind::Answer;
  double t0 = 0.0;
  double t1 = 0.0;
  bool dead_end = false;  // part of a dismissed thread
};

struct TrialArc {
  int from = 0;
  int to = 0;
  bool back_edge = false;  // reformulation after an uncertain confirmation
};

struct TrialGraph {
  std::vector<TrialNode> nodes;  // temporal order, Answer last
  std::vector<TrialArc> arcs;
  int answer = -1;

  /// Dismissed threads hanging off the main line.
  int dead_end_branches() const;
  /// Label sequences of every root-to-leaf thread (dead ends included).
  std::vector<std::vector<OperationKind>> paths() const;
};

/// Throws Error(Incomplete) for a trace without an answer.
TrialGraph build_trial_graph(const Trace& t, const std::vector<OperationInterval>& intervals);

struct MethodArc {
  int from = 0;
  int to = 0;
  double frequency = 1.0;
  friend bool operator==(const MethodArc&, const MethodArc&) = default;
};

struct MethodGraph {
  std::vector<OperationKind> nodes;  // node 0 is the entry
  std::vector<MethodArc> arcs;
  int support = 0;

  std::vector<int> outgoing(int node) const;
  /// Whether the label sequence occurs as a path starting at some node.
  bool contains(std::span<const OperationKind> seq) const;
  friend bool operator==(const MethodGraph&, const MethodGraph&) = default;
};

inline constexpr double kDefaultMinSupport = 0.10;

/// Frequent contiguous label sub-sequences (length ≥ 2, trial support ≥
/// min_support × corpus), reduced to maximal ones and merged at shared
/// prefixes. Arc frequencies are branching proportions over occurrences.
/// Throws Error(InvalidArgument) for fewer than two graphs.
std::vector<MethodGraph> mine_method_graphs(const std::vector<TrialGraph>& graphs,
                                            double min_support = kDefaultMinSupport);

/// Mined graphs as a reloadable strategy library; method weights are
/// normalized supports and unbound strategy parameters are left open.
StrategyLibrary to_library(const std::vector<MethodGraph>& graphs, double confirm = 0.5);

void write_dot(std::ostream& os, const MethodGraph& g, const std::string& name);
void write_dot(std::ostream& os, const TrialGraph& g, const std::string& name);
/// Node/arc lines in the library statement style.
void write_trial_graph(std::ostream& os, const TrialGraph& g);

}  // namespace pesao
