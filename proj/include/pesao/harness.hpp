#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pesao/engine.hpp"

namespace pesao {

/// Plan file: `key = value` lines, '#' comments. Keys: library_seed,
/// sessions, noise (on/off), master_seed, strategy_library (path, optional),
/// threads (0 = hardware).
struct ExperimentPlan {
  std::uint64_t library_seed = 1;
  int sessions = 1;
  bool noise = true;
  std::uint64_t master_seed = 0;
  std::string strategy_library;
  int threads = 0;

  int trial_count() const { return sessions * kTrialsPerSession; }
  friend bool operator==(const ExperimentPlan&, const ExperimentPlan&) = default;
};

ExperimentPlan parse_plan(std::istream& is);
ExperimentPlan parse_plan_string(const std::string& text);
ExperimentPlan read_plan_file(const std::string& path);
std::string write_plan(const ExperimentPlan& plan);

struct ResultsRow {
  int session = 0;
  int trial = 0;  // 1..18 within the session
  Complexity complexity = Complexity::Easy;
  StartPosition start = StartPosition::Long;
  int orientation = 0;
  GroundTruth ground_truth = GroundTruth::Same;
  GroundTruth answer = GroundTruth::Same;
  bool correct = false;
  int fixations = 0;
  double head_movement_m = 0.0;
  double response_time_s = 0.0;

  friend bool operator==(const ResultsRow&, const ResultsRow&) = default;
};

struct ExperimentResult {
  std::vector<ResultsRow> rows;      // session, then trial order
  std::vector<std::string> errors;   // per-trial failures; the batch carries on
};

/// Runs every trial of the plan. Trial seeds derive from the master seed,
/// session and trial index, so results do not depend on scheduling. With a
/// nonempty out_dir, writes results.tsv and traces/sNN_tTT.trace.
ExperimentResult run_experiment(const ExperimentPlan& plan, const std::string& out_dir = {});

std::uint64_t session_seed(std::uint64_t master, int session);
std::uint64_t trial_seed(std::uint64_t master, int session, int trial);

void write_results(std::ostream& os, const std::vector<ResultsRow>& rows);
std::string write_results(const std::vector<ResultsRow>& rows);
std::vector<ResultsRow> read_results(std::istream& is);
std::vector<ResultsRow> read_results_file(const std::string& path);

/// Metrics: accuracy, fixations, response_time, head_movement.
/// Dimensions: complexity, start, sameness, orientation, trial_index (the
/// 1..6 position of a trial within its complexity class in a session).
struct SummaryCell {
  std::vector<std::string> key;
  int n = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct SummaryTable {
  std::string name;
  std::string metric;
  std::vector<std::string> dimensions;
  std::vector<SummaryCell> cells;  // sorted by key
};

/// Throws Error(InvalidArgument) for an unknown metric or dimension and for
/// empty rows.
SummaryTable summarize(const std::vector<ResultsRow>& rows, const std::string& metric,
                       const std::vector<std::string>& dimensions, const std::string& name = {});

struct Pairing {
  const char* name;
  const char* metric;
  std::vector<std::string> dimensions;
};

/// The standard metric × dimension pairings of the report.
const std::vector<Pairing>& standard_pairings();
std::vector<SummaryTable> summarize_all(const std::vector<ResultsRow>& rows);

void write_summary(std::ostream& os, const SummaryTable& t);

/// Within-class position (1..6) of each row, in row order.
std::vector<int> class_positions(const std::vector<ResultsRow>& rows);

struct Trend {
  Complexity complexity = Complexity::Easy;
  int n = 0;
  double slope = 0.0;     // OLS, metric per trial-index step
  double spearman = 0.0;  // 0 for a constant series
  double p_value = 1.0;   // two-sided permutation test on |spearman|
};

inline constexpr int kPermutations = 1000;

/// Per-complexity trend of a metric over within-class trial index. Throws
/// Error(InvalidArgument) when a class has fewer than two trials.
std::vector<Trend> learning_effect(const std::vector<ResultsRow>& rows, const std::string& metric,
                                   int permutations = kPermutations, std::uint64_t seed = 0);

double spearman(const std::vector<double>& x, const std::vector<double>& y);
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Human means reported for the original experiment. Display only.
struct ReferenceConstants {
  static constexpr double accuracy = 0.9382;
  static constexpr double accuracy_sd = 0.039;
  static constexpr double fixations = 92.38;
  static constexpr double response_time_s = 47.52;
  static constexpr double response_time_sd = 30.39;
  static constexpr double head_movement_m = 16.62;
  static constexpr int min_fixations = 6;
  static constexpr double easy_aligned_accuracy = 1.0;
  static constexpr double response_time_min_s = 4.2;
  static constexpr double response_time_max_s = 298.0;
};

/// Reference annotation for a metric, e.g. "human mean 92.38".
std::string reference_note(const std::string& metric);

/// Box-and-whisker plot of a summary table with n= labels.
void write_svg(std::ostream& os, const SummaryTable& t);

/// Writes summary_<name>.tsv and <name>.svg per pairing plus learning.tsv.
/// Throws Error(InvalidArgument) for empty rows.
void write_report(const std::vector<ResultsRow>& rows, const std::string& out_dir);

/// Mines every *.trace file of trace_dir (sorted by name) and writes
/// trial_graphs/<stem>.dot, trial_graphs/<stem>.graph, methods.lib and
/// methods.dot into out_dir. Returns the number of traces mined.
int mine_directory(const std::string& trace_dir, const std::string& out_dir, double min_support);

/// Writes through a temporary file and a rename.
void write_atomically(const std::string& path, const std::string& content);

/// PESAO_OUT_DIR, when set and nonempty, overrides the given directory.
std::string resolve_out_dir(const std::string& requested);

}  // namespace pesao
