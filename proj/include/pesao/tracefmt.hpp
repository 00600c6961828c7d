#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pesao/percept.hpp"
#include "pesao/scenario.hpp"
#include "pesao/types.hpp"

namespace pesao {

inline constexpr const char* kTraceVersion = "pesao-sim/1";

struct ElementRef {
  int part = 0;
  int block = 0;
  int face = 0;
  friend bool operator==(const ElementRef&, const ElementRef&) = default;
};

struct FixationRecord {
  double t_start = 0.0;   // seconds from trial start
  double duration_ms = 0.0;
  HeadPose head;
  Vec3 gaze;              // fixated point, world meters
  Target target = Target::Environment;
  std::optional<ElementRef> element;
  std::optional<int> sector;
  std::optional<OperationKind> annotation;

  bool on_object() const { return target != Target::Environment; }
  double t_end() const { return t_start + duration_ms / 1000.0; }
  friend bool operator==(const FixationRecord&, const FixationRecord&) = default;
};

enum class MotionKind { Walk, HeadTurn };

struct MotionRecord {
  double t_start = 0.0;
  MotionKind kind = MotionKind::Walk;
  double path_m = 0.0;
  friend bool operator==(const MotionRecord&, const MotionRecord&) = default;
};

/// Executive decision points. Tokens: outlier, candidate_same,
/// candidate_different, dismiss, confirmed, uncertain, budget.
struct NoteRecord {
  double t = 0.0;
  std::string note;
  friend bool operator==(const NoteRecord&, const NoteRecord&) = default;
};

struct TraceMeta {
  TrialConfig config;
  std::string engine_version;
  std::uint64_t seed = 0;
  friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

struct Trace {
  TraceMeta meta;
  std::vector<FixationRecord> records;
  std::vector<MotionRecord> motions;
  std::vector<NoteRecord> notes;
  std::optional<GroundTruth> answer;
  bool correct = false;

  bool complete() const { return answer.has_value(); }
  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Rounds every floating field to its printed precision so that
/// read(write(t)) == t.
void quantize(FixationRecord& r);
void quantize(Trace& t);

/// Throws Error(Validation) on a broken invariant.
void validate(const Trace& t);

void write_trace(std::ostream& os, const Trace& t);
std::string write_trace(const Trace& t);

/// Throws ParseError (with line number) on malformed or truncated input and
/// Error(Validation) on invariant violations.
Trace read_trace(std::istream& is);
Trace read_trace_string(const std::string& text);
Trace read_trace_file(const std::string& path);
void write_trace_file(const std::string& path, const Trace& t);

struct TraceMetrics {
  int fixation_count = 0;
  double head_path_m = 0.0;
  double response_time_s = 0.0;
};

/// Throws Error(Incomplete) for traces without an answer or without any
/// fixation on a target.
TraceMetrics trace_metrics(const Trace& t);

/// Index of the first record falling on a target; the response clock starts
/// there.
std::optional<std::size_t> response_clock_zero(const Trace& t);

std::string_view to_string(MotionKind k);

}  // namespace pesao
