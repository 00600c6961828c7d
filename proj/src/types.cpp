#include "pesao/types.hpp"

#include <cstdio>
#include <cstdlib>

#include "pesao/common.hpp"

namespace pesao {

namespace {

constexpr std::array<std::string_view, kOperationKindCount> kKindNames{
    "ThreeDLayout",
    "LocateTargets",
    "GlobalGist",
    "OutlierDetection",
    "DivideAndConquer",
    "CoarseToFine",
    "AlternatingFixation",
    "AlternatingView",
    "StrategyRepetition",
    "TraceConnectedComponents",
    "CompareArbitraryComponents",
    "PointOfViewChange",
    "ViewingAngleChange",
    "Answer",
};

}  // namespace

double quantize6(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return std::strtod(buf, nullptr);
}

std::string format6(double value) {
  char buf[32];
  // Normalize negative zero so equal traces print identically.
  if (value == 0.0) value = 0.0;
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string_view to_string(Complexity c) {
  switch (c) {
    case Complexity::Easy: return "easy";
    case Complexity::Medium: return "medium";
    case Complexity::Hard: return "hard";
  }
  return "?";
}

std::string_view to_string(StartPosition s) {
  switch (s) {
    case StartPosition::Long: return "long";
    case StartPosition::Corner: return "corner";
    case StartPosition::Short: return "short";
  }
  return "?";
}

std::string_view to_string(GroundTruth g) {
  return g == GroundTruth::Same ? "same" : "different";
}

std::string_view to_string(Target t) {
  switch (t) {
    case Target::A: return "A";
    case Target::B: return "B";
    case Target::Environment: return "E";
  }
  return "?";
}

std::string_view to_string(OperationKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<Complexity> parse_complexity(std::string_view s) {
  for (auto c : kComplexities)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::optional<StartPosition> parse_start(std::string_view s) {
  for (auto p : kStartPositions)
    if (to_string(p) == s) return p;
  return std::nullopt;
}

std::optional<GroundTruth> parse_ground_truth(std::string_view s) {
  if (s == "same") return GroundTruth::Same;
  if (s == "different") return GroundTruth::Different;
  return std::nullopt;
}

std::optional<Target> parse_target(std::string_view s) {
  if (s == "A") return Target::A;
  if (s == "B") return Target::B;
  if (s == "E") return Target::Environment;
  return std::nullopt;
}

std::optional<OperationKind> parse_operation_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == s) return static_cast<OperationKind>(i);
  return std::nullopt;
}

bool is_strategy_kind(OperationKind k) {
  for (auto s : kStrategyKinds)
    if (s == k) return true;
  return k == OperationKind::OutlierDetection;
}

}  // namespace pesao
