#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace pesao {

enum class Complexity { Easy, Medium, Hard };
enum class StartPosition { Long, Corner, Short };
enum class GroundTruth { Same, Different };
enum class Target { A, B, Environment };

inline constexpr std::array<Complexity, 3> kComplexities{Complexity::Easy, Complexity::Medium,
                                                         Complexity::Hard};
inline constexpr std::array<StartPosition, 3> kStartPositions{
    StartPosition::Long, StartPosition::Corner, StartPosition::Short};
inline constexpr std::array<int, 3> kOrientationDiffs{0, 90, 180};

/// The closed operation vocabulary used to annotate traces and label graphs.
enum class OperationKind {
  ThreeDLayout,
  LocateTargets,
  GlobalGist,
  OutlierDetection,
  DivideAndConquer,
  CoarseToFine,
  AlternatingFixation,
  AlternatingView,
  StrategyRepetition,
  TraceConnectedComponents,
  CompareArbitraryComponents,
  PointOfViewChange,
  ViewingAngleChange,
  Answer,
};

inline constexpr std::size_t kOperationKindCount = 14;

inline constexpr std::array<OperationKind, 5> kStrategyKinds{
    OperationKind::GlobalGist, OperationKind::DivideAndConquer, OperationKind::CoarseToFine,
    OperationKind::AlternatingFixation, OperationKind::AlternatingView};

std::string_view to_string(Complexity c);
std::string_view to_string(StartPosition s);
std::string_view to_string(GroundTruth g);
std::string_view to_string(Target t);
std::string_view to_string(OperationKind k);

std::optional<Complexity> parse_complexity(std::string_view s);
std::optional<StartPosition> parse_start(std::string_view s);
std::optional<GroundTruth> parse_ground_truth(std::string_view s);
std::optional<Target> parse_target(std::string_view s);
std::optional<OperationKind> parse_operation_kind(std::string_view s);

/// True for the B-stage kinds an executive may deploy as a strategy.
bool is_strategy_kind(OperationKind k);

}  // namespace pesao
