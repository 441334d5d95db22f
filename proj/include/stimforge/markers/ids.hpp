#pragma once

#include <optional>
#include <string>

#include "stimforge/protocol/task_type.hpp"

namespace stimforge::markers {

/// Marker ID table
///
///   0..13      edge markers (clockwise from the top-left top-edge marker)
///   32(k+1)..  32-ID block for the k-th marker-bearing task type;
///              instance i uses start = base + 1 + 2i, end = start + 1
///   960..971   slippage step markers, one per step kind
///   972..987   vergence depth markers, one per depth slot
///
/// Every ID stays below 1000 so the whole table fits a standard 4x4
/// dictionary with 1000 entries.
inline constexpr int kEdgeMarkerCount = 14;
inline constexpr int kBlockSize = 32;
inline constexpr int kInstancesPerTaskType = 15;
inline constexpr int kSlippageMarkerBase = 960;
inline constexpr int kSlippageSteps = 12;
inline constexpr int kVergenceMarkerBase = 972;
inline constexpr int kMaxVergenceDepths = 16;
inline constexpr int kDictionarySize = 1000;

struct MarkerPair {
  int start_id = -1;
  int end_id = -1;
  bool operator==(const MarkerPair&) const = default;
};

/// Ordinal of the task type among marker-bearing types, or nullopt.
std::optional<int> marker_block_ordinal(protocol::TaskType type);

/// Deterministic, injective (task type, instance) -> ID pair.
/// Throws range_exhausted past kInstancesPerTaskType, invalid_argument for
/// types that show no markers.
MarkerPair allocate_task_markers(protocol::TaskType type, int instance_index);

/// Marker shown at the onset of slippage step `step_number` (1..12).
int slippage_step_marker(int step_number);

/// Marker shown with the vergence target at depth slot `depth_index`.
int vergence_depth_marker(int depth_index);

/// Human-readable role of an ID ("edge 3", "fixation-horizontal#8 start", ...).
std::string describe_marker(int marker_id);

}  // namespace stimforge::markers
