#include "stimforge/markers/ids.hpp"

#include "stimforge/common/error.hpp"

namespace stimforge::markers {

using protocol::TaskType;

std::optional<int> marker_block_ordinal(TaskType type) {
  if (!protocol::carries_markers(type)) return std::nullopt;
  int ordinal = 0;
  for (TaskType t : protocol::all_task_types()) {
    if (t == type) return ordinal;
    if (protocol::carries_markers(t)) ++ordinal;
  }
  return std::nullopt;
}

MarkerPair allocate_task_markers(TaskType type, int instance_index) {
  const auto ordinal = marker_block_ordinal(type);
  if (!ordinal) {
    throw Error(Errc::invalid_argument,
                "task type '" + std::string(protocol::to_string(type)) + "' shows no fiducial markers");
  }
  if (instance_index < 0) throw Error(Errc::invalid_argument, "instance index must be non-negative");
  if (instance_index >= kInstancesPerTaskType) {
    throw Error(Errc::range_exhausted, "marker range exhausted for '" + std::string(protocol::to_string(type)) +
                                           "': at most " + std::to_string(kInstancesPerTaskType) +
                                           " instances per flow");
  }
  const int base = kBlockSize * (*ordinal + 1);
  const int start = base + 1 + 2 * instance_index;
  return {start, start + 1};
}

int slippage_step_marker(int step_number) {
  if (step_number < 1 || step_number > kSlippageSteps) {
    throw Error(Errc::out_of_range, "slippage step number must be in 1..12");
  }
  return kSlippageMarkerBase + step_number - 1;
}

int vergence_depth_marker(int depth_index) {
  if (depth_index < 0 || depth_index >= kMaxVergenceDepths) {
    throw Error(Errc::range_exhausted, "vergence supports at most " + std::to_string(kMaxVergenceDepths) +
                                           " depth positions");
  }
  return kVergenceMarkerBase + depth_index;
}

std::string describe_marker(int id) {
  if (id >= 0 && id < kEdgeMarkerCount) return "edge " + std::to_string(id);
  if (id >= kSlippageMarkerBase && id < kSlippageMarkerBase + kSlippageSteps) {
    return "slippage step " + std::to_string(id - kSlippageMarkerBase + 1);
  }
  if (id >= kVergenceMarkerBase && id < kVergenceMarkerBase + kMaxVergenceDepths) {
    return "vergence depth " + std::to_string(id - kVergenceMarkerBase);
  }
  if (id >= kBlockSize) {
    const int ordinal = id / kBlockSize - 1;
    const int offset = id % kBlockSize;
    int k = 0;
    for (TaskType t : protocol::all_task_types()) {
      if (!protocol::carries_markers(t)) continue;
      if (k++ != ordinal) continue;
      if (offset >= 1 && offset <= 2 * kInstancesPerTaskType) {
        const int instance = (offset - 1) / 2;
        return std::string(protocol::to_string(t)) + "#" + std::to_string(instance) +
               ((offset - 1) % 2 == 0 ? " start" : " end");
      }
    }
  }
  return "unassigned";
}

}  // namespace stimforge::markers
