#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stimforge/eventlog/session_log.hpp"
#include "stimforge/protocol/flow.hpp"
#include "stimforge/tasks/content.hpp"

namespace stimforge::eventlog {

/// Check identifiers, in report order.
///   seal        seal present, entry count and content hash match
///   timestamps  non-decreasing
///   structure   task brackets balance, no unknown event types
///   flow-hash   (a) header flow_hash equals the flow's hash
///   task-order  (b) one task per flow step, in order, with the allocated markers
///   snapshots   (c) TaskStart and ConfigSnapshot settings equal resolve_step_settings
///   stimuli     (d) presented events equal the seeded regeneration
///   duality     (e) xCm * viewport_w == xPx * screen_w (and y) within 1e-6
///   scores      TaskEnd scores equal the scores recomputed from the responses
struct VerifyIssue {
  std::string check;
  std::optional<std::size_t> entry;
  std::string step_id;
  std::string message;
};

struct VerifyReport {
  std::vector<std::string> checks;
  std::vector<VerifyIssue> issues;
  bool ok() const { return issues.empty(); }
  bool passed(std::string_view check) const;
};

Json to_json(const VerifyReport& report);

struct VerifyOptions {
  const tasks::MediaStore* store = nullptr;
  /// Allowed onset error against the plan for logs on a real clock. Virtual
  /// clock logs must match exactly.
  std::int64_t live_timing_tolerance_ms = 100;
  double position_tolerance_px = 1e-6;
};

/// Never throws for log content; every mismatch becomes an issue.
VerifyReport verify(const SessionLog& log, const protocol::ExperimentFlow& flow, const VerifyOptions& options = {});

}  // namespace stimforge::eventlog
