#include "stimforge/eventlog/verify.hpp"

#include <cmath>
#include <map>

#include "stimforge/common/error.hpp"
#include "stimforge/engine/plan.hpp"
#include "stimforge/engine/runner.hpp"
#include "stimforge/eventlog/reconstruct.hpp"
#include "stimforge/markers/ids.hpp"
#include "stimforge/trajectory/pursuit.hpp"

namespace stimforge::eventlog {
namespace {

namespace ev = event;
constexpr double kDualityTolerance = 1e-6;

class Reporter {
 public:
  explicit Reporter(VerifyReport& r) : r_(r) {}
  void add(std::string_view check, std::string message, std::optional<std::size_t> entry = std::nullopt,
           std::string step_id = {}) {
    r_.issues.push_back({std::string(check), entry, std::move(step_id), std::move(message)});
  }

 private:
  VerifyReport& r_;
};

std::string dump_short(const Json& j) {
  auto s = j.dump();
  return s.size() > 160 ? s.substr(0, 157) + "..." : s;
}

/// First key where two detail objects differ, for readable issues.
std::string first_difference(const Json& expected, const Json& actual) {
  if (!expected.is_object() || !actual.is_object()) return "expected " + dump_short(expected) + ", got " + dump_short(actual);
  for (const auto& [k, v] : expected.items()) {
    auto it = actual.find(k);
    if (it == actual.end()) return "missing field " + k;
    if (*it != v) return k + ": expected " + dump_short(v) + ", got " + dump_short(*it);
  }
  for (const auto& [k, _] : actual.items()) {
    if (!expected.contains(k)) return "unexpected field " + k;
  }
  return "differs";
}

bool is_pursuit(protocol::TaskType t) { return protocol::family_of(t) == protocol::TaskFamily::Pursuit; }

trajectory::PursuitMode pursuit_mode(protocol::TaskType t) {
  using protocol::TaskType;
  using trajectory::PursuitMode;
  switch (t) {
    case TaskType::PursuitAccelerating: return PursuitMode::Accelerating;
    case TaskType::PursuitRandom: return PursuitMode::Random;
    case TaskType::PursuitCircular: return PursuitMode::Circular;
    case TaskType::PursuitWandering: return PursuitMode::Wandering;
    default: return PursuitMode::Constant;
  }
}

void check_seal(const SessionLog& log, Reporter& rep) {
  if (!log.seal) {
    rep.add("seal", "log is not sealed");
    return;
  }
  if (log.seal->entry_count != log.entries.size()) {
    rep.add("seal", "seal entry_count " + std::to_string(log.seal->entry_count) + " but log has " +
                        std::to_string(log.entries.size()) + " entries");
  }
  if (log.seal->content_hash != log.computed_hash) rep.add("seal", "content hash mismatch");
}

void check_timestamps(const SessionLog& log, Reporter& rep) {
  for (std::size_t i = 1; i < log.entries.size(); ++i) {
    if (log.entries[i].timestamp < log.entries[i - 1].timestamp) {
      rep.add("timestamps", "timestamp " + std::to_string(log.entries[i].timestamp) + " precedes " +
                                std::to_string(log.entries[i - 1].timestamp), i);
    }
  }
}

void check_order(const Timeline& tl, const protocol::ExperimentFlow& flow, Reporter& rep) {
  if (tl.tasks.size() != flow.steps.size()) {
    rep.add("task-order", "log has " + std::to_string(tl.tasks.size()) + " tasks, flow has " +
                              std::to_string(flow.steps.size()) + " steps");
  }
  for (std::size_t i = 0; i < tl.tasks.size() && i < flow.steps.size(); ++i) {
    const auto& t = tl.tasks[i];
    const auto& s = flow.steps[i];
    const auto name = protocol::task_name(s.task_type);
    if (t.step_id != s.step_id || t.step_index != static_cast<std::int64_t>(i) ||
        t.task_type != protocol::to_string(s.task_type) || t.task_name != name) {
      rep.add("task-order", "task " + std::to_string(i) + " is '" + t.step_id + "' (" + t.task_type +
                                "), flow expects '" + s.step_id + "' (" + std::string(protocol::to_string(s.task_type)) + ")",
              t.start_entry, s.step_id);
      continue;
    }
    if (t.end_details.value("stepId", "") != s.step_id) {
      rep.add("task-order", "TaskEnd stepId does not match its TaskStart", t.end_entry, s.step_id);
    }
    if (protocol::carries_markers(s.task_type)) {
      const auto m = markers::allocate_task_markers(s.task_type, protocol::instance_index(flow, i));
      if (t.start_details.value("markerId", -1) != m.start_id) {
        rep.add("task-order", "TaskStart markerId differs from allocation " + std::to_string(m.start_id), t.start_entry, s.step_id);
      }
      if (t.end_details.value("markerId", -1) != m.end_id) {
        rep.add("task-order", "TaskEnd markerId differs from allocation " + std::to_string(m.end_id), t.end_entry, s.step_id);
      }
    }
  }
}

void check_snapshots(const SessionLog& log, const protocol::ExperimentFlow& flow, Reporter& rep) {
  std::map<std::size_t, Json> expected;
  auto expected_for = [&](std::size_t idx) -> const Json& {
    auto it = expected.find(idx);
    if (it == expected.end()) it = expected.emplace(idx, protocol::to_json(protocol::resolve_step_settings(flow, idx))).first;
    return it->second;
  };
  for (std::size_t i = 0; i < log.entries.size(); ++i) {
    const auto& e = log.entries[i];
    if (e.event_type != ev::kTaskStart && e.event_type != ev::kConfigSnapshot) continue;
    const auto idx = e.details.value("stepIndex", std::int64_t{-1});
    const std::string step_id = e.details.value("stepId", "");
    if (idx < 0 || static_cast<std::size_t>(idx) >= flow.steps.size()) {
      rep.add("snapshots", e.event_type + " has no valid stepIndex", i, step_id);
      continue;
    }
    auto cs = e.details.find("currentSettings");
    if (cs == e.details.end()) {
      rep.add("snapshots", e.event_type + " lacks currentSettings", i, step_id);
      continue;
    }
    const Json& want = expected_for(static_cast<std::size_t>(idx));
    if (*cs != want) rep.add("snapshots", "currentSettings " + first_difference(want, *cs), i, step_id);
  }
}

void check_stimuli(const Timeline& tl, const protocol::ExperimentFlow& flow, const std::vector<engine::StepPlan>& plans,
                   bool virtual_clock, const VerifyOptions& opt, Reporter& rep) {
  for (std::size_t i = 0; i < tl.tasks.size() && i < plans.size(); ++i) {
    const auto& t = tl.tasks[i];
    const auto& p = plans[i];
    if (t.step_id != p.step_id) continue;  // reported by task-order
    const std::int64_t content0 = t.start_ts + p.lead_ms;
    const std::int64_t tol = virtual_clock ? 0 : opt.live_timing_tolerance_ms;

    if (is_pursuit(p.task_type) && !virtual_clock) {
      // Live presenters sample at their own frame times: check each position
      // against the trajectory at the logged time instead.
      const trajectory::PursuitTrajectory traj(trajectory::pursuit_params(p.settings, pursuit_mode(p.task_type), p.seed),
                                               p.settings);
      for (std::size_t k = 0; k < t.stimuli.size(); ++k) {
        const auto& d = t.stimuli[k].details;
        const auto s = traj.at(static_cast<double>(t.stimuli[k].timestamp - content0));
        const double dx = d.value("xPx", NAN) - s.x_px, dy = d.value("yPx", NAN) - s.y_px;
        if (!(std::hypot(dx, dy) <= opt.position_tolerance_px)) {
          rep.add("stimuli", "pursuit sample off trajectory", t.stimulus_entries[k], p.step_id);
        }
      }
      continue;
    }

    if (t.stimuli.size() != p.stimuli.size()) {
      rep.add("stimuli", "logged " + std::to_string(t.stimuli.size()) + " stimulus events, regeneration has " +
                             std::to_string(p.stimuli.size()), t.start_entry, p.step_id);
    }
    for (std::size_t k = 0; k < t.stimuli.size() && k < p.stimuli.size(); ++k) {
      const auto& got = t.stimuli[k];
      const auto& want = p.stimuli[k];
      const auto entry = t.stimulus_entries[k];
      if (got.event_type != want.event_type) {
        rep.add("stimuli", "event " + std::to_string(k) + " is " + got.event_type + ", expected " + want.event_type, entry, p.step_id);
        continue;
      }
      if (got.details != want.details) {
        rep.add("stimuli", "event " + std::to_string(k) + " " + first_difference(want.details, got.details), entry, p.step_id);
      }
      const auto onset = got.timestamp - content0;
      if (std::llabs(onset - want.offset_ms) > tol) {
        rep.add("stimuli", "event " + std::to_string(k) + " onset " + std::to_string(onset) + " ms, expected " +
                               std::to_string(want.offset_ms), entry, p.step_id);
      }
    }
    if (virtual_clock && t.end_ts - t.start_ts != p.lead_ms + p.content_ms) {
      rep.add("stimuli", "task lasted " + std::to_string(t.end_ts - t.start_ts) + " ms, expected " +
                             std::to_string(p.lead_ms + p.content_ms), t.end_entry, p.step_id);
    }
  }
  (void)flow;
}

void check_duality(const SessionLog& log, const Timeline& tl, const protocol::ExperimentFlow& flow, Reporter& rep) {
  // Geometry in effect per entry: the enclosing task's snapshot, else the global preset.
  std::vector<const Json*> snapshot(log.entries.size(), nullptr);
  for (const auto& t : tl.tasks) {
    for (std::size_t i = t.start_entry; i <= t.end_entry && i < snapshot.size(); ++i) snapshot[i] = &t.settings;
  }
  const Json global = protocol::to_json(flow.global_preset);
  for (std::size_t i = 0; i < log.entries.size(); ++i) {
    const auto& d = log.entries[i].details;
    const bool has_px = d.contains("xPx") || d.contains("yPx");
    const bool has_cm = d.contains("xCm") || d.contains("yCm");
    if (!has_px && !has_cm) continue;
    const Json& s = snapshot[i] && snapshot[i]->is_object() ? *snapshot[i] : global;
    auto num = [](const Json& j, const char* k) {
      auto it = j.find(k);
      return it != j.end() && it->is_number() ? it->get<double>() : NAN;
    };
    const double vw = num(s, "viewportWidthPx"), vh = num(s, "viewportHeightPx");
    const double sw = num(s, "screenWidthCm"), sh = num(s, "screenHeightCm");
    const double xp = num(d, "xPx"), yp = num(d, "yPx"), xc = num(d, "xCm"), yc = num(d, "yCm");
    if (std::isnan(xp) || std::isnan(yp) || std::isnan(xc) || std::isnan(yc)) {
      rep.add("duality", "positional entry lacks one of xPx, yPx, xCm, yCm", i);
      continue;
    }
    if (!(std::abs(xc * vw - xp * sw) <= kDualityTolerance)) rep.add("duality", "xCm and xPx disagree", i);
    if (!(std::abs(yc * vh - yp * sh) <= kDualityTolerance)) rep.add("duality", "yCm and yPx disagree", i);
  }
}

void check_scores(const Timeline& tl, const std::vector<engine::StepPlan>& plans, Reporter& rep) {
  for (std::size_t i = 0; i < tl.tasks.size() && i < plans.size(); ++i) {
    const auto& t = tl.tasks[i];
    const auto& p = plans[i];
    if (t.step_id != p.step_id) continue;
    Json want;
    try {
      want = engine::score_step(p, t.responses);
    } catch (const std::exception& e) {
      rep.add("scores", std::string("responses cannot be scored: ") + e.what(), t.end_entry, p.step_id);
      continue;
    }
    const Json got = t.end_details.value("score", Json(nullptr));
    if (got != want) rep.add("scores", "score " + first_difference(want, got), t.end_entry, p.step_id);
  }
}

}  // namespace

bool VerifyReport::passed(std::string_view check) const {
  for (const auto& i : issues) {
    if (i.check == check) return false;
  }
  return true;
}

Json to_json(const VerifyReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back({{"check", c}, {"passed", r.passed(c)}});
  Json issues = Json::array();
  for (const auto& i : r.issues) {
    Json j{{"check", i.check}, {"message", i.message}};
    if (i.entry) j["entry"] = *i.entry;
    if (!i.step_id.empty()) j["stepId"] = i.step_id;
    issues.push_back(std::move(j));
  }
  return {{"ok", r.ok()}, {"checks", std::move(checks)}, {"issues", std::move(issues)}};
}

VerifyReport verify(const SessionLog& log, const protocol::ExperimentFlow& flow, const VerifyOptions& options) {
  VerifyReport report;
  report.checks = {"seal", "timestamps", "structure", "flow-hash", "task-order", "snapshots", "stimuli", "duality", "scores"};
  Reporter rep(report);

  check_seal(log, rep);
  check_timestamps(log, rep);
  if (log.header.flow_hash != protocol::flow_hash(flow)) {
    rep.add("flow-hash", "header flow_hash " + log.header.flow_hash + " is not the flow's hash " + protocol::flow_hash(flow));
  }
  check_snapshots(log, flow, rep);

  Timeline tl;
  try {
    tl = reconstruct(log, true);
  } catch (const std::exception& e) {
    rep.add("structure", e.what());
    // Still check coordinates entry by entry against the global preset.
    check_duality(log, tl, flow, rep);
    return report;
  }
  check_order(tl, flow, rep);
  check_duality(log, tl, flow, rep);

  std::vector<engine::StepPlan> plans;
  try {
    plans = engine::plan_session(flow, options.store);
  } catch (const std::exception& e) {
    rep.add("stimuli", std::string("flow cannot be regenerated: ") + e.what());
    return report;
  }
  check_stimuli(tl, flow, plans, log.header.clock_basis == "virtual", options, rep);
  check_scores(tl, plans, rep);
  return report;
}

}  // namespace stimforge::eventlog
