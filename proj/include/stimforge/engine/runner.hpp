#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stimforge/engine/plan.hpp"
#include "stimforge/eventlog/session_log.hpp"

namespace stimforge::engine {

/// Score written to a step's TaskEnd, recomputed from its Response entries.
/// Null for tasks without responses.
Json score_step(const StepPlan& plan, const std::vector<eventlog::LogEntry>& responses);

struct HeadlessOptions {
  /// Seeds the simulated participant; the presented stimuli depend only on the flow.
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> log_path;
  const tasks::MediaStore* store = nullptr;
};

struct HeadlessResult {
  std::string session_id;
  eventlog::LogHeader header;
  std::vector<eventlog::LogEntry> entries;
  eventlog::LogSeal seal;
};

/// Runs the whole flow on a virtual clock starting at 0 with a seeded
/// simulated participant. Two runs with the same flow and seed produce the
/// same entries; the header differs only in start_utc_ms.
HeadlessResult run_headless(const protocol::ExperimentFlow& flow, const HeadlessOptions& options);

/// Session id used by run_headless: derived from the flow hash and the seed.
std::string headless_session_id(const protocol::ExperimentFlow& flow, std::uint64_t seed);

}  // namespace stimforge::engine
