#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "stimforge/common/resources.hpp"
#include "stimforge/protocol/flow.hpp"

namespace testing {

inline std::string golden_text() {
  const auto text = stimforge::embedded_resource("flows/golden.flow.json");
  if (!text) throw std::runtime_error("golden flow missing from embedded data");
  return std::string(*text);
}

inline stimforge::protocol::ExperimentFlow golden_flow() { return stimforge::protocol::parse_flow(golden_text()); }

/// One-step flow with default settings.
inline stimforge::protocol::ExperimentFlow one_step_flow(stimforge::protocol::TaskType type,
                                                         std::optional<std::uint64_t> seed = std::nullopt) {
  stimforge::protocol::ExperimentFlow flow;
  flow.flow_id = "t";
  flow.name = "t";
  stimforge::protocol::FlowStep step;
  step.step_id = "s0";
  step.task_type = type;
  step.seed = seed;
  flow.steps.push_back(step);
  return flow;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("stimforge-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
