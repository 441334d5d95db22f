#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace stimforge::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
  std::filesystem::path store = "stimforge-store";
  std::string log_level = "info";
  /// Served under /stimuli/ when set (the presenter/editor bundle).
  std::optional<std::filesystem::path> static_dir;
  int heartbeat_ms = 1000;
  std::size_t queue_limit = 10000;
};

/// "host:port"; throws invalid_argument.
void apply_address(ServiceConfig& config, const std::string& address);

/// Defaults, then the JSON config file (if given), then STIMFORGE_ADDR,
/// STIMFORGE_STORE and STIMFORGE_LOG_LEVEL.
ServiceConfig load_config(const std::optional<std::filesystem::path>& file);

}  // namespace stimforge::service
