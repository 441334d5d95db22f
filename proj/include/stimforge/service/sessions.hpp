#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "stimforge/service/store.hpp"
#include "stimforge/sync/session.hpp"

namespace stimforge::service {

struct CreatedSession {
  std::shared_ptr<sync::Session> session;
  std::string publisher_token;
};

/// Live sessions of one service instance. Logs outlive the registry: they
/// stay in the store after the process exits.
class SessionRegistry {
 public:
  SessionRegistry(Store& store, std::size_t queue_limit, std::shared_ptr<sync::Clock> clock = nullptr);

  /// Throws not_found for an unknown flow.
  CreatedSession create(const std::string& flow_id);
  /// nullptr when unknown.
  std::shared_ptr<sync::Session> find(const std::string& session_id) const;
  std::vector<std::shared_ptr<sync::Session>> list() const;
  /// Heartbeat to every running session.
  void heartbeat_all();

 private:
  Store& store_;
  std::size_t queue_limit_;
  std::shared_ptr<sync::Clock> clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<sync::Session>> sessions_;
};

/// Hex string of `bytes` random bytes from the OS generator.
std::string random_hex(std::size_t bytes);

}  // namespace stimforge::service
