#pragma once

#include <cstdint>
#include <memory>

#include "stimforge/service/api.hpp"
#include "stimforge/service/config.hpp"

namespace stimforge::service {

/// HTTP and WebSocket front end on one port.
///
///   /api/v1/...                         REST (ApiRouter)
///   /ws/publish/{id}?token=T            publisher connection
///   /ws/subscribe/{id}?replay_from=N    subscriber connection
///   /stimuli/...                        static files from static_dir
class Server {
 public:
  Server(const ServiceConfig& config, Store& store, SessionRegistry& sessions);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the I/O and heartbeat threads. Port 0 picks a free port.
  void start();
  std::uint16_t port() const;
  void stop();
  /// Blocks until stop() is called.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace stimforge::service
