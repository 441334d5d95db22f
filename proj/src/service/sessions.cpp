#include "stimforge/service/sessions.hpp"

#include <openssl/rand.h>

#include "stimforge/common/error.hpp"

namespace stimforge::service {

std::string random_hex(std::size_t bytes) {
  std::string raw(bytes, '\0');
  if (RAND_bytes(reinterpret_cast<unsigned char*>(raw.data()), static_cast<int>(bytes)) != 1) {
    throw Error(Errc::io_error, "random generator failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * bytes);
  for (unsigned char c : raw) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 15]);
  }
  return out;
}

SessionRegistry::SessionRegistry(Store& store, std::size_t queue_limit, std::shared_ptr<sync::Clock> clock)
    : store_(store), queue_limit_(queue_limit), clock_(clock ? std::move(clock) : std::make_shared<sync::SystemClock>()) {}

CreatedSession SessionRegistry::create(const std::string& flow_id) {
  const auto rec = store_.get_flow(flow_id);
  sync::SessionConfig cfg;
  cfg.session_id = "s-" + random_hex(12);
  cfg.flow = protocol::parse_flow(rec.document);
  cfg.publisher_token = random_hex(16);
  cfg.clock = clock_;
  cfg.log_path = store_.session_log_path(cfg.session_id);
  cfg.queue_limit = queue_limit_;
  CreatedSession out{nullptr, cfg.publisher_token};
  out.session = std::make_shared<sync::Session>(std::move(cfg));
  std::lock_guard lock(mu_);
  sessions_.emplace(out.session->id(), out.session);
  return out;
}

std::shared_ptr<sync::Session> SessionRegistry::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<sync::Session>> SessionRegistry::list() const {
  std::lock_guard lock(mu_);
  std::vector<std::shared_ptr<sync::Session>> out;
  for (const auto& [_, s] : sessions_) out.push_back(s);
  return out;
}

void SessionRegistry::heartbeat_all() {
  for (const auto& s : list()) {
    const auto st = s->state();
    if (st == sync::SessionState::Running || st == sync::SessionState::Paused) s->heartbeat();
  }
}

}  // namespace stimforge::service
