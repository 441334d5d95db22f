#include "stimforge/service/config.hpp"

#include <cstdlib>

#include "stimforge/common/error.hpp"
#include "stimforge/common/fs.hpp"
#include "stimforge/common/json.hpp"

namespace stimforge::service {

void apply_address(ServiceConfig& c, const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
    throw Error(Errc::invalid_argument, "address must be host:port, got '" + address + "'");
  }
  const std::string port = address.substr(colon + 1);
  int value = 0;
  try {
    std::size_t used = 0;
    value = std::stoi(port, &used);
    if (used != port.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(Errc::invalid_argument, "address port is not a number: '" + port + "'");
  }
  if (value < 0 || value > 65535) throw Error(Errc::invalid_argument, "address port out of range");
  c.host = address.substr(0, colon);
  c.port = static_cast<std::uint16_t>(value);
}

ServiceConfig load_config(const std::optional<std::filesystem::path>& file) {
  ServiceConfig c;
  if (file) {
    const Json doc = parse_json(read_file_or_throw(*file));
    ObjectReader r(doc, file->string());
    if (r.has("address")) apply_address(c, r.get<std::string>("address"));
    if (r.has("store")) c.store = r.get<std::string>("store");
    if (r.has("log_level")) c.log_level = r.get<std::string>("log_level");
    if (r.has("static_dir")) c.static_dir = r.get<std::string>("static_dir");
    if (r.has("heartbeat_ms")) c.heartbeat_ms = r.get<int>("heartbeat_ms");
    if (r.has("queue_limit")) c.queue_limit = r.get<std::size_t>("queue_limit");
    r.finish();
  }
  if (const char* v = std::getenv("STIMFORGE_ADDR"); v && *v) apply_address(c, v);
  if (const char* v = std::getenv("STIMFORGE_STORE"); v && *v) c.store = v;
  if (const char* v = std::getenv("STIMFORGE_LOG_LEVEL"); v && *v) c.log_level = v;
  if (c.heartbeat_ms <= 0) throw Error(Errc::invalid_argument, "heartbeat_ms must be positive");
  return c;
}

}  // namespace stimforge::service
