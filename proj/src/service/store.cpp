#include "stimforge/service/store.hpp"

#include <chrono>

#include "stimforge/common/fs.hpp"
#include "stimforge/common/hash.hpp"

namespace stimforge::service {
namespace fs = std::filesystem;

namespace {

std::int64_t now_utc_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string_view to_string(Visibility v) { return v == Visibility::Shared ? "shared" : "private"; }

std::optional<Visibility> visibility_from_string(std::string_view name) {
  if (name == "private") return Visibility::Private;
  if (name == "shared") return Visibility::Shared;
  return std::nullopt;
}

Json to_json(const FlowStoreRecord& r) {
  return {{"flow_id", r.flow_id},
          {"content_hash", r.content_hash},
          {"flow_hash", r.flow_hash},
          {"visibility", to_string(r.visibility)},
          {"created_utc_ms", r.created_utc_ms}};
}

InvalidFlow::InvalidFlow(protocol::ValidationReport report)
    : Error(Errc::validation_error, "flow failed validation"), report_(std::move(report)) {}

bool is_safe_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

Store::Store(fs::path root) : root_(std::move(root)), media_(root_ / "media") {
  fs::create_directories(root_ / "flows");
  fs::create_directories(root_ / "sessions");
}

fs::path Store::flow_path(const std::string& id) const { return root_ / "flows" / (id + ".flow.json"); }
fs::path Store::meta_path(const std::string& id) const { return root_ / "flows" / (id + ".meta.json"); }

fs::path Store::session_log_path(const std::string& session_id) const {
  if (!is_safe_id(session_id)) throw Error(Errc::invalid_argument, "unsafe session id '" + session_id + "'");
  return root_ / "sessions" / (session_id + ".session.jsonl");
}

FlowStoreRecord Store::load_locked(const std::string& id) const {
  if (!is_safe_id(id)) throw Error(Errc::not_found, "no flow '" + id + "'");
  auto doc = read_file(flow_path(id));
  auto meta = read_file(meta_path(id));
  if (!doc || !meta) throw Error(Errc::not_found, "no flow '" + id + "'");
  const Json meta_json = parse_json(*meta);
  ObjectReader r(meta_json, "flow meta");
  FlowStoreRecord rec;
  rec.flow_id = id;
  rec.document = std::move(*doc);
  rec.content_hash = r.get<std::string>("content_hash");
  rec.flow_hash = r.get<std::string>("flow_hash");
  rec.visibility = visibility_from_string(r.get<std::string>("visibility")).value_or(Visibility::Private);
  rec.created_utc_ms = r.get<std::int64_t>("created_utc_ms");
  if (sha256_hex(rec.document) != rec.content_hash) {
    throw Error(Errc::io_error, "stored flow '" + id + "' does not match its content hash");
  }
  return rec;
}

FlowStoreRecord Store::put_flow(std::string_view document, Visibility visibility) {
  const auto flow = protocol::parse_flow(document);
  if (!is_safe_id(flow.flow_id)) {
    throw Error(Errc::invalid_argument, "flow_id '" + flow.flow_id + "' must match [A-Za-z0-9._-]{1,128}");
  }
  auto report = protocol::validate_flow(flow, &media_);
  if (!report.ok()) throw InvalidFlow(std::move(report));

  std::unique_lock lock(mu_);
  FlowStoreRecord rec;
  rec.flow_id = flow.flow_id;
  rec.document = std::string(document);
  rec.content_hash = sha256_hex(document);
  rec.flow_hash = protocol::flow_hash(flow);
  rec.visibility = visibility;
  rec.created_utc_ms = now_utc_ms();
  if (fs::exists(meta_path(rec.flow_id))) {
    auto existing = load_locked(rec.flow_id);
    if (existing.content_hash == rec.content_hash) return existing;
    throw Error(Errc::conflict, "flow '" + rec.flow_id + "' already exists with different content");
  }
  write_file_atomic(flow_path(rec.flow_id), rec.document);
  write_file_atomic(meta_path(rec.flow_id), to_json(rec).dump(2) + "\n");
  return rec;
}

FlowStoreRecord Store::get_flow(const std::string& flow_id) const {
  std::shared_lock lock(mu_);
  return load_locked(flow_id);
}

std::vector<FlowStoreRecord> Store::list_flows(std::optional<Visibility> filter) const {
  std::shared_lock lock(mu_);
  std::vector<FlowStoreRecord> out;
  for (const auto& e : fs::directory_iterator(root_ / "flows")) {
    const auto name = e.path().filename().string();
    constexpr std::string_view suffix = ".meta.json";
    if (name.size() <= suffix.size() || !name.ends_with(suffix)) continue;
    auto rec = load_locked(name.substr(0, name.size() - suffix.size()));
    if (!filter || rec.visibility == *filter) out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.flow_id < b.flow_id; });
  return out;
}

FlowStoreRecord Store::set_visibility(const std::string& flow_id, Visibility visibility) {
  std::unique_lock lock(mu_);
  auto rec = load_locked(flow_id);
  rec.visibility = visibility;
  write_file_atomic(meta_path(flow_id), to_json(rec).dump(2) + "\n");
  return rec;
}

}  // namespace stimforge::service
