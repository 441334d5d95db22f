#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "stimforge/protocol/validate.hpp"
#include "stimforge/tasks/content.hpp"

namespace stimforge::service {

enum class Visibility { Private, Shared };
std::string_view to_string(Visibility v);
std::optional<Visibility> visibility_from_string(std::string_view name);

/// A stored flow. `document` holds the bytes as posted; `content_hash` is
/// their SHA-256 and `flow_hash` the hash of the canonical serialization.
struct FlowStoreRecord {
  std::string flow_id;
  std::string document;
  std::string content_hash;
  std::string flow_hash;
  Visibility visibility = Visibility::Private;
  std::int64_t created_utc_ms = 0;
};

/// Metadata without the document.
Json to_json(const FlowStoreRecord& record);

/// Thrown by FlowStore::put for flows with error-severity issues.
class InvalidFlow : public Error {
 public:
  explicit InvalidFlow(protocol::ValidationReport report);
  const protocol::ValidationReport& report() const { return report_; }

 private:
  protocol::ValidationReport report_;
};

/// Directory-per-store layout:
///   flows/<flow_id>.flow.json    the posted document
///   flows/<flow_id>.meta.json    hash, visibility, creation time
///   media/<sha256>               uploaded media (see MediaStore)
///   sessions/<id>.session.jsonl  session logs
///
/// Every write goes through write-then-rename.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  /// Parses and validates. Re-posting identical bytes returns the existing
  /// record; a different document under an existing flow_id throws conflict.
  FlowStoreRecord put_flow(std::string_view document, Visibility visibility = Visibility::Private);
  /// Throws not_found, or io_error when the stored bytes no longer match
  /// their recorded hash.
  FlowStoreRecord get_flow(const std::string& flow_id) const;
  std::vector<FlowStoreRecord> list_flows(std::optional<Visibility> filter = std::nullopt) const;
  FlowStoreRecord set_visibility(const std::string& flow_id, Visibility visibility);

  tasks::MediaStore& media() { return media_; }
  const tasks::MediaStore& media() const { return media_; }
  std::filesystem::path session_log_path(const std::string& session_id) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path flow_path(const std::string& id) const;
  std::filesystem::path meta_path(const std::string& id) const;
  FlowStoreRecord load_locked(const std::string& id) const;

  std::filesystem::path root_;
  tasks::MediaStore media_;
  mutable std::shared_mutex mu_;
};

/// Flow ids and session ids become file names: [A-Za-z0-9._-], 1..128
/// characters, not starting with a dot.
bool is_safe_id(std::string_view id);

}  // namespace stimforge::service
