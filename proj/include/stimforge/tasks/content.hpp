#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>

#include "stimforge/common/json.hpp"

namespace stimforge::tasks {

struct MediaInfo {
  /// Lowercase hex SHA-256 of the bytes.
  std::string content_hash;
  std::string mime;
  std::uint64_t size = 0;
};

/// Content-addressed media directory: `<hash>` holds the bytes and
/// `<hash>.meta.json` the media type. Writes go through write-then-rename;
/// reads may run concurrently with each other, writes are exclusive.
class MediaStore {
 public:
  explicit MediaStore(std::filesystem::path dir);

  MediaInfo put(std::string_view bytes, const std::string& mime);
  std::optional<std::string> get(std::string_view hash) const;
  std::optional<MediaInfo> info(std::string_view hash) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
};

/// True for 64 lowercase hex digits.
bool is_content_hash(std::string_view text);

enum class ContentKind { Text, Image, Video };
std::string_view to_string(ContentKind kind);

/// Default built-in media ref for a content kind, e.g. "builtin:text/reading-passage".
std::string_view builtin_media_ref(ContentKind kind);

struct ResolvedMedia {
  std::string media_ref;
  MediaInfo info;
  bool builtin = false;
};

/// Accepts "builtin:<name>", "sha256:<hash>" or a bare hash. Throws
/// unknown_media when it does not resolve; `store` may be null.
ResolvedMedia resolve_media(std::string_view media_ref, const MediaStore* store);

/// Bytes of a built-in asset.
std::optional<std::string_view> builtin_media_bytes(std::string_view media_ref);

struct ContentDescriptor {
  ContentKind kind = ContentKind::Text;
  std::string media_ref;
  std::string content_hash;
  std::string mime;
  int duration_ms = 0;
  bool operator==(const ContentDescriptor&) const = default;
};

Json to_json(const ContentDescriptor& d);

/// An empty media_ref selects the kind's built-in asset. Throws
/// unknown_media for unresolved refs and invalid_argument when the media
/// type does not match the kind or the duration is not positive.
ContentDescriptor content_step(ContentKind kind, std::string_view media_ref, int duration_ms,
                               const MediaStore* store);

}  // namespace stimforge::tasks
