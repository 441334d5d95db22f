#include "stimforge/tasks/content.hpp"

#include <array>
#include <mutex>

#include "stimforge/common/error.hpp"
#include "stimforge/common/fs.hpp"
#include "stimforge/common/hash.hpp"
#include "stimforge/common/resources.hpp"

namespace stimforge::tasks {
namespace {

struct Builtin {
  std::string_view ref;
  std::string_view resource;
  std::string_view mime;
};

constexpr std::array<Builtin, 3> kBuiltins{{
    {"builtin:text/reading-passage", "content/reading-passage.txt", "text/plain; charset=utf-8"},
    {"builtin:image/scene", "content/scene.svg", "image/svg+xml"},
    {"builtin:video/drifting-grating", "content/drifting-grating.video.json",
     "application/vnd.stimforge.procedural-video+json"},
}};

const Builtin* find_builtin(std::string_view ref) {
  for (const auto& b : kBuiltins) {
    if (b.ref == ref) return &b;
  }
  return nullptr;
}

bool kind_accepts(ContentKind kind, std::string_view mime) {
  switch (kind) {
    case ContentKind::Text: return mime.starts_with("text/");
    case ContentKind::Image: return mime.starts_with("image/");
    case ContentKind::Video:
      return mime.starts_with("video/") || mime == "application/vnd.stimforge.procedural-video+json";
  }
  return false;
}

}  // namespace

bool is_content_hash(std::string_view text) {
  if (text.size() != 64) return false;
  for (char c : text) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

MediaStore::MediaStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

MediaInfo MediaStore::put(std::string_view bytes, const std::string& mime) {
  if (mime.empty() || mime.find('\n') != std::string::npos) {
    throw Error(Errc::invalid_argument, "media: a single-line media type is required");
  }
  MediaInfo info{sha256_hex(bytes), mime, bytes.size()};
  std::unique_lock lock(mu_);
  const auto path = dir_ / info.content_hash;
  if (!std::filesystem::exists(path)) write_file_atomic(path, bytes);
  const Json meta{{"mime", mime}, {"size", info.size}};
  write_file_atomic(dir_ / (info.content_hash + ".meta.json"), meta.dump() + "\n");
  return info;
}

std::optional<std::string> MediaStore::get(std::string_view hash) const {
  if (!is_content_hash(hash)) return std::nullopt;
  std::shared_lock lock(mu_);
  return read_file(dir_ / std::string(hash));
}

std::optional<MediaInfo> MediaStore::info(std::string_view hash) const {
  if (!is_content_hash(hash)) return std::nullopt;
  std::shared_lock lock(mu_);
  auto meta = read_file(dir_ / (std::string(hash) + ".meta.json"));
  if (!meta || !std::filesystem::exists(dir_ / std::string(hash))) return std::nullopt;
  const Json j = parse_json(*meta);
  return MediaInfo{std::string(hash), j.at("mime").get<std::string>(), j.at("size").get<std::uint64_t>()};
}

std::string_view to_string(ContentKind kind) {
  switch (kind) {
    case ContentKind::Text: return "text";
    case ContentKind::Image: return "image";
    case ContentKind::Video: return "video";
  }
  return "text";
}

std::string_view builtin_media_ref(ContentKind kind) {
  return kBuiltins[static_cast<std::size_t>(kind)].ref;
}

std::optional<std::string_view> builtin_media_bytes(std::string_view media_ref) {
  const auto* b = find_builtin(media_ref);
  if (b == nullptr) return std::nullopt;
  return embedded_resource(b->resource);
}

ResolvedMedia resolve_media(std::string_view ref, const MediaStore* store) {
  if (ref.starts_with("builtin:")) {
    const auto* b = find_builtin(ref);
    const auto bytes = builtin_media_bytes(ref);
    if (b == nullptr || !bytes) throw Error(Errc::unknown_media, "unknown built-in media '" + std::string(ref) + "'");
    return {std::string(ref), {sha256_hex(*bytes), std::string(b->mime), bytes->size()}, true};
  }
  std::string_view hash = ref;
  if (hash.starts_with("sha256:")) hash.remove_prefix(7);
  if (!is_content_hash(hash)) throw Error(Errc::unknown_media, "malformed media ref '" + std::string(ref) + "'");
  std::optional<MediaInfo> info = store != nullptr ? store->info(hash) : std::nullopt;
  if (!info) throw Error(Errc::unknown_media, "no media with hash " + std::string(hash));
  return {std::string(ref), *info, false};
}

Json to_json(const ContentDescriptor& d) {
  return {{"kind", to_string(d.kind)},
          {"mediaRef", d.media_ref},
          {"contentHash", d.content_hash},
          {"mime", d.mime},
          {"durationMs", d.duration_ms}};
}

ContentDescriptor content_step(ContentKind kind, std::string_view media_ref, int duration_ms,
                               const MediaStore* store) {
  if (duration_ms <= 0) throw Error(Errc::invalid_argument, "content: duration must be positive");
  const auto ref = media_ref.empty() ? builtin_media_ref(kind) : media_ref;
  const auto resolved = resolve_media(ref, store);
  if (!kind_accepts(kind, resolved.info.mime)) {
    throw Error(Errc::invalid_argument, "content: media type '" + resolved.info.mime + "' cannot be shown as " +
                                            std::string(to_string(kind)));
  }
  return {kind, std::string(ref), resolved.info.content_hash, resolved.info.mime, duration_ms};
}

}  // namespace stimforge::tasks
