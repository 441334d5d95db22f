#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stimforge/common/hash.hpp"
#include "stimforge/eventlog/entry.hpp"

namespace stimforge::eventlog {

inline constexpr std::string_view kLogSchemaVersion = "stimforge.log/1";

struct LogHeader {
  std::string session_id;
  std::string flow_hash;
  std::string schema_version{kLogSchemaVersion};
  std::int64_t start_utc_ms = 0;
  /// "utc-epoch-ms" for live sessions, "virtual" for headless runs.
  std::string clock_basis = "utc-epoch-ms";
  bool operator==(const LogHeader&) const = default;
};

Json to_json(const LogHeader& header);
LogHeader header_from_json(const Json& json);

struct LogSeal {
  std::uint64_t entry_count = 0;
  /// SHA-256 over the raw bytes of the header line and every entry line,
  /// newlines included.
  std::string content_hash;
  bool operator==(const LogSeal&) const = default;
};

/// Canonical seal line without the newline.
std::string encode_seal(const LogSeal& seal);

/// Append-only `.session.jsonl` writer.
///
/// Each append reaches the kernel with a single write() before returning,
/// so a crashed process loses nothing it acknowledged. fsync runs at seal
/// and, with `fsync_each_append`, after every entry.
class SessionLogWriter {
 public:
  struct Options {
    bool fsync_each_append = false;
  };

  /// Creates a new log; throws conflict if the file exists.
  static SessionLogWriter create(const std::filesystem::path& path, const LogHeader& header, Options options);
  static SessionLogWriter create(const std::filesystem::path& path, const LogHeader& header) {
    return create(path, header, Options{});
  }

  /// Reopens an unsealed log after a crash, cutting any partial final line.
  /// Throws sealed for a sealed log.
  static SessionLogWriter reopen(const std::filesystem::path& path, Options options);
  static SessionLogWriter reopen(const std::filesystem::path& path) { return reopen(path, Options{}); }

  SessionLogWriter(SessionLogWriter&& other) noexcept;
  SessionLogWriter& operator=(SessionLogWriter&& other) noexcept;
  SessionLogWriter(const SessionLogWriter&) = delete;
  SessionLogWriter& operator=(const SessionLogWriter&) = delete;
  ~SessionLogWriter();

  /// Throws sealed after seal(), timestamp_regression if the entry is older
  /// than the previous one.
  void append(const LogEntry& entry);

  LogSeal seal();

  bool sealed() const { return sealed_; }
  std::uint64_t entry_count() const { return count_; }
  std::optional<std::int64_t> last_timestamp() const { return last_ts_; }
  const LogHeader& header() const { return header_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  SessionLogWriter() = default;
  void write_line(const std::string& line);

  std::filesystem::path path_;
  int fd_ = -1;
  Options options_;
  LogHeader header_;
  Sha256 hash_;
  std::uint64_t count_ = 0;
  std::optional<std::int64_t> last_ts_;
  bool sealed_ = false;
};

struct SessionLog {
  LogHeader header;
  std::vector<LogEntry> entries;
  std::optional<LogSeal> seal;
  /// Hash recomputed over the bytes actually read.
  std::string computed_hash;
  /// Bytes of an incomplete final line that were ignored.
  std::size_t trailing_partial_bytes = 0;

  /// True when sealed and both the count and the hash match.
  bool seal_valid() const;
};

/// Parses a log. Lines after a seal, or a malformed complete line, are
/// parse errors; an incomplete final line (no newline) is skipped and
/// reported in trailing_partial_bytes.
SessionLog parse_session_log(std::string_view text);
SessionLog read_session_log(const std::filesystem::path& path);

/// Full log text for an in-memory run, sealed when `seal` is set.
std::string render_session_log(const LogHeader& header, const std::vector<LogEntry>& entries, bool seal);

}  // namespace stimforge::eventlog
