#include "stimforge/eventlog/session_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "stimforge/common/error.hpp"
#include "stimforge/common/fs.hpp"

namespace stimforge::eventlog {
namespace {

[[noreturn]] void io_fail(const std::string& what, const std::filesystem::path& path) {
  throw Error(Errc::io_error, what + " " + path.string() + ": " + std::strerror(errno));
}

bool is_seal_line(const Json& j) { return j.is_object() && j.contains("seal"); }

LogSeal seal_from_json(const Json& j) {
  ObjectReader outer(j, "log");
  ObjectReader r(outer.at("seal"), "log.seal");
  LogSeal s;
  s.entry_count = r.get<std::uint64_t>("entry_count");
  s.content_hash = r.get<std::string>("content_hash");
  r.finish();
  outer.finish();
  return s;
}

}  // namespace

Json to_json(const LogHeader& h) {
  return {{"session_id", h.session_id},
          {"flow_hash", h.flow_hash},
          {"schema_version", h.schema_version},
          {"start_utc_ms", h.start_utc_ms},
          {"clock_basis", h.clock_basis}};
}

LogHeader header_from_json(const Json& json) {
  ObjectReader r(json, "header");
  LogHeader h;
  h.schema_version = r.get<std::string>("schema_version");
  if (h.schema_version != kLogSchemaVersion) {
    throw Error(Errc::version_error, "log: unsupported schema_version '" + h.schema_version + "'");
  }
  h.session_id = r.get<std::string>("session_id");
  h.flow_hash = r.get<std::string>("flow_hash");
  h.start_utc_ms = r.get<std::int64_t>("start_utc_ms");
  h.clock_basis = r.get<std::string>("clock_basis");
  r.finish();
  return h;
}

std::string encode_seal(const LogSeal& s) {
  return Json{{"seal", {{"entry_count", s.entry_count}, {"content_hash", s.content_hash}}}}.dump();
}

SessionLogWriter SessionLogWriter::create(const std::filesystem::path& path, const LogHeader& header,
                                          Options options) {
  SessionLogWriter w;
  w.path_ = path;
  w.options_ = options;
  w.header_ = header;
  w.fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_APPEND | O_CLOEXEC, 0644);
  if (w.fd_ < 0) {
    if (errno == EEXIST) throw Error(Errc::conflict, "log already exists: " + path.string());
    io_fail("cannot create", path);
  }
  w.write_line(to_json(header).dump());
  if (::fsync(w.fd_) != 0) io_fail("cannot flush", path);
  return w;
}

SessionLogWriter SessionLogWriter::reopen(const std::filesystem::path& path, Options options) {
  const auto text = read_file_or_throw(path);
  const auto log = parse_session_log(text);
  if (log.seal) throw Error(Errc::sealed, "log is sealed: " + path.string());
  const auto keep = text.size() - log.trailing_partial_bytes;
  if (log.trailing_partial_bytes > 0) std::filesystem::resize_file(path, keep);

  SessionLogWriter w;
  w.path_ = path;
  w.options_ = options;
  w.header_ = log.header;
  w.hash_.update(std::string_view(text).substr(0, keep));
  w.count_ = log.entries.size();
  if (!log.entries.empty()) w.last_ts_ = log.entries.back().timestamp;
  w.fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
  if (w.fd_ < 0) io_fail("cannot open", path);
  return w;
}

SessionLogWriter::SessionLogWriter(SessionLogWriter&& o) noexcept { *this = std::move(o); }

SessionLogWriter& SessionLogWriter::operator=(SessionLogWriter&& o) noexcept {
  if (this == &o) return *this;
  if (fd_ >= 0) ::close(fd_);
  path_ = std::move(o.path_);
  fd_ = std::exchange(o.fd_, -1);
  options_ = o.options_;
  header_ = std::move(o.header_);
  hash_ = std::move(o.hash_);
  count_ = o.count_;
  last_ts_ = o.last_ts_;
  sealed_ = o.sealed_;
  return *this;
}

SessionLogWriter::~SessionLogWriter() {
  if (fd_ >= 0) ::close(fd_);
}

void SessionLogWriter::write_line(const std::string& body) {
  const std::string line = body + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    const auto n = ::write(fd_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("cannot append to", path_);
    }
    off += static_cast<std::size_t>(n);
  }
  hash_.update(line);
}

void SessionLogWriter::append(const LogEntry& entry) {
  if (sealed_) throw Error(Errc::sealed, "log is sealed");
  if (fd_ < 0) throw Error(Errc::state_error, "log writer is closed");
  if (last_ts_ && entry.timestamp < *last_ts_) {
    throw Error(Errc::timestamp_regression, "timestamp " + std::to_string(entry.timestamp) + " precedes " +
                                                std::to_string(*last_ts_));
  }
  write_line(encode_entry(entry));
  if (options_.fsync_each_append && ::fsync(fd_) != 0) io_fail("cannot flush", path_);
  ++count_;
  last_ts_ = entry.timestamp;
}

LogSeal SessionLogWriter::seal() {
  if (sealed_) throw Error(Errc::sealed, "log is already sealed");
  LogSeal s{count_, hash_.hex()};
  const std::string line = encode_seal(s) + "\n";
  if (::write(fd_, line.data(), line.size()) != static_cast<ssize_t>(line.size()) || ::fsync(fd_) != 0) {
    io_fail("cannot seal", path_);
  }
  sealed_ = true;
  return s;
}

bool SessionLog::seal_valid() const {
  return seal && seal->entry_count == entries.size() && seal->content_hash == computed_hash;
}

SessionLog parse_session_log(std::string_view text) {
  SessionLog log;
  Sha256 hash;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool have_header = false;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      log.trailing_partial_bytes = text.size() - pos;
      break;
    }
    const auto line = text.substr(pos, nl - pos);
    ++line_no;
    if (log.seal) throw ParseError("log: content after seal at line " + std::to_string(line_no), pos);
    Json j;
    try {
      j = parse_json(line);
    } catch (const ParseError& e) {
      throw ParseError("log line " + std::to_string(line_no) + ": " + e.what(), pos + e.offset());
    }
    if (!have_header) {
      log.header = header_from_json(j);
      have_header = true;
      hash.update(text.substr(pos, nl + 1 - pos));
    } else if (is_seal_line(j)) {
      log.seal = seal_from_json(j);
      if (encode_seal(*log.seal) != line) throw ParseError("log: seal line is not canonical", pos);
    } else {
      try {
        log.entries.push_back(entry_from_json(j));
      } catch (const Error& e) {
        throw ParseError("log line " + std::to_string(line_no) + ": " + e.what(), pos);
      }
      hash.update(text.substr(pos, nl + 1 - pos));
    }
    pos = nl + 1;
  }
  if (!have_header) throw ParseError("log: missing header line", 0);
  log.computed_hash = hash.hex();
  return log;
}

SessionLog read_session_log(const std::filesystem::path& path) { return parse_session_log(read_file_or_throw(path)); }

std::string render_session_log(const LogHeader& header, const std::vector<LogEntry>& entries, bool seal) {
  std::string out = to_json(header).dump() + "\n";
  for (const auto& e : entries) out += encode_entry(e) + "\n";
  if (seal) out += encode_seal({entries.size(), sha256_hex(out)}) + "\n";
  return out;
}

}  // namespace stimforge::eventlog
