#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stimforge {

/// Machine-readable failure categories. The CLI prints these names on stderr.
enum class Errc {
  invalid_argument,
  out_of_range,
  parse_error,
  version_error,
  validation_error,
  singular_configuration,
  poor_quality,
  alignment_impossible,
  state_error,
  unauthorized,
  not_found,
  conflict,
  io_error,
  sealed,
  timestamp_regression,
  unbalanced,
  range_exhausted,
  unknown_media,
  generation_failed,
  duplicate,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Syntax failure with the byte offset at which the parser gave up.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(Errc::parse_error, message), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace stimforge
