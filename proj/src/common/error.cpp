#include "stimforge/common/error.hpp"

namespace stimforge {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::out_of_range: return "out_of_range";
    case Errc::parse_error: return "parse_error";
    case Errc::version_error: return "version_error";
    case Errc::validation_error: return "validation_error";
    case Errc::singular_configuration: return "singular_configuration";
    case Errc::poor_quality: return "poor_quality";
    case Errc::alignment_impossible: return "alignment_impossible";
    case Errc::state_error: return "state_error";
    case Errc::unauthorized: return "unauthorized";
    case Errc::not_found: return "not_found";
    case Errc::conflict: return "conflict";
    case Errc::io_error: return "io_error";
    case Errc::sealed: return "sealed";
    case Errc::timestamp_regression: return "timestamp_regression";
    case Errc::unbalanced: return "unbalanced";
    case Errc::range_exhausted: return "range_exhausted";
    case Errc::unknown_media: return "unknown_media";
    case Errc::generation_failed: return "generation_failed";
    case Errc::duplicate: return "duplicate";
  }
  return "unknown";
}

}  // namespace stimforge
