#pragma once

#include <json.hpp>

#include <set>
#include <string>
#include <string_view>
#include <type_traits>

#include "stimforge/common/error.hpp"

namespace stimforge {

using Json = nlohmann::json;

/// Parses text, mapping nlohmann failures to ParseError with a byte offset.
Json parse_json(std::string_view text);

/// Strict field access over a JSON object. Every key must be consumed
/// before finish() or the object is rejected as carrying unknown fields.
class ObjectReader {
 public:
  ObjectReader(const Json& object, std::string path);
  /// The reader keeps a reference; a temporary would dangle.
  ObjectReader(Json&&, std::string) = delete;

  bool has(std::string_view key) const;

  const Json& at(std::string_view key);

  template <typename T>
  T get(std::string_view key) {
    const Json& v = at(key);
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) {
        throw Error(Errc::parse_error, path_ + "." + std::string(key) + ": expected an integer");
      }
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned()) {
          throw Error(Errc::parse_error, path_ + "." + std::string(key) + ": expected a non-negative integer");
        }
      }
    }
    try {
      return v.get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error(Errc::parse_error, path_ + "." + std::string(key) + ": unexpected type");
    }
  }

  template <typename T>
  T get_or(std::string_view key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  /// Rejects any key that was never read.
  void finish() const;

  const std::string& path() const { return path_; }

 private:
  const Json& object_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

}  // namespace stimforge
