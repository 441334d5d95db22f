#include "stimforge/common/json.hpp"

namespace stimforge {

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports the 1-based position of the offending byte.
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError("malformed JSON at byte " + std::to_string(offset) + ": " + e.what(), offset);
  }
}

ObjectReader::ObjectReader(const Json& object, std::string path)
    : object_(object), path_(std::move(path)) {
  if (!object_.is_object()) {
    throw Error(Errc::parse_error, path_ + ": expected an object");
  }
}

bool ObjectReader::has(std::string_view key) const {
  return object_.find(std::string(key)) != object_.end();
}

const Json& ObjectReader::at(std::string_view key) {
  auto it = object_.find(std::string(key));
  if (it == object_.end()) {
    throw Error(Errc::parse_error, path_ + ": missing field '" + std::string(key) + "'");
  }
  seen_.emplace(key);
  return *it;
}

void ObjectReader::finish() const {
  for (const auto& [key, value] : object_.items()) {
    if (!seen_.contains(key)) {
      throw Error(Errc::parse_error, path_ + ": unknown field '" + key + "'");
    }
  }
}

}  // namespace stimforge
