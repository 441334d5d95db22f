#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace stimforge {

/// Data files compiled into the library, keyed by their path under data/.
std::optional<std::string_view> embedded_resource(std::string_view name);
std::vector<std::string_view> embedded_resource_names();

}  // namespace stimforge
