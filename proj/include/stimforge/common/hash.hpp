#pragma once

#include <string>
#include <string_view>
#include <utility>

namespace stimforge {

/// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

/// Incremental SHA-256 for streaming content (log seals).
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;
  Sha256(Sha256&& other) noexcept : ctx_(std::exchange(other.ctx_, nullptr)) {}
  Sha256& operator=(Sha256&& other) noexcept {
    std::swap(ctx_, other.ctx_);
    return *this;
  }

  void update(std::string_view bytes);
  /// Hex digest of everything fed so far; the hasher stays usable.
  std::string hex() const;

 private:
  void* ctx_;
};

}  // namespace stimforge
