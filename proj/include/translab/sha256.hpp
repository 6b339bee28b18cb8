#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace translab {

using Digest256 = std::array<std::uint8_t, 32>;

// Incremental SHA-256 (OpenSSL EVP underneath).
class Sha256 {
  public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::string_view bytes);
    Digest256 finish();

    static Digest256 digest(std::string_view bytes);
    static std::string hex_digest(std::string_view bytes);

  private:
    void* ctx_;
};

std::string digest_hex(const Digest256& d);

}  // namespace translab
