#include "translab/sha256.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include "translab/bytes.hpp"

namespace translab {

Sha256::Sha256() {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("failed to initialize SHA-256 context");
    }
    ctx_ = ctx;
}

Sha256::~Sha256() { EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_)); }

void Sha256::update(std::string_view bytes) {
    if (EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), bytes.data(), bytes.size()) != 1) {
        throw std::runtime_error("SHA-256 update failed");
    }
}

Digest256 Sha256::finish() {
    Digest256 out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), out.data(), &len) != 1 || len != out.size()) {
        throw std::runtime_error("SHA-256 finalize failed");
    }
    return out;
}

Digest256 Sha256::digest(std::string_view bytes) {
    Sha256 h;
    h.update(bytes);
    return h.finish();
}

std::string Sha256::hex_digest(std::string_view bytes) { return digest_hex(digest(bytes)); }

std::string digest_hex(const Digest256& d) {
    return to_hex(std::string_view(reinterpret_cast<const char*>(d.data()), d.size()));
}

}  // namespace translab
