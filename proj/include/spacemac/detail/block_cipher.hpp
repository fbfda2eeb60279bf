#pragma once

// RAII wrapper over the system AES-128 in ECB mode (OpenSSL EVP, no
// padding). One object per key; ECB is stateless across blocks so a
// context can be reused for any number of single-block or batched calls.

#include <openssl/evp.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace spacemac::detail {

using Block16 = std::array<std::uint8_t, 16>;
using Key16 = std::array<std::uint8_t, 16>;

class Aes128 {
 public:
  explicit Aes128(const Key16& key) : ctx_(EVP_CIPHER_CTX_new()) {
    if (ctx_ == nullptr ||
        EVP_EncryptInit_ex(ctx_, EVP_aes_128_ecb(), nullptr, key.data(),
                           nullptr) != 1) {
      EVP_CIPHER_CTX_free(ctx_);
      throw std::runtime_error("Aes128: cipher init failed");
    }
    EVP_CIPHER_CTX_set_padding(ctx_, 0);
  }

  Aes128(Aes128&& other) noexcept : ctx_(other.ctx_) { other.ctx_ = nullptr; }
  Aes128& operator=(Aes128&& other) noexcept {
    if (this != &other) {
      EVP_CIPHER_CTX_free(ctx_);
      ctx_ = other.ctx_;
      other.ctx_ = nullptr;
    }
    return *this;
  }
  Aes128(const Aes128&) = delete;
  Aes128& operator=(const Aes128&) = delete;
  ~Aes128() { EVP_CIPHER_CTX_free(ctx_); }

  // in and out are nblocks*16 bytes; may not alias.
  void encrypt_blocks(const std::uint8_t* in, std::uint8_t* out,
                      std::size_t nblocks) {
    int outl = 0;
    if (EVP_EncryptUpdate(ctx_, out, &outl, in,
                          static_cast<int>(nblocks * 16)) != 1 ||
        outl != static_cast<int>(nblocks * 16))
      throw std::runtime_error("Aes128: encrypt failed");
  }

  Block16 encrypt_block(const Block16& in) {
    Block16 out{};
    encrypt_blocks(in.data(), out.data(), 1);
    return out;
  }

 private:
  EVP_CIPHER_CTX* ctx_;
};

}  // namespace spacemac::detail
