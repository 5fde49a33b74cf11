#include "manet/digest.hpp"

#include <memory>
#include <stdexcept>

#include <openssl/evp.h>

namespace manet {

namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

struct MdDeleter {
  void operator()(EVP_MD* md) const { EVP_MD_free(md); }
};

// OpenSSL 3 resolves EVP_sha256() through the provider registry on every
// init, which dominates the cost of hashing short messages. The algorithm
// is fetched once and each thread keeps one context.
const EVP_MD* sha256_md() {
  static const std::unique_ptr<EVP_MD, MdDeleter> md(EVP_MD_fetch(nullptr, "SHA256", nullptr));
  if (!md) {
    throw std::runtime_error("sha256: EVP fetch failed");
  }
  return md.get();
}

class Sha256Ctx {
public:
  Sha256Ctx() {
    thread_local const std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> shared(EVP_MD_CTX_new());
    ctx_ = shared.get();
    if (!ctx_ || EVP_DigestInit_ex(ctx_, sha256_md(), nullptr) != 1) {
      throw std::runtime_error("sha256: EVP init failed");
    }
  }
  Sha256Ctx(const Sha256Ctx&) = delete;
  Sha256Ctx& operator=(const Sha256Ctx&) = delete;

  void update(std::span<const std::uint8_t> data) {
    if (!data.empty() && EVP_DigestUpdate(ctx_, data.data(), data.size()) != 1) {
      throw std::runtime_error("sha256: EVP update failed");
    }
  }
  Digest finish() {
    Digest out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, out.data(), &len) != 1 || len != out.size()) {
      throw std::runtime_error("sha256: EVP final failed");
    }
    return out;
  }

private:
  EVP_MD_CTX* ctx_ = nullptr;
};

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

} // namespace

Digest sha256(std::span<const std::uint8_t> data) {
  Sha256Ctx ctx;
  ctx.update(data);
  return ctx.finish();
}

Digest sha256(std::string_view text) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Digest keyed_tag(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message) {
  Sha256Ctx ctx;
  ctx.update(key);
  ctx.update(message);
  ctx.update(key);
  return ctx.finish();
}

std::string to_hex(const Digest& d) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (auto b : d) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 0xF]);
  }
  return s;
}

Digest digest_from_hex(std::string_view hex) {
  if (hex.size() != 64) {
    throw std::invalid_argument("digest hex must be 64 characters");
  }
  Digest d{};
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw std::invalid_argument("digest hex has a non-hex character");
    }
    d[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return d;
}

} // namespace manet
