#include "biphoton/hash.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <vector>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

struct DigestCtx {
  EVP_MD_CTX* ctx;
  DigestCtx() : ctx(EVP_MD_CTX_new()) {
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
      throw DataError("sha256: context initialization failed");
  }
  ~DigestCtx() { EVP_MD_CTX_free(ctx); }

  std::string finish() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, md.data(), &len) != 1)
      throw DataError("sha256: finalization failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(hex[md[i] >> 4]);
      out.push_back(hex[md[i] & 0xf]);
    }
    return out;
  }
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  DigestCtx d;
  if (EVP_DigestUpdate(d.ctx, bytes.data(), bytes.size()) != 1)
    throw DataError("sha256: update failed");
  return d.finish();
}

std::string sha256_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open for hashing");
  DigestCtx d;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const std::streamsize got = in.gcount();
    if (got > 0 && EVP_DigestUpdate(d.ctx, buf.data(), static_cast<std::size_t>(got)) != 1)
      throw DataError("sha256: update failed");
  }
  return d.finish();
}

}  // namespace biphoton
