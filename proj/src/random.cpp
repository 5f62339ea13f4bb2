#include "xorshard/random.hpp"

#include <sodium.h>

#include "xorshard/error.hpp"

namespace xorshard {

namespace {

void ensure_sodium() {
  if (sodium_init() < 0) {
    throw Error(ErrorKind::RandomnessFailure, "libsodium initialisation failed");
  }
}

}  // namespace

SystemRandom::SystemRandom() { ensure_sodium(); }

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (!out.empty()) randombytes_buf(out.data(), out.size());
}

SeededRandom::SeededRandom(std::uint64_t seed) {
  ensure_sodium();
  std::array<std::uint8_t, 8> le{};
  for (int b = 0; b < 8; ++b) le[b] = static_cast<std::uint8_t>(seed >> (8 * b));
  crypto_hash_sha256(key_.data(), le.data(), le.size());
}

void SeededRandom::fill(std::span<std::uint8_t> out) {
  // A fresh nonce per call keeps successive fills independent.
  std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
  for (std::size_t b = 0; b < nonce.size(); ++b) nonce[b] = static_cast<std::uint8_t>(nonce_ >> (8 * b));
  ++nonce_;
  if (out.empty()) return;
  if (crypto_stream_chacha20(out.data(), out.size(), nonce.data(), key_.data()) != 0) {
    throw Error(ErrorKind::RandomnessFailure, "chacha20 keystream generation failed");
  }
}

}  // namespace xorshard
