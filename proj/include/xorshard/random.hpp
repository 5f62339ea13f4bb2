#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace xorshard {

// Source of the encoder's local randomness.
class RandomSource {
public:
  virtual ~RandomSource() = default;
  // Fills `out` with uniform bytes; throws Error(RandomnessFailure) on failure.
  virtual void fill(std::span<std::uint8_t> out) = 0;
};

// Operating-system CSPRNG (libsodium randombytes).
class SystemRandom final : public RandomSource {
public:
  SystemRandom();
  void fill(std::span<std::uint8_t> out) override;
};

// Deterministic ChaCha20 stream keyed from a 64-bit seed.
// Test mode only: two encodes with the same seed reuse the same pads.
class SeededRandom final : public RandomSource {
public:
  explicit SeededRandom(std::uint64_t seed);
  void fill(std::span<std::uint8_t> out) override;

private:
  std::array<std::uint8_t, 32> key_{};
  std::uint64_t nonce_ = 0;
};

}  // namespace xorshard
