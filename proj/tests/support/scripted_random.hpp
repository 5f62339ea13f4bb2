#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "xorshard/error.hpp"
#include "xorshard/random.hpp"

namespace xorshard::testing {

// Replays a fixed byte string; zeros once exhausted.
class ScriptedRandom final : public RandomSource {
public:
  explicit ScriptedRandom(std::vector<std::uint8_t> bytes = {}) : bytes_(std::move(bytes)) {}

  void fill(std::span<std::uint8_t> out) override {
    for (auto& b : out) b = pos_ < bytes_.size() ? bytes_[pos_++] : 0;
  }

private:
  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

class FailingRandom final : public RandomSource {
public:
  void fill(std::span<std::uint8_t>) override {
    throw Error(ErrorKind::RandomnessFailure, "entropy source unavailable");
  }
};

}  // namespace xorshard::testing
