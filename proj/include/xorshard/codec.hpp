#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xorshard/layout.hpp"
#include "xorshard/random.hpp"
#include "xorshard/share.hpp"

namespace xorshard {

// File split into k equal parts after zero padding.
struct PaddedFile {
  std::vector<Bytes> parts;
  std::uint64_t original_len = 0;
  std::uint64_t beta = 0;  // zero bytes appended

  [[nodiscard]] std::uint64_t part_len() const noexcept {
    return parts.empty() ? 0 : parts.front().size();
  }
};

struct KeyPool {
  std::vector<Bytes> keys;  // keys[i - 1] is K_i

  [[nodiscard]] const Bytes& key(int index) const { return keys.at(index - 1); }
};

// Appends (k - |data| mod k) mod k zero bytes and cuts into k parts.
[[nodiscard]] PaddedFile pad(std::span<const std::uint8_t> data, int k);

// n_keys part-sized keys read from `rng` as consecutive blocks, K_1 first.
[[nodiscard]] KeyPool generate_keys(const SchemeParams& params, std::uint64_t part_len,
                                    RandomSource& rng);

// Materialises the plan for a given file and key pool. Shares come back in
// server order with headers filled in, digests left zero.
[[nodiscard]] std::vector<ShareBlob> materialize(const PaddedFile& file, const KeyPool& keys,
                                                 const SharePlan& plan);

[[nodiscard]] std::vector<ShareBlob> encode(std::span<const std::uint8_t> data,
                                            const SharePlan& plan, RandomSource& rng);

/// Reconstructs the file from all T shares (any order). Throws MissingShare,
/// HeaderMismatch or PayloadLengthMismatch on inconsistent input.
[[nodiscard]] Bytes decode(std::span<const ShareBlob> shares, const SharePlan& plan);

// Header fields every share of one encode job has in common.
[[nodiscard]] ShareHeader make_header(const SchemeParams& params, int server,
                                      std::uint64_t part_len, std::uint64_t original_len,
                                      std::size_t slot_count);

}  // namespace xorshard
