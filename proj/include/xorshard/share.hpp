#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "xorshard/params.hpp"

namespace xorshard {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

/// Metadata stored in front of every share. The on-disk layout lives in
/// shareio; this is its in-memory form.
struct ShareHeader {
  std::uint8_t version = 1;
  std::uint8_t servers = 0;       // T
  std::uint8_t server_index = 0;  // 1..T
  std::uint16_t l = 0;
  std::uint16_t k = 1;
  CaseTag case_tag = CaseTag::Case1;
  std::uint64_t part_len = 0;      // bytes per slot
  std::uint64_t original_len = 0;  // file length before padding
  std::uint16_t slot_count = 0;
  Digest digest{};  // filled in by serialize_share

  friend bool operator==(const ShareHeader&, const ShareHeader&) = default;
};

// One server's share: slot payloads concatenated in slot order.
struct ShareBlob {
  ShareHeader header;
  Bytes payload;

  [[nodiscard]] int server_index() const noexcept { return header.server_index; }
  [[nodiscard]] std::span<const std::uint8_t> slot(std::size_t index) const {
    const auto len = static_cast<std::size_t>(header.part_len);
    return std::span<const std::uint8_t>(payload).subspan(index * len, len);
  }

  friend bool operator==(const ShareBlob&, const ShareBlob&) = default;
};

}  // namespace xorshard
