#pragma once

#include <cstdint>
#include <string_view>

namespace xorshard {

// Leakage budget alpha = l / k in lowest terms; alpha = 0 is (0, 1).
struct PrivacyBudget {
  int l = 0;
  int k = 1;

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;
};

enum class CaseTag : std::uint8_t {
  Case1 = 1,               // r + v <  T
  Case2 = 2,               // r + v >= T
  PlainSplitFallback = 3,  // qT + r >= k, alpha < 1 - 1/T
  TrivialSplit = 4,        // alpha >= 1 - 1/T
};

[[nodiscard]] std::string_view to_string(CaseTag tag) noexcept;
[[nodiscard]] bool is_keyed(CaseTag tag) noexcept;

// Largest values the share header can represent.
inline constexpr int kMaxServers = 255;
inline constexpr int kMaxParts = 65535;

/// Every integer governing the share layout, derived from (T, l, k) alone.
///
/// l = q(T-1) + r with r in [0, T-2], and T(k-l) - k = uT + v with v in
/// [0, T-1]. For the keyed cases x = k - l - q - 1 - u is the number of
/// encrypted slots held by a "regular" server; the fallback cases carry
/// x = 0 and no keys.
struct SchemeParams {
  int T = 0;
  int l = 0;
  int k = 1;
  int q = 0;
  int r = 0;
  int u = 0;
  int v = 0;
  int x = 0;
  int n_keys = 0;
  int n_plain = 0;
  int n_encrypted = 0;
  CaseTag case_tag = CaseTag::Case1;

  [[nodiscard]] PrivacyBudget budget() const noexcept { return {l, k}; }
  // Slots per share in the keyed cases.
  [[nodiscard]] int slots_per_share() const noexcept { return k - l; }

  friend bool operator==(const SchemeParams&, const SchemeParams&) = default;
};

/// Reduces l_raw / k_raw to lowest terms. Throws InvalidArgument when
/// k_raw < 1, l_raw < 0 or l_raw > k_raw.
[[nodiscard]] PrivacyBudget normalize_alpha(std::int64_t l_raw, std::int64_t k_raw);

/// Parses "l/k" (or a bare "0") into a normalized budget.
[[nodiscard]] PrivacyBudget parse_alpha(std::string_view text);

// True when l/k >= 1 - 1/T, i.e. splitting the file in clear already meets
// the leakage budget.
[[nodiscard]] bool is_trivially_private(int T, PrivacyBudget budget) noexcept;

[[nodiscard]] SchemeParams derive_params(int T, PrivacyBudget budget);

}  // namespace xorshard
