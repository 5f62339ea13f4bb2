#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xorshard/layout.hpp"

namespace xorshard {

// Exact non-negative fraction kept in lowest terms.
class Rational {
public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den);

  [[nodiscard]] std::int64_t num() const noexcept { return num_; }
  [[nodiscard]] std::int64_t den() const noexcept { return den_; }
  [[nodiscard]] std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Leakage seen by the coalition of every server except `excluded_server`.
struct CoalitionLeakage {
  int excluded_server = 0;
  int plain_parts_visible = 0;
  // Encrypted slots of the coalition not padded by any key of the excluded server.
  int unprotected_encrypted = 0;
  int leaked_parts = 0;
  int bound = 0;  // l
  bool pass = false;
  std::optional<double> mi_bits;  // exact I(F; M_S), entropy oracle only
};

struct AuditReport {
  std::vector<CoalitionLeakage> coalitions;
  bool key_single_use = false;
  // Entropy oracle only.
  std::optional<unsigned> part_bits;
  std::optional<double> file_entropy_bits;         // H(F)
  std::optional<double> decode_equivocation_bits;  // H(F | M_T)

  [[nodiscard]] bool passed() const noexcept;
  [[nodiscard]] double max_mi_bits() const;
};

inline constexpr double kEntropyTolerance = 1e-9;
// Largest (k + n_keys) * part_bits the oracle will enumerate.
inline constexpr unsigned kMaxOracleStateBits = 26;

[[nodiscard]] AuditReport structural_audit(const SharePlan& plan);

/// Enumerates every file and key vector with `part_bits`-bit parts and
/// computes I(F; M_S) for each (T-1)-coalition plus H(F | M_T), exactly up to
/// floating summation. Throws StateSpaceTooLarge past kMaxOracleStateBits.
[[nodiscard]] AuditReport entropy_oracle(const SharePlan& plan, unsigned part_bits);

// I(F; M_S) for an arbitrary server subset (bit t-1 of `servers` selects server t).
[[nodiscard]] double coalition_mutual_information(const SharePlan& plan, unsigned part_bits,
                                                  std::uint32_t servers);

struct RateReport {
  std::uint64_t lambda_bits = 0;  // largest share
  std::uint64_t rho_bits = 0;     // key material drawn by the encoder
  std::uint64_t h_f_bits = 0;
  std::uint64_t beta_bits = 0;
  Rational storage_ratio;     // lambda / (H(F) + beta)
  Rational randomness_ratio;  // rho / (H(F) + beta)
  Rational storage_bound;     // 1 - alpha
  Rational randomness_bound;  // max(0, T(1 - alpha) - 1)

  [[nodiscard]] bool storage_optimal() const { return storage_ratio == storage_bound; }
  [[nodiscard]] bool randomness_optimal() const { return randomness_ratio == randomness_bound; }
};

// original_len defaults to the padded size k * part_len.
[[nodiscard]] RateReport rate_report(const SharePlan& plan, std::uint64_t part_len,
                                     std::optional<std::uint64_t> original_len = std::nullopt);

[[nodiscard]] std::string format_audit_text(const AuditReport& report);
[[nodiscard]] std::string format_audit_kv(const AuditReport& report);
[[nodiscard]] std::string format_rates_text(const RateReport& report);
[[nodiscard]] std::string format_rates_kv(const RateReport& report);

}  // namespace xorshard
