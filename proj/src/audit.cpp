#include "xorshard/audit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "xorshard/error.hpp"

namespace xorshard {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num < 0) throw Error(ErrorKind::InvalidArgument, "rational must be non-negative with den > 0");
  const std::int64_t g = std::gcd(num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

bool AuditReport::passed() const noexcept {
  if (!key_single_use) return false;
  for (const auto& c : coalitions) {
    if (!c.pass) return false;
  }
  if (decode_equivocation_bits && *decode_equivocation_bits > kEntropyTolerance) return false;
  return true;
}

double AuditReport::max_mi_bits() const {
  double worst = 0.0;
  for (const auto& c : coalitions) worst = std::max(worst, c.mi_bits.value_or(0.0));
  return worst;
}

AuditReport structural_audit(const SharePlan& plan) {
  const SchemeParams& p = plan.params;
  AuditReport report;

  std::vector<int> uses(p.n_keys + 1, 0);
  bool single_use = true;
  for (const auto& share : plan.slots) {
    for (const auto& slot : share) {
      if (const auto* enc = std::get_if<EncryptedSlot>(&slot)) {
        for (int key : enc->keys) {
          if (key < 1 || key > p.n_keys || ++uses[key] > 1) single_use = false;
        }
      }
    }
  }
  report.key_single_use = single_use;

  const int servers = static_cast<int>(plan.slots.size());
  for (int t = 1; t <= servers; ++t) {
    const auto& own = plan.key_ownership.at(t - 1);
    CoalitionLeakage c;
    c.excluded_server = t;
    c.bound = p.l;
    for (int member = 1; member <= servers; ++member) {
      if (member == t) continue;
      for (const auto& slot : plan.slots[member - 1]) {
        if (std::holds_alternative<PlainSlot>(slot)) {
          ++c.plain_parts_visible;
        } else if (const auto* enc = std::get_if<EncryptedSlot>(&slot)) {
          const bool protected_by_t = std::any_of(enc->keys.begin(), enc->keys.end(), [&](int key) {
            return std::binary_search(own.begin(), own.end(), key);
          });
          if (!protected_by_t) ++c.unprotected_encrypted;
        }
      }
    }
    c.leaked_parts = c.plain_parts_visible + c.unprotected_encrypted;
    c.pass = c.leaked_parts <= c.bound;
    report.coalitions.push_back(c);
  }
  return report;
}

namespace {

// Shannon entropy in bits of the empirical distribution of a sorted range,
// every sample carrying equal weight.
template <typename It>
long double sorted_entropy(It first, It last) {
  const auto n = static_cast<long double>(std::distance(first, last));
  if (n == 0) return 0;
  long double acc = 0;
  while (first != last) {
    It run_end = std::upper_bound(first, last, *first);
    const auto c = static_cast<long double>(std::distance(first, run_end));
    acc += c * std::log2(c);
    first = run_end;
  }
  return std::log2(n) - acc / n;
}

struct StateSpace {
  unsigned part_bits;
  unsigned file_bits;
  unsigned key_bits;
};

StateSpace state_space(const SharePlan& plan, unsigned part_bits) {
  const SchemeParams& p = plan.params;
  if (part_bits < 1) throw Error(ErrorKind::InvalidArgument, "part_bits must be >= 1");
  const std::uint64_t total = static_cast<std::uint64_t>(p.k + p.n_keys) * part_bits;
  if (total > kMaxOracleStateBits) {
    throw Error(ErrorKind::StateSpaceTooLarge,
                "entropy oracle needs 2^" + std::to_string(total) + " states, limit is 2^" +
                    std::to_string(kMaxOracleStateBits));
  }
  return {part_bits, p.k * part_bits, p.n_keys * part_bits};
}

// Symbol value of every slot of the selected servers, packed into one word,
// for each (file, key vector) state. Index = file << key_bits | keys.
std::vector<std::uint32_t> subset_samples(const SharePlan& plan, const StateSpace& space,
                                          std::uint32_t servers) {
  struct Term {
    int part;
    std::vector<int> keys;
  };
  std::vector<Term> terms;
  for (std::size_t t = 0; t < plan.slots.size(); ++t) {
    if (!((servers >> t) & 1u)) continue;
    for (const auto& slot : plan.slots[t]) {
      if (const auto* plain = std::get_if<PlainSlot>(&slot)) {
        terms.push_back({plain->part, {}});
      } else if (const auto* key = std::get_if<KeySlot>(&slot)) {
        terms.push_back({0, {key->key}});
      } else if (const auto* enc = std::get_if<EncryptedSlot>(&slot)) {
        terms.push_back({enc->part, enc->keys});
      } else {
        throw Error(ErrorKind::ConstructionBug, "plan has an unassigned slot");
      }
    }
  }
  if (terms.size() * space.part_bits > 32) {
    throw Error(ErrorKind::StateSpaceTooLarge, "coalition view does not fit in 32 bits");
  }

  const std::uint32_t mask = (1u << space.part_bits) - 1u;
  const std::uint64_t files = 1ull << space.file_bits;
  const std::uint64_t key_vectors = 1ull << space.key_bits;
  const int n_keys = plan.params.n_keys;
  const int k = plan.params.k;

  std::vector<std::uint32_t> samples(files * key_vectors);
  std::vector<std::uint32_t> part_val(k + 1, 0);
  std::vector<std::uint32_t> key_val(n_keys + 1, 0);
  std::size_t out = 0;
  for (std::uint64_t f = 0; f < files; ++f) {
    for (int j = 1; j <= k; ++j) part_val[j] = static_cast<std::uint32_t>(f >> ((j - 1) * space.part_bits)) & mask;
    for (std::uint64_t kv = 0; kv < key_vectors; ++kv) {
      for (int i = 1; i <= n_keys; ++i) {
        key_val[i] = static_cast<std::uint32_t>(kv >> ((i - 1) * space.part_bits)) & mask;
      }
      std::uint32_t word = 0;
      unsigned shift = 0;
      for (const auto& term : terms) {
        std::uint32_t sym = term.part ? part_val[term.part] : 0u;
        for (int key : term.keys) sym ^= key_val[key];
        word |= sym << shift;
        shift += space.part_bits;
      }
      samples[out++] = word;
    }
  }
  return samples;
}

double mutual_information(const SharePlan& plan, const StateSpace& space, std::uint32_t servers) {
  std::vector<std::uint32_t> samples = subset_samples(plan, space, servers);
  const std::size_t block = std::size_t{1} << space.key_bits;
  const std::size_t files = std::size_t{1} << space.file_bits;

  // H(M_S | F): F is uniform, so average the per-file entropies.
  long double conditional = 0;
  for (std::size_t f = 0; f < files; ++f) {
    auto first = samples.begin() + static_cast<std::ptrdiff_t>(f * block);
    auto last = first + static_cast<std::ptrdiff_t>(block);
    std::sort(first, last);
    conditional += sorted_entropy(first, last);
  }
  conditional /= static_cast<long double>(files);

  std::sort(samples.begin(), samples.end());
  const long double marginal = sorted_entropy(samples.begin(), samples.end());
  return static_cast<double>(marginal - conditional);
}

// H(F | M_S) = H(F, M_S) - H(M_S).
double equivocation(const SharePlan& plan, const StateSpace& space, std::uint32_t servers) {
  const std::vector<std::uint32_t> samples = subset_samples(plan, space, servers);
  std::vector<std::uint64_t> joint(samples.size());
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const std::uint64_t f = n >> space.key_bits;
    joint[n] = (static_cast<std::uint64_t>(samples[n]) << space.file_bits) | f;
  }
  std::sort(joint.begin(), joint.end());
  std::vector<std::uint32_t> view = samples;
  std::sort(view.begin(), view.end());
  return static_cast<double>(sorted_entropy(joint.begin(), joint.end()) -
                             sorted_entropy(view.begin(), view.end()));
}

std::uint32_t all_servers(const SharePlan& plan) {
  const auto n = plan.slots.size();
  return n >= 32 ? ~0u : (1u << n) - 1u;
}

}  // namespace

double coalition_mutual_information(const SharePlan& plan, unsigned part_bits, std::uint32_t servers) {
  return mutual_information(plan, state_space(plan, part_bits), servers);
}

AuditReport entropy_oracle(const SharePlan& plan, unsigned part_bits) {
  const StateSpace space = state_space(plan, part_bits);
  if (plan.slots.size() > 31) throw Error(ErrorKind::StateSpaceTooLarge, "too many servers for the oracle");
  AuditReport report = structural_audit(plan);
  report.part_bits = part_bits;
  report.file_entropy_bits = static_cast<double>(space.file_bits);
  const std::uint32_t everyone = all_servers(plan);
  const double bound_bits = static_cast<double>(plan.params.l) * part_bits;
  for (auto& c : report.coalitions) {
    const double mi = mutual_information(plan, space, everyone & ~(1u << (c.excluded_server - 1)));
    c.mi_bits = mi;
    c.pass = c.pass && mi <= bound_bits + kEntropyTolerance;
  }
  report.decode_equivocation_bits = equivocation(plan, space, everyone);
  return report;
}

RateReport rate_report(const SharePlan& plan, std::uint64_t part_len, std::optional<std::uint64_t> original_len) {
  const SchemeParams& p = plan.params;
  if (part_len < 1) throw Error(ErrorKind::InvalidArgument, "rates need part_len >= 1");
  const std::uint64_t padded_bits = static_cast<std::uint64_t>(p.k) * part_len * 8;
  const std::uint64_t original_bytes = original_len.value_or(static_cast<std::uint64_t>(p.k) * part_len);
  if (original_bytes * 8 > padded_bits) {
    throw Error(ErrorKind::InvalidArgument, "original length exceeds k * part_len");
  }
  std::size_t widest = 0;
  for (const auto& share : plan.slots) widest = std::max(widest, share.size());

  RateReport r;
  r.lambda_bits = widest * part_len * 8;
  r.rho_bits = static_cast<std::uint64_t>(p.n_keys) * part_len * 8;
  r.h_f_bits = original_bytes * 8;
  r.beta_bits = padded_bits - r.h_f_bits;
  const auto den = static_cast<std::int64_t>(padded_bits);
  r.storage_ratio = Rational(static_cast<std::int64_t>(r.lambda_bits), den);
  r.randomness_ratio = Rational(static_cast<std::int64_t>(r.rho_bits), den);
  r.storage_bound = Rational(p.k - p.l, p.k);
  const std::int64_t excess = static_cast<std::int64_t>(p.T) * (p.k - p.l) - p.k;
  r.randomness_bound = Rational(std::max<std::int64_t>(0, excess), p.k);
  return r;
}

namespace {

std::string bits(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(9) << value;
  return out.str();
}

}  // namespace

std::string format_audit_text(const AuditReport& report) {
  std::ostringstream out;
  const bool oracle = report.part_bits.has_value();
  out << "coalition  plain  unprotected  leaked  bound" << (oracle ? "  mi_bits" : "") << "  verdict\n";
  for (const auto& c : report.coalitions) {
    out << "S_" << std::left << std::setw(9) << c.excluded_server << std::setw(7) << c.plain_parts_visible
        << std::setw(13) << c.unprotected_encrypted << std::setw(8) << c.leaked_parts << std::setw(7)
        << c.bound;
    if (oracle) out << std::setw(13) << (c.mi_bits ? bits(*c.mi_bits) : "-");
    out << (c.pass ? "PASS" : "FAIL") << '\n';
  }
  out << "key single use: " << (report.key_single_use ? "yes" : "NO") << '\n';
  if (oracle) {
    const int bound = report.coalitions.empty() ? 0 : report.coalitions.front().bound;
    const double bound_bits = static_cast<double>(bound) * *report.part_bits;
    const double worst = report.max_mi_bits();
    out << "max MI = " << bits(worst) << " bits, bound " << bound_bits << " bits, "
        << (worst <= bound_bits + kEntropyTolerance ? "PASS" : "FAIL") << '\n';
    out << "H(F) = " << *report.file_entropy_bits << " bits, H(F | M_T) = "
        << bits(report.decode_equivocation_bits.value_or(0.0)) << " bits\n";
  }
  out << "overall: " << (report.passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

std::string format_audit_kv(const AuditReport& report) {
  std::ostringstream out;
  for (const auto& c : report.coalitions) {
    const std::string prefix = "coalition." + std::to_string(c.excluded_server) + ".";
    out << prefix << "plain=" << c.plain_parts_visible << '\n'
        << prefix << "unprotected=" << c.unprotected_encrypted << '\n'
        << prefix << "leaked=" << c.leaked_parts << '\n'
        << prefix << "bound=" << c.bound << '\n';
    if (c.mi_bits) out << prefix << "mi_bits=" << bits(*c.mi_bits) << '\n';
    out << prefix << "pass=" << (c.pass ? "true" : "false") << '\n';
  }
  out << "key_single_use=" << (report.key_single_use ? "true" : "false") << '\n';
  if (report.part_bits) {
    out << "part_bits=" << *report.part_bits << '\n'
        << "max_mi_bits=" << bits(report.max_mi_bits()) << '\n'
        << "file_entropy_bits=" << *report.file_entropy_bits << '\n'
        << "decode_equivocation_bits=" << bits(report.decode_equivocation_bits.value_or(0.0)) << '\n';
  }
  out << "pass=" << (report.passed() ? "true" : "false") << '\n';
  return out.str();
}

std::string format_rates_text(const RateReport& r) {
  std::ostringstream out;
  out << "lambda = " << r.lambda_bits << " bits, rho = " << r.rho_bits << " bits, H(F) = " << r.h_f_bits
      << " bits, beta = " << r.beta_bits << " bits\n";
  out << "storage    lambda/(H(F)+beta) = " << r.storage_ratio.str() << "  bound 1-alpha = " << r.storage_bound.str()
      << (r.storage_optimal() ? "  (equal)" : "  (above bound)") << '\n';
  out << "randomness rho/(H(F)+beta)    = " << r.randomness_ratio.str()
      << "  bound [T(1-alpha)-1]+ = " << r.randomness_bound.str()
      << (r.randomness_optimal() ? "  (equal)" : "  (differs)") << '\n';
  return out.str();
}

std::string format_rates_kv(const RateReport& r) {
  std::ostringstream out;
  out << "lambda_bits=" << r.lambda_bits << '\n'
      << "rho_bits=" << r.rho_bits << '\n'
      << "h_f_bits=" << r.h_f_bits << '\n'
      << "beta_bits=" << r.beta_bits << '\n'
      << "storage_ratio=" << r.storage_ratio.str() << '\n'
      << "storage_bound=" << r.storage_bound.str() << '\n'
      << "randomness_ratio=" << r.randomness_ratio.str() << '\n'
      << "randomness_bound=" << r.randomness_bound.str() << '\n'
      << "storage_optimal=" << (r.storage_optimal() ? "true" : "false") << '\n'
      << "randomness_optimal=" << (r.randomness_optimal() ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace xorshard
