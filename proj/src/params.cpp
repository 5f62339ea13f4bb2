#include "xorshard/params.hpp"

#include <charconv>
#include <numeric>
#include <string>

#include "xorshard/error.hpp"

namespace xorshard {

namespace {

// Euclidean division with a non-negative remainder.
struct DivMod {
  std::int64_t quot;
  std::int64_t rem;
};

DivMod euclid(std::int64_t a, std::int64_t b) {
  std::int64_t quot = a / b;
  std::int64_t rem = a % b;
  if (rem < 0) {
    rem += b;
    quot -= 1;
  }
  return {quot, rem};
}

}  // namespace

std::string_view to_string(CaseTag tag) noexcept {
  switch (tag) {
    case CaseTag::Case1: return "case1";
    case CaseTag::Case2: return "case2";
    case CaseTag::PlainSplitFallback: return "plain-split";
    case CaseTag::TrivialSplit: return "trivial-split";
  }
  return "unknown";
}

bool is_keyed(CaseTag tag) noexcept {
  return tag == CaseTag::Case1 || tag == CaseTag::Case2;
}

PrivacyBudget normalize_alpha(std::int64_t l_raw, std::int64_t k_raw) {
  if (k_raw < 1) {
    throw Error(ErrorKind::InvalidArgument, "alpha denominator must be >= 1");
  }
  if (l_raw < 0) {
    throw Error(ErrorKind::InvalidArgument, "alpha numerator must be >= 0");
  }
  if (l_raw > k_raw) {
    throw Error(ErrorKind::InvalidArgument, "alpha must not exceed 1");
  }
  if (l_raw == 0) {
    return {0, 1};
  }
  const std::int64_t g = std::gcd(l_raw, k_raw);
  const std::int64_t l = l_raw / g;
  const std::int64_t k = k_raw / g;
  if (k > kMaxParts) {
    throw Error(ErrorKind::InvalidArgument,
                "alpha denominator " + std::to_string(k) + " exceeds " + std::to_string(kMaxParts));
  }
  return {static_cast<int>(l), static_cast<int>(k)};
}

PrivacyBudget parse_alpha(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    std::int64_t value = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (s.empty() || ec != std::errc{} || ptr != end) {
      throw Error(ErrorKind::InvalidArgument,
                  "alpha must be a fraction l/k, got '" + std::string(text) + "'");
    }
    return value;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    // Only zero may be written without a denominator.
    if (parse_int(text) != 0) {
      throw Error(ErrorKind::InvalidArgument,
                  "alpha must be a fraction l/k, got '" + std::string(text) + "'");
    }
    return {0, 1};
  }
  return normalize_alpha(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

bool is_trivially_private(int T, PrivacyBudget budget) noexcept {
  // l/k >= (T-1)/T  <=>  lT >= (T-1)k
  return static_cast<std::int64_t>(budget.l) * T >= static_cast<std::int64_t>(T - 1) * budget.k;
}

SchemeParams derive_params(int T, PrivacyBudget budget) {
  if (T < 2 || T > kMaxServers) {
    throw Error(ErrorKind::InvalidArgument,
                "server count must be in [2, " + std::to_string(kMaxServers) + "]");
  }
  const auto [l, k] = budget;
  if (k < 1 || k > kMaxParts || l < 0 || l > k) {
    throw Error(ErrorKind::InvalidArgument, "invalid privacy budget");
  }
  if (budget != normalize_alpha(l, k)) {
    throw Error(ErrorKind::InvalidArgument, "privacy budget must be in lowest terms");
  }

  SchemeParams p;
  p.T = T;
  p.l = l;
  p.k = k;
  const auto qr = euclid(l, T - 1);
  p.q = static_cast<int>(qr.quot);
  p.r = static_cast<int>(qr.rem);
  const std::int64_t excess = static_cast<std::int64_t>(T) * (k - l) - k;
  const auto uv = euclid(excess, T);
  p.u = static_cast<int>(uv.quot);
  p.v = static_cast<int>(uv.rem);

  if (is_trivially_private(T, budget)) {
    p.case_tag = CaseTag::TrivialSplit;
  } else if (p.q * T + p.r >= k) {
    p.case_tag = CaseTag::PlainSplitFallback;
  } else {
    p.case_tag = (p.r + p.v < T) ? CaseTag::Case1 : CaseTag::Case2;
  }

  if (is_keyed(p.case_tag)) {
    p.x = k - l - p.q - 1 - p.u;
    p.n_keys = static_cast<int>(excess);
    p.n_plain = p.q * T + p.r;
    p.n_encrypted = k - p.r - T * p.q;
  } else {
    p.x = 0;
    p.n_keys = 0;
    p.n_plain = k;
    p.n_encrypted = 0;
  }
  return p;
}

}  // namespace xorshard
