#include "xorshard/error.hpp"

namespace xorshard {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::RandomnessFailure: return "randomness-failure";
    case ErrorKind::ConstructionBug: return "construction-bug";
    case ErrorKind::MissingShare: return "missing-share";
    case ErrorKind::HeaderMismatch: return "header-mismatch";
    case ErrorKind::PayloadLengthMismatch: return "payload-length-mismatch";
    case ErrorKind::BadMagic: return "bad-magic";
    case ErrorKind::UnsupportedVersion: return "unsupported-version";
    case ErrorKind::DigestMismatch: return "digest-mismatch";
    case ErrorKind::Truncated: return "truncated";
    case ErrorKind::MalformedHeader: return "malformed-header";
    case ErrorKind::Io: return "io";
    case ErrorKind::StateSpaceTooLarge: return "state-space-too-large";
    case ErrorKind::PlanSyntax: return "plan-syntax";
  }
  return "unknown";
}

}  // namespace xorshard
