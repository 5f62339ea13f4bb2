#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace xorshard {

enum class ErrorKind {
  InvalidArgument,
  RandomnessFailure,
  ConstructionBug,
  MissingShare,
  HeaderMismatch,
  PayloadLengthMismatch,
  BadMagic,
  UnsupportedVersion,
  DigestMismatch,
  Truncated,
  MalformedHeader,
  Io,
  StateSpaceTooLarge,
  PlanSyntax,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (and tests)
// can tell error classes apart without matching on message text.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what, std::optional<int> server = std::nullopt)
      : std::runtime_error(what), kind_(kind), server_(server) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  // 1-based server index the failure is attributed to, if any.
  [[nodiscard]] std::optional<int> server() const noexcept { return server_; }

private:
  ErrorKind kind_;
  std::optional<int> server_;
};

}  // namespace xorshard
