#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mdoe {

enum class ErrorCode {
  NotPositiveDefinite,
  DimensionMismatch,
  InvalidArgument,
  EmptyInput,
  TooFewPoints,
  SingularSystem,
  AlreadyOptimal,
  BudgetExceedsPool,
  PoolExhausted,
  NotPerfectSquare,
  ParseError,
  AngleOutOfRange,
  OutOfRange,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception. `code()` lets callers (the CLI in particular) map
/// failures onto exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  /// True for failures that originate in the numerical kernels rather than
  /// in user input or the filesystem.
  [[nodiscard]] bool is_numerical() const noexcept {
    return code_ == ErrorCode::NotPositiveDefinite || code_ == ErrorCode::SingularSystem ||
           code_ == ErrorCode::AlreadyOptimal;
  }

 private:
  ErrorCode code_;
};

}  // namespace mdoe
