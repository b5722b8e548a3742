#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tailmax {

enum class ErrorCode {
  InvalidArgument,
  IndexOutOfRange,
  NonPositiveThreshold,
  DivisionByZero,
  ArgumentOutOfDomain,
  DomainError,
  NoProgress,
  EmptySubset,
  CholeskyFailure,
  ParseError,
  NonPositivePrice,
  EmptyPanel,
  UnknownColumn,
  DegenerateSeries,
  EmptySet,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; `code()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace tailmax
