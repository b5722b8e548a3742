#include "tailmax/errors.hpp"

namespace tailmax {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonPositiveThreshold: return "NonPositiveThreshold";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ArgumentOutOfDomain: return "ArgumentOutOfDomain";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoProgress: return "NoProgress";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::EmptyPanel: return "EmptyPanel";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace tailmax
