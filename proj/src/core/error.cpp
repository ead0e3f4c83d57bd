#include "plab/error.hpp"

namespace plab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ShiftOutOfDomain: return "ShiftOutOfDomain";
    case ErrorCode::WindowOutOfDomain: return "WindowOutOfDomain";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::BlowupDetected: return "BlowupDetected";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::HistoryDomainMismatch: return "HistoryDomainMismatch";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::InsufficientReturns: return "InsufficientReturns";
    case ErrorCode::NotCauchy: return "NotCauchy";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace plab
