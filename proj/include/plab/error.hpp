#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plab {

enum class ErrorCode {
  InvalidArgument,
  ShiftOutOfDomain,
  WindowOutOfDomain,
  DimensionMismatch,
  GridMismatch,
  BlowupDetected,
  StepUnderflow,
  HistoryDomainMismatch,
  GridTooCoarse,
  InsufficientReturns,
  NotCauchy,
  ConfigInvalid,
  ParseError,
  DomainMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying one of the library's error kinds. what() is prefixed
/// with the kind name, e.g. "WindowOutOfDomain: window [-5, 5] ...".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace plab
