#pragma once

#include <stdexcept>
#include <string>

namespace sublab {

enum class ErrorCode {
  NonSkewMatrix,
  DegenerateJ,
  BadDimension,
  BadExponent,
  KindMismatch,
  FDStepUnderflow,
  OriginSingularity,
  ExponentOutOfRange,
  UnusableSamples,
  SupportLeak,
  DegenerateFamily,
  InsufficientCurve,
  NoConvergence,
  ParseError,
  UnknownKey,
  RangeError,
  IoError,
};

const char* error_code_name(ErrorCode code);

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }
  const char* code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace sublab
