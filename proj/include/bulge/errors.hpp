#pragma once

#include <stdexcept>
#include <string>

namespace bulge {

// Stable machine-readable failure codes. The CLI prints them as
// `error[<code>]: <message>` on stderr, so the names are part of the
// external interface and must not be renamed casually.
enum class ErrorCode {
  InvalidArgument,
  UnsupportedRatio,
  NonMonotoneModel,
  TooFewPoints,
  DegenerateAbscissa,
  ShapeTooSimilar,
  NoRootInBracket,
  MultipleUnknowns,
  ZeroUnknownThickness,
  NotConverged,
  PoorFit,
  ParseError,
  UnitError,
  MonotonicityError,
  UnknownLabel,
  MonteCarloFailure,
  IoError,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  const char* code_name() const noexcept { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace bulge
