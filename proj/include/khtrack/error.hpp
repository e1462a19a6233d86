#pragma once

#include <stdexcept>
#include <string>

namespace kht {

enum class ErrorCode {
  kDivisionByIntervalContainingZero,
  kNonFiniteEndpoint,
  kNonPositiveRadius,
  kDimensionMismatch,
  kSingularMatrix,
  kDegenerateTimeInterval,
  kNoConvergence,
  kStepUnderflow,
  kMaxStepsExceeded,
  kMalformedCertificate,
  kParseError,
  kInvalidArgument,
  kRootCountMismatch,
  kDegenerateStart,
  kIoError,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library. The C API maps `code()` onto its
// status enum one-to-one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kht
