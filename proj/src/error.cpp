#include "khtrack/error.hpp"

namespace kht {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDivisionByIntervalContainingZero: return "DivisionByIntervalContainingZero";
    case ErrorCode::kNonFiniteEndpoint: return "NonFiniteEndpoint";
    case ErrorCode::kNonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kDegenerateTimeInterval: return "DegenerateTimeInterval";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kStepUnderflow: return "StepUnderflow";
    case ErrorCode::kMaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::kMalformedCertificate: return "MalformedCertificate";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kRootCountMismatch: return "RootCountMismatch";
    case ErrorCode::kDegenerateStart: return "DegenerateStart";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace kht
