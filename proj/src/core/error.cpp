#include "core/error.hpp"

namespace geolift {

const char* ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid argument";
    case ErrorCode::kDimensionMismatch:
      return "dimension mismatch";
    case ErrorCode::kNumerical:
      return "numerical failure";
    case ErrorCode::kIo:
      return "i/o error";
    case ErrorCode::kEstimatorFailure:
      return "estimator failure";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ToString(code)) + ": " + message), code_(code) {}

}  // namespace geolift
