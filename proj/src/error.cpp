#include "creditrisk/error.hpp"

namespace creditrisk {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kMissingFile: return "missing file";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kNonNumeric: return "non-numeric value";
    case ErrorKind::kMissingValue: return "missing value";
    case ErrorKind::kNonBinaryTarget: return "non-binary target";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kSingleClass: return "single class";
    case ErrorKind::kUnbalancedSplit: return "unbalanced split";
    case ErrorKind::kCalibration: return "calibration failure";
    case ErrorKind::kSingular: return "singular system";
    case ErrorKind::kSeparation: return "separation";
    case ErrorKind::kNumeric: return "numeric failure";
    case ErrorKind::kMalformedDocument: return "malformed document";
  }
  return "unknown";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMissingFile:
    case ErrorKind::kIo:
      return 3;
    case ErrorKind::kCalibration:
    case ErrorKind::kSingular:
    case ErrorKind::kSeparation:
    case ErrorKind::kNumeric:
      return 4;
    default:
      return 2;
  }
}

}  // namespace creditrisk
