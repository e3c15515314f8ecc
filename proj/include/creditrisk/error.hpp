#pragma once

#include <stdexcept>
#include <string>

namespace creditrisk {

// Every failure raised by the library carries one of these kinds. The CLI
// maps them onto exit codes (see ExitCodeFor).
enum class ErrorKind {
  kInvalidArgument,   // bad config / precondition violated by the caller
  kMissingFile,
  kIo,
  kNonNumeric,        // CSV cell that does not parse as a number
  kMissingValue,      // empty or NaN CSV cell
  kNonBinaryTarget,
  kDimensionMismatch,
  kSingleClass,
  kUnbalancedSplit,   // stratification tolerance not achievable
  kCalibration,       // synthetic intercept search failed
  kSingular,
  kSeparation,
  kNumeric,           // NaN from a black box, non-finite values
  kMalformedDocument,
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Exit-code taxonomy: 2 validation, 3 I/O, 4 numeric failure.
int ExitCodeFor(ErrorKind kind);

}  // namespace creditrisk
