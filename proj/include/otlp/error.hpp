#pragma once

#include <stdexcept>
#include <string>

namespace otlp {

enum class ErrorKind {
  kNegativeEntry,
  kNotADistribution,
  kDimensionMismatch,
  kNonFinite,
  kNotUniform,
  kNotSubFeasible,
  kNotRelativeApprox,
  kEpsOutOfRange,
  kIterationBudgetExceeded,
  kUnbounded,
  kTooLarge,
  kNumericallyDegenerate,
  kParseError,
  kInvalidArgument,
};

const char* ErrorKindName(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so the
// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace otlp
