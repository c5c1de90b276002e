#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cocyclelab {

enum class ErrorCode {
  kInvalidArgument,
  kNotPrimitive,
  kBudgetExceeded,
  kNotClosable,
  kInadmissibleWindow,
  kInadmissibleOrbit,
  kNotFound,
  kHypothesisUnavailable,
  kObstructionFailed,
  kCoverageIncomplete,
  kSingularWindow,
  kIoError,
  kSchemaError,
};

// Stable machine-readable name, used in error JSON documents.
std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Carries every violation found, not just the first.
class SchemaError : public Error {
 public:
  explicit SchemaError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<std::string> violations_;
};

}  // namespace cocyclelab
