#pragma once

#include <stdexcept>
#include <string>

namespace hdlock {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kOutOfRange,
  kDegenerate,
  kKeyValidation,
  kConfig,
  kData,
  kFormat,
  kAmbiguity,
  kBudgetExceeded,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {
[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}
}  // namespace detail

}  // namespace hdlock
