#pragma once

#include <stdexcept>
#include <string>

namespace asparent {

/// Error categories exposed one-to-one through the C API status codes.
enum class ErrorCode {
  kInvalidArgument = 1,
  kParse = 2,
  kIo = 3,
  kDimensionMismatch = 4,
  kDenseLimit = 5,
  kEmptyKernel = 6,
  kUnknownName = 7,
  kNumeric = 8,
  kInternal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace asparent
