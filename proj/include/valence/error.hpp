#pragma once

#include <stdexcept>
#include <string>

namespace valence {

enum class ErrorCode {
  kInvalidArgument,
  kOutOfBounds,
  kTooShort,
  kNoPeaks,
  kTrialRejected,
  kSchema,
  kInfeasible,
  kNumerical,
  kIo,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto a stable exit status.
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

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::kInvalidArgument, message);
}

}  // namespace valence
