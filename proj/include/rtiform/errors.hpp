#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rti {

enum class ErrorCode {
  kNotSkew,
  kNearPiSingularity,
  kGimbalLock,
  kCycleDetected,
  kHoverRequired,
  kOutOfSchedule,
  kInvalidArgument,
  kParseError,
  kIoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotSkew: return "NotSkew";
    case ErrorCode::kNearPiSingularity: return "NearPiSingularity";
    case ErrorCode::kGimbalLock: return "GimbalLock";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kHoverRequired: return "HoverRequired";
    case ErrorCode::kOutOfSchedule: return "OutOfSchedule";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        detail_(what) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix, for re-wrapping with more context.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace rti
