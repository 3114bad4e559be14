#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drops {

enum class ErrorCode {
  InvalidParams,
  IllConditioned,
  BranchUndefined,
  OutsideBand,
  Divergent,
  Degenerate,
  IntegrandPole,
  WrongRegion,
  InvalidStart,
  ToleranceFailure,
  Exceptional,
  NonClosure,
  NotClosed,
  InsufficientResolution,
  NotConverged,
  CircularInput,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::BranchUndefined: return "BranchUndefined";
    case ErrorCode::OutsideBand: return "OutsideBand";
    case ErrorCode::Divergent: return "Divergent";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::IntegrandPole: return "IntegrandPole";
    case ErrorCode::WrongRegion: return "WrongRegion";
    case ErrorCode::InvalidStart: return "InvalidStart";
    case ErrorCode::ToleranceFailure: return "ToleranceFailure";
    case ErrorCode::Exceptional: return "Exceptional";
    case ErrorCode::NonClosure: return "NonClosure";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::InsufficientResolution: return "InsufficientResolution";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::CircularInput: return "CircularInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI, the scanner) can map it to an exit status or an in-row
/// error without parsing messages.
class DropError : public std::runtime_error {
 public:
  DropError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace drops
