#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcsm {

enum class ErrorCode {
  RankDeficient,
  AsymmetricInput,
  EmptySample,
  IndexOutOfRange,
  TargetExceedsN,
  MaxIters,
  LineSearchFailure,
  EpsilonOutOfRange,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

class PcsmError : public std::runtime_error {
 public:
  PcsmError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TargetExceedsN: return "TargetExceedsN";
    case ErrorCode::MaxIters: return "MaxIters";
    case ErrorCode::LineSearchFailure: return "LineSearchFailure";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace pcsm
