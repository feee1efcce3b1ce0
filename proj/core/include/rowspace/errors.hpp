#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rowspace {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  RankDeficient,
  StepTooLarge,
  NotASolution,
  MaxIters,
  ZeroX,
  NotInterpolant,
  GammaSingular,
  ConstructionFailed,
  SingularStep,
  ParseError,
  EmptyFile,
  NoGammaData,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map failure classes onto diagnostics and exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const char* what) {
  if (!cond) fail(code, what);
}

}  // namespace rowspace
