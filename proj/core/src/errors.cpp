#include "rowspace/errors.hpp"

namespace rowspace {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NotASolution: return "NotASolution";
    case ErrorCode::MaxIters: return "MaxIters";
    case ErrorCode::ZeroX: return "ZeroX";
    case ErrorCode::NotInterpolant: return "NotInterpolant";
    case ErrorCode::GammaSingular: return "GammaSingular";
    case ErrorCode::ConstructionFailed: return "ConstructionFailed";
    case ErrorCode::SingularStep: return "SingularStep";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::NoGammaData: return "NoGammaData";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace rowspace
