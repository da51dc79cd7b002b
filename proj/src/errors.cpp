#include "bulge/errors.hpp"

namespace bulge {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnsupportedRatio: return "UnsupportedRatio";
    case ErrorCode::NonMonotoneModel: return "NonMonotoneModel";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateAbscissa: return "DegenerateAbscissa";
    case ErrorCode::ShapeTooSimilar: return "ShapeTooSimilar";
    case ErrorCode::NoRootInBracket: return "NoRootInBracket";
    case ErrorCode::MultipleUnknowns: return "MultipleUnknowns";
    case ErrorCode::ZeroUnknownThickness: return "ZeroUnknownThickness";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::PoorFit: return "PoorFit";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnitError: return "UnitError";
    case ErrorCode::MonotonicityError: return "MonotonicityError";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::MonteCarloFailure: return "MonteCarloFailure";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace bulge
