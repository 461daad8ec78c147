#include "hardedge/error.hpp"

namespace hardedge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyPotential: return "EmptyPotential";
    case ErrorCode::NotUniformlyConvex: return "NotUniformlyConvex";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::NonPositiveEntry: return "NonPositiveEntry";
    case ErrorCode::NoMinimizer: return "NoMinimizer";
    case ErrorCode::LineSearchStall: return "LineSearchStall";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::IndexOutOfBulk: return "IndexOutOfBulk";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::WrongPotential: return "WrongPotential";
    case ErrorCode::AdaptationFailure: return "AdaptationFailure";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::DoubleRescale: return "DoubleRescale";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::InsufficientReplicas: return "InsufficientReplicas";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyPotential:
    case ErrorCode::NotUniformlyConvex:
    case ErrorCode::InvalidParameters:
    case ErrorCode::WrongPotential:
    case ErrorCode::InsufficientReplicas:
    case ErrorCode::ConfigError:
    case ErrorCode::FormatError:
      return ErrorCategory::Config;
    default:
      return ErrorCategory::Numerical;
  }
}

}  // namespace hardedge
