#include "catalytic/error.hpp"

namespace catalytic {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::NegativeCoefficient: return "NegativeCoefficient";
    case ErrorCode::UnsupportedK: return "UnsupportedK";
    case ErrorCode::MissingVariable: return "MissingVariable";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::UDegreeCapExceeded: return "UDegreeCapExceeded";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::DegenerateEvenCurve: return "DegenerateEvenCurve";
    case ErrorCode::NegativeCoefficientDetected: return "NegativeCoefficientDetected";
    case ErrorCode::TrivialPuiseuxRoots: return "TrivialPuiseuxRoots";
    case ErrorCode::NotLinear: return "NotLinear";
    case ErrorCode::NotNonlinear: return "NotNonlinear";
    case ErrorCode::RecursionTooDeep: return "RecursionTooDeep";
    case ErrorCode::DegreeTooLow: return "DegreeTooLow";
    case ErrorCode::NoCriticalPoint: return "NoCriticalPoint";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::AmbiguousBranch: return "AmbiguousBranch";
    case ErrorCode::SingularLinearSystem: return "SingularLinearSystem";
    case ErrorCode::FitUnstable: return "FitUnstable";
    case ErrorCode::SeriesOrderTooLow: return "SeriesOrderTooLow";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::DetAVanishes: return "DetAVanishes";
    case ErrorCode::DetB2Vanishes: return "DetB2Vanishes";
    case ErrorCode::NoSingularityFound: return "NoSingularityFound";
    case ErrorCode::LinearEquation: return "LinearEquation";
    case ErrorCode::NotAtSingularity: return "NotAtSingularity";
    case ErrorCode::WrongK: return "WrongK";
    case ErrorCode::MarkMissing: return "MarkMissing";
    case ErrorCode::StencilFailure: return "StencilFailure";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace catalytic
