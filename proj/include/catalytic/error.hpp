#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace catalytic {

// Stable error codes. The numeric values are part of the CLI contract.
enum class ErrorCode : int {
  SyntaxError = 10,
  NegativeCoefficient = 11,
  UnsupportedK = 12,
  MissingVariable = 13,
  OrderTooHigh = 14,
  UDegreeCapExceeded = 20,
  InsufficientData = 21,
  NonConvergent = 22,
  DegenerateEvenCurve = 23,
  NegativeCoefficientDetected = 24,
  TrivialPuiseuxRoots = 25,
  NotLinear = 30,
  NotNonlinear = 31,
  RecursionTooDeep = 32,
  DegreeTooLow = 40,
  NoCriticalPoint = 41,
  NewtonDivergence = 42,
  AmbiguousBranch = 43,
  SingularLinearSystem = 44,
  FitUnstable = 45,
  SeriesOrderTooLow = 50,
  StepUnderflow = 51,
  DetAVanishes = 52,
  DetB2Vanishes = 53,
  NoSingularityFound = 54,
  LinearEquation = 55,
  NotAtSingularity = 56,
  WrongK = 57,
  MarkMissing = 60,
  StencilFailure = 61,
  Inconclusive = 70,
  InvalidArgument = 80,
  IoError = 81,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace catalytic
