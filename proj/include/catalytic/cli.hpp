#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "catalytic/asymptotics.hpp"

namespace catalytic {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyResult {
  std::vector<VerifyCheck> checks;
  bool inconclusive = false;
  bool passed() const;
};

// Cross-checks every analytic prediction for eq against the series oracle.
VerifyResult verify_equation(const CatalyticEquation& eq, const AnalyzeOptions& options);

// A path to an existing file, or the name of a shipped fixture.
std::string resolve_equation_path(const std::string& arg);

// Exit codes: 0 success, 2 inconclusive, 1 error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace catalytic
