#pragma once

#include <string>
#include <vector>

#include "catalytic/equation.hpp"

namespace catalytic {

enum class Verdict { Certified, NecessaryOnly, Failed };
std::string verdict_name(Verdict v);

struct Check {
  std::string name;
  bool passed = false;
  std::string witness;
};

struct ConnectivityReport {
  Verdict verdict = Verdict::Failed;
  std::vector<Check> checks;
  // Only for the non-linear report: series evidence that all sections are alive.
  bool empirical_ok = true;
};

ConnectivityReport linear_connectivity(const CatalyticEquation& eq);
ConnectivityReport nonlinear_necessary(const CatalyticEquation& eq, int series_order = 30);

enum class DegenerateKind { None, Q1uZero, EvenCurve, UDividesQ2PlusQ3, UDividesQ3Only };
std::string degenerate_name(DegenerateKind k);

struct DegenerateCase {
  DegenerateKind kind = DegenerateKind::None;
  // Q1uZero: the equation for F = Delta^{(1)} M. EvenCurve: the k = 1 equations
  // for the even and odd parts (in U = u^2); empty when the parts are coupled.
  std::vector<CatalyticEquation> transformed;
  std::string description;
  // M0 = (numerator + m1_coefficient * M1) / denominator, polynomials in z (and w).
  // Q1uZero: M0 = (numerator + l1_0 * F(z,0) + l0_0 * [u^1]F) / denominator.
  Poly numerator, denominator, m1_coefficient, f1_coefficient;
};

DegenerateCase degenerate_route(const CatalyticEquation& eq);

}  // namespace catalytic
