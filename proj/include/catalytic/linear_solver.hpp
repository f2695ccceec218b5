#pragma once

#include <vector>

#include "catalytic/equation.hpp"
#include "catalytic/polynomial.hpp"

namespace catalytic {

struct CurvePolynomial {
  Poly c;  // R_{y0}, a polynomial in z, u (and w)
  int k = 2;
};

CurvePolynomial curve_polynomial(const CatalyticEquation& eq);

struct LinearOptions {
  double w = 1.0;
  double zmax = 1e3;
  double tol_residual = 1e-12;
};

struct CriticalPoint {
  double z0 = 0.0;
  double u0 = 0.0;
  double residual = 0.0;
  int steps = 0;  // accepted continuation steps
};

// Sample of the positive branch recorded during continuation.
struct BranchSample {
  double z, u, gap;  // gap = k u^{k-1} - C_u > 0
};

CriticalPoint find_z0_linear(const CurvePolynomial& c, const LinearOptions& options = {},
                             std::vector<BranchSample>* path = nullptr);

// Small root u1(z) < u0 at 0 < z < z0, by Newton from the local expansion.
double branch_u1(const CurvePolynomial& c, const CriticalPoint& cp, double z, const LinearOptions& options = {});

double second_branch(const CurvePolynomial& c, const CriticalPoint& cp, const LinearOptions& options = {});
// u2 tracked to an arbitrary 0 < z <= z0.
double branch_u2(const CurvePolynomial& c, const CriticalPoint& cp, double u2_at_z0, double z,
                 const LinearOptions& options = {});

struct M01 {
  double m0 = 0.0, m1 = 0.0;
};
// k = 2: kernel system at the two roots. k = 1: M0 from the single root (u2 ignored).
M01 solve_M01_linear(const CatalyticEquation& eq, double z, double u1, double u2, const LinearOptions& options = {});

struct SingularExpansion {
  double z0 = 0.0;
  double alpha = 0.5;
  double a_m0 = 0.0, b_m0 = 0.0;
  double a_m1 = 0.0, b_m1 = 0.0;
  double b_error = 0.0;
  double c = 0.0;  // b_m0 / (2 sqrt(pi)) for an aperiodic M0
};
SingularExpansion local_expansion_linear(const CatalyticEquation& eq, const CriticalPoint& cp,
                                         const LinearOptions& options = {});

}  // namespace catalytic
