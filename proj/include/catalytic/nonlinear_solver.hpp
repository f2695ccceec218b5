#pragma once

#include <array>
#include <vector>

#include "catalytic/equation.hpp"
#include "catalytic/numeric.hpp"

namespace catalytic {

// For k = 1 only z, u1, f1 and M0 are used.
struct SystemState {
  double z = 0.0;
  double u1 = 0.0, u2 = 0.0;
  double f1 = 0.0, f2 = 0.0;
  double m1 = 0.0, m0 = 0.0;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

struct JacobianBlocks {
  Mat2 a{}, b1{}, b2{}, c1{}, c2{};
  double det_a = 0.0, det_b1 = 0.0, det_b2 = 0.0;
};

struct NonlinearOptions {
  double w = 1.0;
  double zmax = 1e3;
  double tol_residual = 1e-12;
  double tol_detb1 = 1e-10;
  Precision precision = Precision::F64;
  int seed_order = 24;
};

// Residual max-norm of the BMJ system at a state.
double residual_norm(const CatalyticEquation& eq, const SystemState& s, const NonlinearOptions& options = {});

// Full Jacobian of the system with respect to (M0, M1, u1, f1, u2, f2) for
// k = 2 and (M0, u1, f1) for k = 1. Rows: the equation at each root, then
// curve and derivative at u1, then curve and derivative at u2.
Mat<double> system_jacobian(const CatalyticEquation& eq, const SystemState& s, const NonlinearOptions& options = {});
Vec<double> system_residual(const CatalyticEquation& eq, const SystemState& s, const NonlinearOptions& options = {});
SystemState state_from_vector(int k, double z, const Vec<double>& x);
Vec<double> state_vector(int k, const SystemState& s);

SystemState init_state(const CatalyticEquation& eq, double z_start = 0.0, const NonlinearOptions& options = {});

struct PathPoint {
  SystemState state;
  double det_b1 = 0.0, det_b2 = 0.0;
};

SystemState continue_state(const CatalyticEquation& eq, const SystemState& state, double z_target,
                           const NonlinearOptions& options = {}, std::vector<PathPoint>* path = nullptr);

JacobianBlocks jacobian_blocks(const CatalyticEquation& eq, const SystemState& state,
                               const NonlinearOptions& options = {});

struct Z0Result {
  double z0 = 0.0;
  SystemState state;
  JacobianBlocks blocks;
  double residual = 0.0;
  double condition_full = 0.0;   // bordered system at z0
  double condition_five = 0.0;   // rows 1,2,4,5,6 of the k = 2 system
  bool extended_used = false;
  std::vector<PathPoint> path;
};

Z0Result find_z0_nonlinear(const CatalyticEquation& eq, const NonlinearOptions& options = {});

// Solution at a given u1 close to the fold; z is an unknown.
SystemState solve_at_u1(const CatalyticEquation& eq, const Z0Result& fold, double u1,
                        const NonlinearOptions& options = {});

struct TReport {
  double value = 0.0;
  double delta_u = 0.0;
  std::array<double, 4> components{};
  double scale = 0.0;
  bool inconclusive = false;
};

TReport compute_T(const CatalyticEquation& eq, const SystemState& state_at_z0, const NonlinearOptions& options = {});

// M0'(z) along the solution family from the equations at the roots.
double m0_derivative(const CatalyticEquation& eq, const SystemState& s, const NonlinearOptions& options = {});

// M0(z) = a0 - a1 eps + b eps^{3/2} + O(eps^2), eps = 1 - z/z0.
struct ThreeHalvesExpansion {
  double a0 = 0.0, a1 = 0.0;
  double b = 0.0, b_error = 0.0;
  double c_standard = 0.0;  // 3b/(4 sqrt(pi))
  double c_paper = 0.0;     // b/(2 sqrt(pi))
};
ThreeHalvesExpansion expansion_three_halves(const CatalyticEquation& eq, const Z0Result& fold,
                                            const NonlinearOptions& options = {});

struct K1Report {
  Z0Result fold;
  double alpha = 1.5;
  ThreeHalvesExpansion expansion;
};
K1Report k1_solve(const CatalyticEquation& eq, const NonlinearOptions& options = {});

// Determinant of the Jacobian of the g/h split system with respect to
// (g, h, f+, f-), by central differences, together with det B1 det B2 / (2h).
struct SplitCheck {
  double g = 0.0, h = 0.0;
  double det_split = 0.0;
  double predicted = 0.0;
};
SplitCheck split_determinant_check(const CatalyticEquation& eq, const SystemState& s,
                                   const NonlinearOptions& options = {});

}  // namespace catalytic
