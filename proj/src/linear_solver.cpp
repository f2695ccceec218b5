#include "catalytic/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>

#include "catalytic/error.hpp"
#include "catalytic/numeric.hpp"

namespace catalytic {

CurvePolynomial curve_polynomial(const CatalyticEquation& eq) {
  if (classify(eq) != Linearity::Linear) fail(ErrorCode::NotLinear, "curve polynomial requires a linear equation");
  RForm rf(eq);
  CurvePolynomial c{rf.partial(PartialIndex{0, 0, 1, 0, 0}), eq.k};
  if (c.c.degree(Var::U) <= static_cast<std::uint32_t>(eq.k)) {
    fail(ErrorCode::DegreeTooLow, "curve polynomial has u-degree " + std::to_string(c.c.degree(Var::U)) +
                                      " <= k = " + std::to_string(eq.k));
  }
  return c;
}

namespace {

// F(z,u) = u^k - C(z,u) and its derivatives.
class Curve {
 public:
  Curve(const CurvePolynomial& c, double w)
      : k_(c.k),
        w_(w),
        poly_(c.c),
        c_(c.c),
        cu_(c.c.derivative(Var::U)),
        cuu_(c.c.derivative(Var::U, 2)),
        cz_(c.c.derivative(Var::Z)),
        czu_(c.c.derivative(Var::Z).derivative(Var::U)) {}

  int k() const { return k_; }
  double f(double z, double u) const { return std::pow(u, k_) - c_(pt(z, u)); }
  double fu(double z, double u) const { return k_ * std::pow(u, k_ - 1) - cu_(pt(z, u)); }
  double fuu(double z, double u) const { return (k_ == 2 ? 2.0 : 0.0) - cuu_(pt(z, u)); }
  double fz(double z, double u) const { return -cz_(pt(z, u)); }
  double fzu(double z, double u) const { return -czu_(pt(z, u)); }
  double c_value(double z, double u) const { return c_(pt(z, u)); }

  // Coefficients of F(z, .) in ascending powers of u.
  std::vector<double> coefficients(double z) const {
    std::vector<double> p(std::max<std::size_t>(poly_.degree(Var::U), static_cast<std::size_t>(k_)) + 1, 0.0);
    for (const auto& [e, c] : poly_.terms()) {
      p[e[idx(Var::U)]] -= to_double(c) * std::pow(z, e[idx(Var::Z)]) * std::pow(w_, e[idx(Var::W)]);
    }
    p[static_cast<std::size_t>(k_)] += 1.0;
    return p;
  }

  // Newton polygon estimate of the positive small root at tiny z.
  double polygon_seed(double z) const {
    double best = 0.0;
    for (int a = 0; a < k_; ++a) {
      std::uint32_t bmin = UINT32_MAX;
      for (const auto& [e, c] : poly_.terms()) {
        if (e[idx(Var::U)] == static_cast<std::uint32_t>(a)) bmin = std::min(bmin, e[idx(Var::Z)]);
      }
      if (bmin == UINT32_MAX) continue;
      double coef = 0.0;
      for (const auto& [e, c] : poly_.terms()) {
        if (e[idx(Var::U)] == static_cast<std::uint32_t>(a) && e[idx(Var::Z)] == bmin) {
          coef += to_double(c) * std::pow(w_, e[idx(Var::W)]);
        }
      }
      if (coef <= 0.0) continue;
      best = std::max(best, std::pow(coef * std::pow(z, bmin), 1.0 / (k_ - a)));
    }
    return best;
  }

 private:
  Point<double> pt(double z, double u) const { return {z, u, w_, 0.0, 0.0, 0.0}; }
  int k_;
  double w_;
  Poly poly_;
  HornerPoly<double> c_, cu_, cuu_, cz_, czu_;
};

// One-dimensional Newton on F(z, .) = 0.
std::optional<double> newton_u(const Curve& cv, double z, double u, double tol) {
  for (int it = 0; it < 60; ++it) {
    double f = cv.f(z, u);
    double scale = std::max(1.0, std::fabs(cv.c_value(z, u)));
    if (std::fabs(f) <= tol * scale) return u;
    double d = cv.fu(z, u);
    if (d == 0.0 || !std::isfinite(d)) return std::nullopt;
    double step = f / d;
    u -= step;
    if (!std::isfinite(u)) return std::nullopt;
    if (std::fabs(step) <= 1e-17 * std::max(1.0, std::fabs(u))) {
      return std::fabs(cv.f(z, u)) <= 1e3 * tol * scale ? std::optional<double>(u) : std::nullopt;
    }
  }
  return std::nullopt;
}

double guess_scale(const Curve& cv) {
  // z with C(z,1) = 1: the scale where u1 reaches order one.
  double lo = 0.0, hi = 1e-6;
  while (cv.c_value(hi, 1.0) < 1.0 && hi < 1e12) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (cv.c_value(mid, 1.0) < 1.0 ? lo : hi) = mid;
  }
  return hi;
}

double start_root(const Curve& cv, double z, double tol) {
  double seed = cv.polygon_seed(z);
  if (seed > 0.0) {
    auto u = newton_u(cv, z, seed, tol);
    if (u && *u > 0.0 && cv.fu(z, *u) > 0.0) return *u;
  }
  // Bracket the first sign change of F on (0, inf).
  double lo = 0.0, hi = seed > 0.0 ? seed : 1e-8;
  while (cv.f(z, hi) <= 0.0 && hi < 1e6) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (cv.f(z, mid) <= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

CriticalPoint fold_newton(const Curve& cv, double z, double u, double tol) {
  for (int it = 0; it < 80; ++it) {
    double f = cv.f(z, u), g = cv.fu(z, u);
    if (std::fabs(f) <= tol && std::fabs(g) <= tol) return CriticalPoint{z, u, std::max(std::fabs(f), std::fabs(g)), 0};
    double a = cv.fz(z, u), b = g, c = cv.fzu(z, u), d = cv.fuu(z, u);
    double det = a * d - b * c;
    if (det == 0.0 || !std::isfinite(det)) break;
    double dz = (f * d - b * g) / det;
    double du = (a * g - c * f) / det;
    z -= dz;
    u -= du;
    if (!std::isfinite(z) || !std::isfinite(u)) break;
    if (std::fabs(dz) <= 1e-17 * std::fabs(z) && std::fabs(du) <= 1e-17 * std::fabs(u)) {
      double r = std::max(std::fabs(cv.f(z, u)), std::fabs(cv.fu(z, u)));
      return CriticalPoint{z, u, r, 0};
    }
  }
  fail(ErrorCode::NewtonDivergence, "Newton on the critical-point system did not converge");
}

// Distance to the fold predicted from the local quadratic model.
double fold_distance(const Curve& cv, double z, double u) {
  double g = cv.fu(z, u), guu = cv.fuu(z, u), fz = cv.fz(z, u);
  double p = guu * fz;
  if (!(p > 0.0)) return std::numeric_limits<double>::infinity();
  return g * g / (2.0 * p);
}

}  // namespace

CriticalPoint find_z0_linear(const CurvePolynomial& c, const LinearOptions& options, std::vector<BranchSample>* path) {
  if (c.c.degree(Var::U) <= static_cast<std::uint32_t>(c.k)) fail(ErrorCode::DegreeTooLow, "curve degree too low");
  Curve cv(c, options.w);
  const double tol = options.tol_residual;
  double z = 1e-3 * guess_scale(cv);
  double u = start_root(cv, z, tol);
  if (!(u > 0.0) || !(cv.fu(z, u) > 0.0)) fail(ErrorCode::NewtonDivergence, "no positive small root at the start point");
  double h = z;
  int steps = 0;
  const double min_step = 1e-12;
  while (true) {
    if (z > options.zmax) fail(ErrorCode::NoCriticalPoint, "continuation exceeded zmax");
    double dist = fold_distance(cv, z, u);
    if (dist < 1e-2 * z) break;
    h = std::min(h, 0.5 * dist);
    double g = cv.fu(z, u);
    double slope = -cv.fz(z, u) / g;
    double zn = z + h;
    auto un = newton_u(cv, zn, u + h * slope, tol);
    bool ok = un && *un > u && cv.fu(zn, *un) > 0.0 && std::fabs(*un - (u + h * slope)) <= 0.25 * (*un - u) + 1e-14;
    if (ok) {
      z = zn;
      u = *un;
      ++steps;
      if (path) path->push_back({z, u, cv.fu(z, u)});
      h *= 2.0;
    } else {
      h *= 0.5;
      if (h < min_step * std::max(1.0, z)) break;
    }
  }
  double g = cv.fu(z, u), guu = cv.fuu(z, u);
  double zs = z + fold_distance(cv, z, u);
  double us = guu != 0.0 ? u - g / guu : u;
  if (!std::isfinite(zs)) zs = z;
  CriticalPoint cp = fold_newton(cv, zs, us, tol * 10.0);
  if (!(cp.z0 >= z * (1.0 - 1e-12)) || !(cp.u0 >= u * (1.0 - 1e-9))) {
    fail(ErrorCode::NewtonDivergence, "critical-point Newton left the positive branch");
  }
  if (cp.z0 > options.zmax) fail(ErrorCode::NoCriticalPoint, "critical point beyond zmax");
  cp.steps = steps;
  return cp;
}

double branch_u1(const CurvePolynomial& c, const CriticalPoint& cp, double z, const LinearOptions& options) {
  Curve cv(c, options.w);
  if (z >= cp.z0) return cp.u0;
  double fz = cv.fz(cp.z0, cp.u0), fuu = cv.fuu(cp.z0, cp.u0);
  double r = 2.0 * fz * (z - cp.z0) / fuu;
  double seed = cp.u0 - (r < 0 ? std::sqrt(-r) : std::sqrt(r));
  auto u = newton_u(cv, z, seed, options.tol_residual);
  if (u && *u < cp.u0 && *u > 0.0 && cv.fu(z, *u) > 0.0) return *u;
  // Far from z0: continue the branch from small z.
  double zz = std::min(1e-3 * cp.z0, z);
  double uu = start_root(cv, zz, options.tol_residual);
  double h = zz;
  while (zz < z) {
    double zn = std::min(z, zz + h);
    double slope = -cv.fz(zz, uu) / cv.fu(zz, uu);
    auto un = newton_u(cv, zn, uu + (zn - zz) * slope, options.tol_residual);
    if (un && *un > uu && cv.fu(zn, *un) > 0.0) {
      zz = zn;
      uu = *un;
      h *= 2.0;
    } else {
      h *= 0.5;
      if (h < 1e-15) fail(ErrorCode::NewtonDivergence, "cannot track u1");
    }
  }
  return uu;
}

namespace {

// Tracks a regular root of F from (z_from, u_from) to z_to.
double track_regular(const Curve& cv, double z_from, double u_from, double z_to, double tol) {
  double z = z_from, u = u_from;
  double h = (z_to - z_from) / 8.0;
  int guard = 0;
  while ((h > 0 && z < z_to) || (h < 0 && z > z_to)) {
    if (++guard > 100000) fail(ErrorCode::NewtonDivergence, "second branch tracking did not terminate");
    double zn = (h > 0) ? std::min(z_to, z + h) : std::max(z_to, z + h);
    double slope = -cv.fz(z, u) / cv.fu(z, u);
    double pred = u + (zn - z) * slope;
    auto un = newton_u(cv, zn, pred, tol);
    if (un && std::fabs(*un - pred) <= 0.1 * std::fabs(*un - u) + 1e-12 * (1.0 + std::fabs(u))) {
      z = zn;
      u = *un;
      h *= 1.5;
    } else {
      h *= 0.5;
      if (std::fabs(h) < 1e-15) fail(ErrorCode::NewtonDivergence, "cannot track the second branch");
    }
  }
  return u;
}

}  // namespace

double second_branch(const CurvePolynomial& c, const CriticalPoint& cp, const LinearOptions& options) {
  if (c.k != 2) fail(ErrorCode::WrongK, "the second branch exists for k = 2");
  if (c.c.coefficient_of(Var::U, 0).is_zero()) return 0.0;
  Curve cv(c, options.w);
  // Continuation-consistent reference: the other small root at tiny z, tracked to z0.
  double zs = 1e-4 * cp.z0;
  auto small = polynomial_roots(cv.coefficients(zs));
  std::sort(small.begin(), small.end(), [](auto a, auto b) { return std::abs(a) < std::abs(b); });
  double u1s = start_root(cv, zs, options.tol_residual);
  std::optional<double> seed;
  double gap = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(2, small.size()); ++i) {
    double dist = std::fabs(small[i].real() - u1s);
    if (dist > 1e-6 * std::fabs(u1s) && dist > gap && std::fabs(small[i].imag()) < 1e-9) {
      seed = small[i].real();
      gap = dist;
    }
  }
  if (!seed) fail(ErrorCode::AmbiguousBranch, "no real second small root at small z");
  auto polished = newton_u(cv, zs, *seed, options.tol_residual);
  double tracked = track_regular(cv, zs, polished ? *polished : *seed, cp.z0, options.tol_residual);
  auto roots = polynomial_roots(cv.coefficients(cp.z0));
  std::vector<double> candidates;
  for (auto r : roots) {
    if (std::fabs(r.imag()) > 1e-7 * std::max(1.0, std::abs(r))) continue;
    double x = r.real();
    if (std::fabs(x) >= cp.u0 * (1 - 1e-6) || std::fabs(x - cp.u0) < 1e-5 * std::max(1.0, cp.u0)) continue;
    candidates.push_back(x);
  }
  if (candidates.empty()) fail(ErrorCode::AmbiguousBranch, "no real root with |u| < u0 at z0");
  std::sort(candidates.begin(), candidates.end(),
            [&](double a, double b) { return std::fabs(a - tracked) < std::fabs(b - tracked); });
  if (candidates.size() > 1 && std::fabs(candidates[1] - tracked) < 1e-6) {
    fail(ErrorCode::AmbiguousBranch, "two candidates for u2: " + std::to_string(candidates[0]) + " and " +
                                         std::to_string(candidates[1]));
  }
  auto best = newton_u(cv, cp.z0, candidates[0], options.tol_residual);
  return best ? *best : candidates[0];
}

double branch_u2(const CurvePolynomial& c, const CriticalPoint& cp, double u2_at_z0, double z,
                 const LinearOptions& options) {
  if (c.c.coefficient_of(Var::U, 0).is_zero()) return 0.0;
  Curve cv(c, options.w);
  if (z == cp.z0) return u2_at_z0;
  return track_regular(cv, cp.z0, u2_at_z0, z, options.tol_residual);
}

M01 solve_M01_linear(const CatalyticEquation& eq, double z, double u1, double u2, const LinearOptions& options) {
  RForm rf(eq);
  LinearParts lp = linear_parts(rf);
  HornerPoly<double> p0(lp.p0), l0(lp.l0), l1(lp.l1), l2(lp.l2);
  auto pt = [&](double u) { return Point<double>{z, u, options.w, 0.0, 0.0, 0.0}; };
  M01 r;
  if (eq.k == 1) {
    double den = 1.0 - l1(pt(u1));
    if (std::fabs(den) < 1e-14) fail(ErrorCode::SingularLinearSystem, "1 - L1(z,u1) vanishes");
    r.m0 = p0(pt(u1)) / den;
    double l00 = l0(pt(0.0));
    if (l00 != 0.0) r.m1 = -(p0(pt(0.0)) + (l1(pt(0.0)) - 1.0) * r.m0) / l00;
    return r;
  }
  double a11 = 1.0 - l2(pt(u1)), a12 = u1 - l1(pt(u1));
  double a21 = 1.0 - l2(pt(u2)), a22 = u2 - l1(pt(u2));
  if (std::fabs(a11) < 1e-14 || std::fabs(a21) < 1e-14) {
    fail(ErrorCode::SingularLinearSystem, "1 - zQ1(z,u_i) vanishes");
  }
  double det = a11 * a22 - a12 * a21;
  double scale = std::max({std::fabs(a11 * a22), std::fabs(a12 * a21), 1e-300});
  if (std::fabs(det) < 1e-13 * scale) fail(ErrorCode::SingularLinearSystem, "kernel system is singular");
  double b1 = p0(pt(u1)), b2 = p0(pt(u2));
  r.m0 = (b1 * a22 - a12 * b2) / det;
  r.m1 = (a11 * b2 - a21 * b1) / det;
  return r;
}

SingularExpansion local_expansion_linear(const CatalyticEquation& eq, const CriticalPoint& cp,
                                         const LinearOptions& options) {
  CurvePolynomial c = curve_polynomial(eq);
  double u2z0 = eq.k == 2 ? second_branch(c, cp, options) : 0.0;
  M01 at = solve_M01_linear(eq, cp.z0, cp.u0, u2z0, options);
  SingularExpansion se;
  se.z0 = cp.z0;
  se.a_m0 = at.m0;
  se.a_m1 = at.m1;
  const int levels = 10;
  std::vector<double> x, phi0, phi1;
  double u2 = u2z0;
  for (int m = 0; m < levels; ++m) {
    double eps = std::ldexp(1e-2, -m);
    double z = cp.z0 * (1.0 - eps);
    double u1 = branch_u1(c, cp, z, options);
    if (eq.k == 2) u2 = branch_u2(c, cp, u2z0, z, options);
    M01 v = solve_M01_linear(eq, z, u1, u2, options);
    x.push_back(std::sqrt(eps));
    phi0.push_back((at.m0 - v.m0) / std::sqrt(eps));
    phi1.push_back((at.m1 - v.m1) / std::sqrt(eps));
  }
  auto tail = [&](const std::vector<double>& v, int from, int to) {
    return extrapolate_to_zero(std::vector<double>(x.begin() + from, x.begin() + to),
                               std::vector<double>(v.begin() + from, v.begin() + to));
  };
  se.b_m0 = tail(phi0, 4, levels);
  se.b_m1 = tail(phi1, 4, levels);
  double alt0 = tail(phi0, 3, levels - 1);
  se.b_error = std::fabs(se.b_m0 - alt0);
  if (!(se.b_error <= 1e-4 * std::max(1.0, std::fabs(se.b_m0)))) {
    fail(ErrorCode::FitUnstable, "singular coefficient ladder does not stabilize");
  }
  se.c = se.b_m0 / (2.0 * std::sqrt(M_PI));
  return se;
}

}  // namespace catalytic
