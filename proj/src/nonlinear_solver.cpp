#include "catalytic/nonlinear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>

#include "catalytic/error.hpp"
#include "catalytic/series.hpp"

namespace catalytic {

namespace {

constexpr int kCodes = 4 * 4 * 4 * 4 * 4;

int code(const PartialIndex& p) { return p.z + 4 * (p.u + 4 * (p.y0 + 4 * (p.y1 + 4 * p.y2))); }

PartialIndex pidx(int z, int u, int y0, int y1 = 0, int y2 = 0) {
  return PartialIndex{static_cast<std::uint8_t>(z), static_cast<std::uint8_t>(u), static_cast<std::uint8_t>(y0),
                      static_cast<std::uint8_t>(y1), static_cast<std::uint8_t>(y2)};
}

// Differentiation variables of the system: z, u, y0 and the section slots.
enum class D { Z, U, Y0, Y1, Y2 };

PartialIndex plus(PartialIndex p, D v) {
  switch (v) {
    case D::Z: ++p.z; break;
    case D::U: ++p.u; break;
    case D::Y0: ++p.y0; break;
    case D::Y1: ++p.y1; break;
    case D::Y2: ++p.y2; break;
  }
  return p;
}

template <class S>
S ipow(const S& x, int e) {
  if (e < 0) return S(0);
  return small_pow(x, static_cast<std::uint32_t>(e));
}

// The 3k equations of the system for M_0..M_{k-1} and the k small roots.
// Unknown layout: M_0..M_{k-1}, then (u_i, f_i) per root.
// Row layout: the equation rows at every root, then (curve, derivative) per root.
template <class S>
class Bmj {
 public:
  Bmj(const CatalyticEquation& eq, double w) : k_(eq.k), w_(S(w)), linear_(false), table_(kCodes) {
    RForm rf(eq);
    linear_ = rf.linear();
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; a + b <= 3; ++b)
        for (int c = 0; a + b + c <= 3; ++c)
          for (int d = 0; a + b + c + d <= 3; ++d)
            for (int e = 0; a + b + c + d + e <= 3; ++e) {
              PartialIndex p = pidx(a, b, c, d, e);
              table_[static_cast<std::size_t>(code(p))] = HornerPoly<S>(rf.partial(p));
            }
    r_y0y0_zero_ = rf.partial(pidx(0, 0, 2)).is_zero();
  }

  int k() const { return k_; }
  int n() const { return 3 * k_; }
  bool linear() const { return linear_; }
  bool r_y0y0_zero() const { return r_y0y0_zero_; }

  // Slot of M_j in R: y2 for M0 when k = 2, y1 otherwise.
  D slot(int j) const { return (k_ - j) == 2 ? D::Y2 : D::Y1; }
  int col_u(int i) const { return k_ + 2 * i; }
  int col_f(int i) const { return k_ + 2 * i + 1; }
  int row_eq(int i) const { return i; }
  int row_curve(int i) const { return k_ + 2 * i; }
  int row_der(int i) const { return k_ + 2 * i + 1; }

  Point<S> point(const S& z, const Vec<S>& x, int i) const {
    Point<S> p{z, x[col_u(i)], w_, x[col_f(i)], S(0), S(0)};
    for (int j = 0; j < k_; ++j) p[slot(j) == D::Y2 ? 5 : 4] = x[j];
    return p;
  }

  S r(const PartialIndex& p, const Point<S>& x) const { return table_[static_cast<std::size_t>(code(p))](x); }
  S r(std::initializer_list<D> ds, const Point<S>& x) const {
    PartialIndex p{};
    for (D d : ds) p = plus(p, d);
    return r(p, x);
  }

  Vec<S> residual(const S& z, const Vec<S>& x) const {
    Vec<S> g(n());
    for (int i = 0; i < k_; ++i) {
      Point<S> p = point(z, x, i);
      const S& u = x[col_u(i)];
      const S& f = x[col_f(i)];
      S lhs = ipow(u, k_) * f, lder = S(k_) * ipow(u, k_ - 1) * f;
      for (int j = 0; j < k_; ++j) {
        lhs += ipow(u, j) * x[j];
        if (j >= 1) lder += S(j) * ipow(u, j - 1) * x[j];
      }
      g[row_eq(i)] = lhs - r(PartialIndex{}, p);
      g[row_curve(i)] = ipow(u, k_) - r({D::Y0}, p);
      g[row_der(i)] = lder - r({D::U}, p);
    }
    return g;
  }

  Mat<S> jacobian(const S& z, const Vec<S>& x) const {
    Mat<S> jac = Mat<S>::Zero(n(), n());
    for (int i = 0; i < k_; ++i) {
      Point<S> p = point(z, x, i);
      const S& u = x[col_u(i)];
      const S& f = x[col_f(i)];
      const int re = row_eq(i), rc = row_curve(i), rd = row_der(i);
      const int cu = col_u(i), cf = col_f(i);
      S lder = S(k_) * ipow(u, k_ - 1) * f;
      for (int j = 1; j < k_; ++j) lder += S(j) * ipow(u, j - 1) * x[j];
      for (int j = 0; j < k_; ++j) {
        jac(re, j) = ipow(u, j) - r({slot(j)}, p);
        jac(rc, j) = -r({D::Y0, slot(j)}, p);
        jac(rd, j) = (j >= 1 ? S(j) * ipow(u, j - 1) : S(0)) - r({D::U, slot(j)}, p);
      }
      jac(re, cu) = lder - r({D::U}, p);
      jac(re, cf) = ipow(u, k_) - r({D::Y0}, p);
      jac(rc, cu) = S(k_) * ipow(u, k_ - 1) - r({D::U, D::Y0}, p);
      jac(rc, cf) = -r({D::Y0, D::Y0}, p);
      jac(rd, cu) = S(k_ * (k_ - 1)) * ipow(u, k_ - 2) * f - r({D::U, D::U}, p);
      jac(rd, cf) = S(k_) * ipow(u, k_ - 1) - r({D::U, D::Y0}, p);
    }
    return jac;
  }

  Vec<S> dz(const S& z, const Vec<S>& x) const {
    Vec<S> g(n());
    for (int i = 0; i < k_; ++i) {
      Point<S> p = point(z, x, i);
      g[row_eq(i)] = -r({D::Z}, p);
      g[row_curve(i)] = -r({D::Z, D::Y0}, p);
      g[row_der(i)] = -r({D::Z, D::U}, p);
    }
    return g;
  }

  // det of the (curve, derivative) x (u_i, f_i) block at root i.
  S det_b(const S& z, const Vec<S>& x, int i) const {
    Point<S> p = point(z, x, i);
    const S& u = x[col_u(i)];
    const S& f = x[col_f(i)];
    S a = S(k_) * ipow(u, k_ - 1) - r({D::U, D::Y0}, p);
    S b = r({D::Y0, D::Y0}, p);
    S c = S(k_ * (k_ - 1)) * ipow(u, k_ - 2) * f - r({D::U, D::U}, p);
    return a * a + b * c;
  }

  // Gradient of det B1 with respect to (z, x).
  Vec<S> grad_det_b1(const S& z, const Vec<S>& x) const {
    Point<S> p = point(z, x, 0);
    const S& u = x[col_u(0)];
    const S& f = x[col_f(0)];
    S a = S(k_) * ipow(u, k_ - 1) - r({D::U, D::Y0}, p);
    S b = r({D::Y0, D::Y0}, p);
    S c = S(k_ * (k_ - 1)) * ipow(u, k_ - 2) * f - r({D::U, D::U}, p);
    auto term = [&](D v, bool is_u, bool is_f) {
      S da = -r({D::U, D::Y0, v}, p);
      if (is_u) da += S(k_ * (k_ - 1)) * ipow(u, k_ - 2);
      S db = r({D::Y0, D::Y0, v}, p);
      S dc = -r({D::U, D::U, v}, p);
      if (is_u) dc += S(k_ * (k_ - 1) * (k_ - 2)) * ipow(u, k_ - 3) * f;
      if (is_f) dc += S(k_ * (k_ - 1)) * ipow(u, k_ - 2);
      return S(2) * a * da + db * c + b * dc;
    };
    Vec<S> g = Vec<S>::Zero(n() + 1);
    g[0] = term(D::Z, false, false);
    for (int j = 0; j < k_; ++j) g[1 + j] = term(slot(j), false, false);
    g[1 + col_u(0)] = term(D::U, true, false);
    g[1 + col_f(0)] = term(D::Y0, false, true);
    return g;
  }

  // M_j'(z) from the equation rows.
  Vec<S> section_derivatives(const S& z, const Vec<S>& x) const {
    Mat<S> a(k_, k_);
    Vec<S> rhs(k_);
    for (int i = 0; i < k_; ++i) {
      Point<S> p = point(z, x, i);
      for (int j = 0; j < k_; ++j) a(i, j) = ipow(x[col_u(i)], j) - r({slot(j)}, p);
      rhs[i] = r({D::Z}, p);
    }
    Vec<S> out;
    if (!solve_dense<S>(a, rhs, out)) fail(ErrorCode::DetAVanishes, "equation rows are singular");
    return out;
  }

 private:
  int k_;
  S w_;
  bool linear_;
  bool r_y0y0_zero_ = false;
  std::vector<HornerPoly<S>> table_;
};

template <class S>
Vec<S> to_vec(const Vec<double>& v) {
  Vec<S> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = S(v[i]);
  return out;
}

Vec<double> to_double_vec(const Vec<Extended>& v) {
  Vec<double> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]);
  return out;
}

// Damped Newton on G(z, .) = 0 at fixed z.
template <class S>
bool newton(const Bmj<S>& sys, const S& z, Vec<S>& x, double tol, int max_iter = 40) {
  Vec<S> g = sys.residual(z, x);
  double norm = max_norm(g);
  for (int it = 0; it < max_iter; ++it) {
    if (norm < tol) return true;
    Vec<S> dx;
    if (!solve_dense<S>(sys.jacobian(z, x), Vec<S>(-g), dx)) return false;
    S lambda(1);
    bool improved = false;
    for (int ls = 0; ls < 12; ++ls) {
      Vec<S> trial = x + lambda * dx;
      Vec<S> gt = sys.residual(z, trial);
      double nt = max_norm(gt);
      if (nt == nt && nt < norm) {
        x = trial;
        g = gt;
        norm = nt;
        improved = true;
        break;
      }
      lambda /= S(2);
    }
    if (!improved) return norm < tol;
  }
  return norm < tol;
}

// Newton on (G, det B1) = 0 with z unknown.
template <class S>
bool bordered_newton(const Bmj<S>& sys, S& z, Vec<S>& x, double tol_res, double tol_det, int max_iter = 60,
                     double* condition = nullptr) {
  const int n = sys.n();
  auto eval = [&](const S& zz, const Vec<S>& xx) {
    Vec<S> f(n + 1);
    f.head(n) = sys.residual(zz, xx);
    f[n] = sys.det_b(zz, xx, 0);
    return f;
  };
  auto converged = [&](const Vec<S>& f) {
    return max_norm(Vec<S>(f.head(n))) < tol_res && std::abs(to_f64(f[n])) < tol_det;
  };
  auto merit = [&](const Vec<S>& f) { return std::max(max_norm(Vec<S>(f.head(n))), std::abs(to_f64(f[n]))); };
  Vec<S> f = eval(z, x);
  for (int it = 0; it < max_iter && !converged(f); ++it) {
    Mat<S> jac(n + 1, n + 1);
    jac.block(0, 0, n, 1) = sys.dz(z, x);
    jac.block(0, 1, n, n) = sys.jacobian(z, x);
    jac.row(n) = sys.grad_det_b1(z, x).transpose();
    Vec<S> step;
    if (!solve_dense<S>(jac, Vec<S>(-f), step)) return false;
    double m0 = merit(f);
    S lambda(1);
    bool improved = false;
    for (int ls = 0; ls < 12; ++ls) {
      S zt = z + lambda * step[0];
      Vec<S> xt = x + lambda * step.tail(n);
      Vec<S> ft = eval(zt, xt);
      double mt = merit(ft);
      if (mt == mt && mt < m0) {
        z = zt;
        x = xt;
        f = ft;
        improved = true;
        break;
      }
      lambda /= S(2);
    }
    if (!improved) break;
  }
  if (condition) {
    Mat<double> jd(n + 1, n + 1);
    Mat<S> jac(n + 1, n + 1);
    jac.block(0, 0, n, 1) = sys.dz(z, x);
    jac.block(0, 1, n, n) = sys.jacobian(z, x);
    jac.row(n) = sys.grad_det_b1(z, x).transpose();
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) jd(i, j) = to_f64(jac(i, j));
    *condition = condition_number(jd);
  }
  return converged(f);
}

Bmj<double> make_system(const CatalyticEquation& eq, const NonlinearOptions& options) {
  if (eq.k != 1 && eq.k != 2) fail(ErrorCode::UnsupportedK, "k must be 1 or 2");
  Bmj<double> sys(eq, options.w);
  if (sys.linear()) fail(ErrorCode::NotNonlinear, "equation is linear");
  return sys;
}

double eval_bivariate(const BivariateSeries& s, double z, double u) {
  double acc = 0.0, zp = 1.0;
  for (const auto& row : s.coeffs) {
    double inner = 0.0;
    for (auto it = row.rbegin(); it != row.rend(); ++it) inner = inner * u + to_double(*it);
    acc += inner * zp;
    zp *= z;
  }
  return acc;
}

double eval_univariate(const UnivariateSeries& s, double z) {
  double acc = 0.0;
  for (auto it = s.coeffs.rbegin(); it != s.coeffs.rend(); ++it) acc = acc * z + to_double(*it);
  return acc;
}

bool admissible(const Bmj<double>& sys, double z, const Vec<double>& x) {
  if (sys.det_b(z, x, 0) <= 0.0) return false;
  if (sys.k() == 2) {
    if (sys.det_b(z, x, 1) <= 0.0) return false;
    if (!(x[sys.col_u(0)] > std::abs(x[sys.col_u(1)]))) return false;
  }
  return x[sys.col_u(0)] > 0.0;
}

PathPoint path_point(const Bmj<double>& sys, double z, const Vec<double>& x) {
  PathPoint p;
  p.state = state_from_vector(sys.k(), z, x);
  p.det_b1 = sys.det_b(z, x, 0);
  p.det_b2 = sys.k() == 2 ? sys.det_b(z, x, 1) : 1.0;
  return p;
}

// One predictor-corrector step. Returns nullopt when the step must shrink.
std::optional<Vec<double>> try_step(const Bmj<double>& sys, double z, const Vec<double>& x, double h, double tol) {
  Vec<double> dx;
  if (!solve_dense<double>(sys.jacobian(z, x), Vec<double>(-sys.dz(z, x)), dx)) return std::nullopt;
  Vec<double> pred = x + h * dx;
  Vec<double> corr = pred;
  if (!newton(sys, z + h, corr, tol)) return std::nullopt;
  const double scale = 1.0 + max_norm(x);
  if (max_norm(Vec<double>(corr - pred)) > 0.05 * scale) return std::nullopt;
  if (!admissible(sys, z + h, corr)) return std::nullopt;
  if (corr[sys.col_u(0)] < x[sys.col_u(0)]) return std::nullopt;
  return corr;
}

}  // namespace

Vec<double> state_vector(int k, const SystemState& s) {
  Vec<double> x(3 * k);
  if (k == 2) {
    x << s.m0, s.m1, s.u1, s.f1, s.u2, s.f2;
  } else {
    x << s.m0, s.u1, s.f1;
  }
  return x;
}

SystemState state_from_vector(int k, double z, const Vec<double>& x) {
  SystemState s;
  s.z = z;
  s.m0 = x[0];
  if (k == 2) {
    s.m1 = x[1];
    s.u1 = x[2];
    s.f1 = x[3];
    s.u2 = x[4];
    s.f2 = x[5];
  } else {
    s.u1 = x[1];
    s.f1 = x[2];
  }
  return s;
}

Vec<double> system_residual(const CatalyticEquation& eq, const SystemState& s, const NonlinearOptions& options) {
  Bmj<double> sys = make_system(eq, options);
  return sys.residual(s.z, state_vector(eq.k, s));
}

double residual_norm(const CatalyticEquation& eq, const SystemState& s, const NonlinearOptions& options) {
  return max_norm(system_residual(eq, s, options));
}

Mat<double> system_jacobian(const CatalyticEquation& eq, const SystemState& s, const NonlinearOptions& options) {
  Bmj<double> sys = make_system(eq, options);
  return sys.jacobian(s.z, state_vector(eq.k, s));
}

SystemState init_state(const CatalyticEquation& eq, double z_start, const NonlinearOptions& options) {
  Bmj<double> sys = make_system(eq, options);
  const int order = options.seed_order;
  SeriesOptions so;
  so.w = Rat(options.w);
  RForm rf(eq);
  SeriesWithExtras s = solve_series_with(eq, order, {rf.partial(pidx(0, 0, 1))}, so);
  Sections sec = extract_sections(s.m, eq.k);

  // Crude radius from the growth of M(z,1).
  double rho = 0.0;
  for (int n = order; n >= order / 2 && rho == 0.0; --n) {
    double total = 0.0;
    for (const Rat& c : s.m.coeffs[static_cast<std::size_t>(n)]) total += to_double(c);
    if (total > 0.0) rho = std::exp(-std::log(total) / n);
  }
  if (rho == 0.0) fail(ErrorCode::SeriesOrderTooLow, "seed series has no growth up to order " + std::to_string(order));
  if (z_start <= 0.0) z_start = 1e-3 * std::min(rho, 1.0);

  // Small roots of u^k = C(z_start, u), truncated in u.
  const std::size_t deg = std::min<std::size_t>(12, s.extras[0].max_u_degree());
  std::vector<double> poly(std::max<std::size_t>(deg, static_cast<std::size_t>(eq.k)) + 1, 0.0);
  double zp = 1.0;
  for (const auto& row : s.extras[0].coeffs) {
    for (std::size_t j = 0; j < row.size() && j <= deg; ++j) poly[j] -= to_double(row[j]) * zp;
    zp *= z_start;
  }
  poly[static_cast<std::size_t>(eq.k)] += 1.0;
  while (poly.size() > 1 && poly.back() == 0.0) poly.pop_back();
  std::vector<std::complex<double>> roots = polynomial_roots(poly);
  std::sort(roots.begin(), roots.end(), [](auto a, auto b) { return std::abs(a) < std::abs(b); });
  if (roots.size() < static_cast<std::size_t>(eq.k)) {
    fail(ErrorCode::SeriesOrderTooLow, "curve polynomial at z_start has fewer than k roots");
  }
  std::vector<double> us;
  for (int i = 0; i < eq.k; ++i) us.push_back(roots[static_cast<std::size_t>(i)].real());
  std::sort(us.begin(), us.end(), [](double a, double b) { return a > b; });

  Vec<double> x(sys.n());
  x[0] = eval_univariate(sec.m0, z_start);
  if (eq.k == 2) x[1] = eval_univariate(sec.m1, z_start);
  for (int i = 0; i < eq.k; ++i) {
    x[sys.col_u(i)] = us[static_cast<std::size_t>(i)];
    x[sys.col_f(i)] = eval_bivariate(sec.delta, z_start, us[static_cast<std::size_t>(i)]);
  }
  if (!newton(sys, z_start, x, options.tol_residual)) {
    fail(ErrorCode::NewtonDivergence, "initial state does not converge at z = " + std::to_string(z_start));
  }
  return state_from_vector(eq.k, z_start, x);
}

SystemState continue_state(const CatalyticEquation& eq, const SystemState& state, double z_target,
                           const NonlinearOptions& options, std::vector<PathPoint>* path) {
  Bmj<double> sys = make_system(eq, options);
  if (!(z_target > state.z)) fail(ErrorCode::InvalidArgument, "z_target must exceed the current z");
  double z = state.z;
  Vec<double> x = state_vector(eq.k, state);
  double h = std::min(z_target - z, 0.25 * z);
  while (z < z_target) {
    h = std::min(h, z_target - z);
    if (h < 1e-14 * z) fail(ErrorCode::StepUnderflow, "continuation stalls at z = " + std::to_string(z));
    auto next = try_step(sys, z, x, h, options.tol_residual);
    if (!next) {
      h *= 0.5;
      continue;
    }
    x = *next;
    z = (z_target - z <= h) ? z_target : z + h;
    if (path) path->push_back(path_point(sys, z, x));
    h *= 1.5;
  }
  return state_from_vector(eq.k, z, x);
}

JacobianBlocks jacobian_blocks(const CatalyticEquation& eq, const SystemState& state, const NonlinearOptions& options) {
  Bmj<double> sys = make_system(eq, options);
  Vec<double> x = state_vector(eq.k, state);
  Mat<double> jac = sys.jacobian(state.z, x);
  JacobianBlocks b;
  auto fill = [&](Mat2& m, int r0, int r1, int c0, int c1) {
    m[0][0] = jac(r0, c0);
    m[0][1] = jac(r0, c1);
    m[1][0] = jac(r1, c0);
    m[1][1] = jac(r1, c1);
  };
  auto det = [](const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; };
  if (eq.k == 2) {
    fill(b.a, 0, 1, 0, 1);
    fill(b.b1, 2, 3, 2, 3);
    fill(b.b2, 4, 5, 4, 5);
    fill(b.c1, 2, 3, 0, 1);
    fill(b.c2, 4, 5, 0, 1);
    b.det_a = det(b.a);
    b.det_b2 = det(b.b2);
  } else {
    b.a = {{{jac(0, 0), 0.0}, {0.0, 1.0}}};
    fill(b.b1, 1, 2, 1, 2);
    b.c1 = {{{jac(1, 0), 0.0}, {jac(2, 0), 0.0}}};
    b.b2 = {{{1.0, 0.0}, {0.0, 1.0}}};
    b.det_a = jac(0, 0);
    b.det_b2 = 1.0;
  }
  b.det_b1 = det(b.b1);
  return b;
}

Z0Result find_z0_nonlinear(const CatalyticEquation& eq, const NonlinearOptions& options) {
  Bmj<double> sys = make_system(eq, options);
  const int n = sys.n();
  SystemState s0 = init_state(eq, 0.0, options);
  Z0Result out;
  double z = s0.z;
  Vec<double> x = state_vector(eq.k, s0);
  out.path.push_back(path_point(sys, z, x));

  // March until the secant forecast of the det B1 root is close.
  double h = 0.25 * z;
  double forecast = 0.0;
  int steps = 0;
  while (true) {
    if (z > options.zmax) fail(ErrorCode::NoSingularityFound, "det B1 has no root below zmax");
    if (++steps > 20000) fail(ErrorCode::NoSingularityFound, "continuation did not approach a det B1 root");
    if (forecast > z) h = std::min(h, 0.5 * (forecast - z));
    if (h < 1e-13 * z) break;
    auto next = try_step(sys, z, x, h, options.tol_residual);
    if (!next) {
      h *= 0.5;
      continue;
    }
    z += h;
    x = *next;
    out.path.push_back(path_point(sys, z, x));
    h *= 1.5;
    const std::size_t m = out.path.size();
    if (m >= 2) {
      const PathPoint& a = out.path[m - 2];
      const PathPoint& b = out.path[m - 1];
      if (b.det_b1 < a.det_b1) {
        forecast = b.state.z + b.det_b1 * (b.state.z - a.state.z) / (a.det_b1 - b.det_b1);
        if (forecast - z < 1e-3 * forecast && m >= 4) break;
      } else {
        forecast = 0.0;
      }
    }
  }
  if (out.path.size() < 3 || !(forecast > z)) fail(ErrorCode::NoSingularityFound, "det B1 does not decrease");

  // Square-root ansatz from the last two points.
  const PathPoint& pa = out.path[out.path.size() - 2];
  const PathPoint& pb = out.path.back();
  Vec<double> xa = state_vector(eq.k, pa.state), xb = state_vector(eq.k, pb.state);
  const double ra = std::sqrt(forecast - pa.state.z), rb = std::sqrt(forecast - pb.state.z);
  Vec<double> xs = xb + (xb - xa) * (rb / (ra - rb));
  double zs = forecast;
  double cond = 0.0;
  bool ok = bordered_newton(sys, zs, xs, options.tol_residual, options.tol_detb1, 60, &cond);
  if (!ok) {
    zs = forecast;
    xs = xb;
    ok = bordered_newton(sys, zs, xs, options.tol_residual, options.tol_detb1, 80, &cond);
  }
  if (!ok) fail(ErrorCode::NewtonDivergence, "bordered Newton at the det B1 root did not converge");
  if (!(zs > pb.state.z)) fail(ErrorCode::NoSingularityFound, "det B1 root lies behind the continuation path");
  out.condition_full = cond;

  if (options.precision == Precision::DD || cond > 1e8) {
    Bmj<Extended> ext(eq, options.w);
    Extended ze(zs);
    Vec<Extended> xe = to_vec<Extended>(xs);
    if (bordered_newton(ext, ze, xe, 1e-28, 1e-28, 40)) {
      zs = static_cast<double>(ze);
      xs = to_double_vec(xe);
      out.extended_used = true;
    }
  }

  // Polish the equations without the curve row at u1, with u1 frozen.
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (i != sys.row_curve(0)) keep.push_back(i);
  std::vector<int> cols;
  for (int i = 0; i < n; ++i)
    if (i != sys.col_u(0)) cols.push_back(i);
  for (int it = 0; it < 8; ++it) {
    Vec<double> g = sys.residual(zs, xs);
    Mat<double> jac = sys.jacobian(zs, xs);
    Mat<double> sub(n - 1, n - 1);
    Vec<double> rhs(n - 1);
    for (int i = 0; i < n - 1; ++i) {
      rhs[i] = -g[keep[static_cast<std::size_t>(i)]];
      for (int j = 0; j < n - 1; ++j) sub(i, j) = jac(keep[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
    }
    if (it == 0) out.condition_five = condition_number(sub);
    if (max_norm(rhs) < 1e-15) break;
    Vec<double> step;
    if (!solve_dense<double>(sub, rhs, step)) break;
    Vec<double> trial = xs;
    for (int j = 0; j < n - 1; ++j) trial[cols[static_cast<std::size_t>(j)]] += step[j];
    if (max_norm(sys.residual(zs, trial)) > max_norm(g)) break;
    xs = trial;
  }

  out.z0 = zs;
  out.state = state_from_vector(eq.k, zs, xs);
  out.blocks = jacobian_blocks(eq, out.state, options);
  out.residual = max_norm(sys.residual(zs, xs));
  if (std::abs(out.blocks.det_a) <= 1e-6) fail(ErrorCode::DetAVanishes, "det A vanishes at z0");
  if (std::abs(out.blocks.det_b2) <= 1e-6) fail(ErrorCode::DetB2Vanishes, "det B2 vanishes at z0");
  return out;
}

SystemState solve_at_u1(const CatalyticEquation& eq, const Z0Result& fold, double u1, const NonlinearOptions& options) {
  Bmj<double> sys = make_system(eq, options);
  const int n = sys.n();
  const int cu = sys.col_u(0);
  double z = fold.z0;
  Vec<double> x = state_vector(eq.k, fold.state);
  const double u0 = x[cu];
  const int stages = 8;
  for (int st = 1; st <= stages; ++st) {
    x[cu] = u0 + (u1 - u0) * st / stages;
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      Vec<double> g = sys.residual(z, x);
      if (max_norm(g) < options.tol_residual) {
        ok = true;
        break;
      }
      Mat<double> jac = sys.jacobian(z, x);
      jac.col(cu) = sys.dz(z, x);
      Vec<double> step;
      if (!solve_dense<double>(jac, Vec<double>(-g), step)) break;
      double lambda = 1.0;
      const double n0 = max_norm(g);
      bool improved = false;
      for (int ls = 0; ls < 12; ++ls) {
        Vec<double> xt = x;
        for (int j = 0; j < n; ++j)
          if (j != cu) xt[j] += lambda * step[j];
        double zt = z + lambda * step[cu];
        if (max_norm(sys.residual(zt, xt)) < n0) {
          x = xt;
          z = zt;
          improved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!improved) {
        ok = max_norm(g) < 1e3 * options.tol_residual;
        break;
      }
    }
    if (!ok) fail(ErrorCode::NewtonDivergence, "no solution with u1 = " + std::to_string(x[cu]));
  }
  return state_from_vector(eq.k, z, x);
}

TReport compute_T(const CatalyticEquation& eq, const SystemState& s, const NonlinearOptions& options) {
  if (eq.k != 2) fail(ErrorCode::WrongK, "T is defined for k = 2");
  Bmj<double> sys(eq, options.w);
  if (sys.linear() || sys.r_y0y0_zero()) fail(ErrorCode::LinearEquation, "R_y0y0 vanishes identically");
  Vec<double> x = state_vector(2, s);
  Point<double> p = sys.point(s.z, x, 0);
  const double u = s.u1;
  const double ruy0 = sys.r({D::U, D::Y0}, p);
  const double ry0y0 = sys.r({D::Y0, D::Y0}, p);
  if (ry0y0 == 0.0) fail(ErrorCode::LinearEquation, "R_y0y0 vanishes at the state");
  const double a = 2.0 * u - ruy0;
  const double det = sys.det_b(s.z, x, 0);
  const double det_scale = a * a + std::abs(ry0y0 * (2.0 * s.f1 - sys.r({D::U, D::U}, p)));
  if (std::abs(det) > 1e-6 * std::max(det_scale, 1e-300)) {
    fail(ErrorCode::NotAtSingularity, "det B1 = " + std::to_string(det) + " at the given state");
  }
  TReport t;
  t.delta_u = a / ry0y0;
  const double d = t.delta_u;
  t.components[0] = sys.r({D::U, D::U, D::U}, p);
  t.components[1] = (3.0 * sys.r({D::U, D::U, D::Y0}, p) - 6.0) * d;
  t.components[2] = 3.0 * sys.r({D::U, D::Y0, D::Y0}, p) * d * d;
  t.components[3] = sys.r({D::Y0, D::Y0, D::Y0}, p) * d * d * d;
  t.value = t.components[0] + t.components[1] + t.components[2] + t.components[3];
  for (double c : t.components) t.scale += std::abs(c);
  t.inconclusive = std::abs(t.value) < 1e-6 * t.scale;
  return t;
}

double m0_derivative(const CatalyticEquation& eq, const SystemState& s, const NonlinearOptions& options) {
  Bmj<double> sys = make_system(eq, options);
  return sys.section_derivatives(s.z, state_vector(eq.k, s))[0];
}

ThreeHalvesExpansion expansion_three_halves(const CatalyticEquation& eq, const Z0Result& fold,
                                            const NonlinearOptions& options) {
  const double z0 = fold.z0;
  const double u0 = fold.state.u1;
  const double d0 = m0_derivative(eq, fold.state, options);
  // Curvature of z(u1) at the fold, from one probe.
  const double probe = 1e-3 * std::max(u0, 1e-3);
  SystemState sp = solve_at_u1(eq, fold, u0 - probe, options);
  const double beta = (z0 - sp.z) / (probe * probe);
  if (!(beta > 0.0)) fail(ErrorCode::FitUnstable, "fold curvature is not positive");
  std::vector<double> root_eps, psi;
  for (int m = 0; m < 10; ++m) {
    const double eps = 1e-2 * std::ldexp(1.0, -m);
    const double t = std::sqrt(eps * z0 / beta);
    SystemState s = solve_at_u1(eq, fold, u0 - t, options);
    const double e = 1.0 - s.z / z0;
    if (!(e > 0.0)) fail(ErrorCode::FitUnstable, "ladder point beyond z0");
    if (m < 3) continue;
    root_eps.push_back(std::sqrt(e));
    psi.push_back((d0 - m0_derivative(eq, s, options)) / std::sqrt(e));
  }
  const double full = extrapolate_to_zero(root_eps, psi);
  const double fewer = extrapolate_to_zero(std::vector<double>(root_eps.begin() + 1, root_eps.end()),
                                           std::vector<double>(psi.begin() + 1, psi.end()));
  const double shorter = extrapolate_to_zero(std::vector<double>(root_eps.begin(), root_eps.end() - 1),
                                             std::vector<double>(psi.begin(), psi.end() - 1));
  ThreeHalvesExpansion ex;
  ex.a0 = fold.state.m0;
  ex.a1 = z0 * d0;
  ex.b = 2.0 * z0 / 3.0 * full;
  ex.b_error = 2.0 * z0 / 3.0 * std::max(std::abs(full - fewer), std::abs(full - shorter));
  const double sqrt_pi = std::sqrt(M_PI);
  ex.c_standard = 3.0 * ex.b / (4.0 * sqrt_pi);
  ex.c_paper = ex.b / (2.0 * sqrt_pi);
  return ex;
}

K1Report k1_solve(const CatalyticEquation& eq, const NonlinearOptions& options) {
  if (eq.k != 1) fail(ErrorCode::WrongK, "k1_solve requires k = 1");
  K1Report rep;
  rep.fold = find_z0_nonlinear(eq, options);
  rep.alpha = 1.5;
  rep.expansion = expansion_three_halves(eq, rep.fold, options);
  return rep;
}

SplitCheck split_determinant_check(const CatalyticEquation& eq, const SystemState& s, const NonlinearOptions& options) {
  if (eq.k != 2) fail(ErrorCode::WrongK, "the split system needs two roots");
  Bmj<double> sys = make_system(eq, options);
  SplitCheck out;
  out.g = 0.5 * (s.u1 + s.u2);
  const double sq = 0.5 * (s.u1 - s.u2);
  out.h = sq * sq;
  const double fp = 0.5 * (s.f1 + s.f2);
  const double fm = (s.f1 - s.f2) / (2.0 * sq);
  // (curve+, curve-, der+, der-) as functions of (g, h, f+, f-).
  auto split = [&](const std::array<double, 4>& v) {
    const double r = std::sqrt(v[1]);
    Vec<double> x = state_vector(2, s);
    x[2] = v[0] + r;
    x[3] = v[2] + r * v[3];
    x[4] = v[0] - r;
    x[5] = v[2] - r * v[3];
    Vec<double> g = sys.residual(s.z, x);
    return std::array<double, 4>{0.5 * (g[2] + g[4]), (g[2] - g[4]) / (2.0 * r), 0.5 * (g[3] + g[5]),
                                 (g[3] - g[5]) / (2.0 * r)};
  };
  const std::array<double, 4> base{out.g, out.h, fp, fm};
  Eigen::Matrix4d jac;
  for (int j = 0; j < 4; ++j) {
    const double step = 1e-6 * std::max(std::abs(base[static_cast<std::size_t>(j)]), 1e-3);
    auto plus = base, minus = base;
    plus[static_cast<std::size_t>(j)] += step;
    minus[static_cast<std::size_t>(j)] -= step;
    auto fp_ = split(plus), fm_ = split(minus);
    for (int i = 0; i < 4; ++i) jac(i, j) = (fp_[static_cast<std::size_t>(i)] - fm_[static_cast<std::size_t>(i)]) / (2.0 * step);
  }
  out.det_split = jac.determinant();
  Vec<double> x = state_vector(2, s);
  out.predicted = sys.det_b(s.z, x, 0) * sys.det_b(s.z, x, 1) / (2.0 * out.h);
  return out;
}

}  // namespace catalytic
