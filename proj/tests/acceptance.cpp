#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "catalytic/asymptotics.hpp"
#include "catalytic/cli.hpp"
#include "catalytic/linear_solver.hpp"
#include "catalytic/nonlinear_solver.hpp"
#include "catalytic/series.hpp"
#include "catalytic/structure.hpp"
#include "oracles.hpp"

using namespace catalytic;

namespace {

// Collects the failed sub-checks of one criterion.
class Criterion {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failed_.push_back(what);
    notes_.push_back(what);
  }
  bool passed() const { return failed_.empty(); }
  std::string summary() const {
    std::ostringstream os;
    std::vector<std::string> list = failed_;
    if (list.empty()) {
      list = notes_;
      if (list.size() > 8) list = {list.back()};
    }
    for (std::size_t i = 0; i < list.size(); ++i) os << (i ? "; " : "") << list[i];
    return os.str();
  }

 private:
  std::vector<std::string> failed_, notes_;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

bool near_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }
bool near_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string run_cli(const std::vector<std::string>& args, int* code = nullptr) {
  std::vector<const char*> argv{"catalytic"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int c = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code) *code = c;
  return out.str() + err.str();
}

const ClassConstant* class_constant(const SingularityReport& r, int j) {
  for (const ClassConstant& c : r.constants) {
    if (c.j == j) return &c;
  }
  return nullptr;
}

void maps_exact(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  const std::string csv = run_cli({"coeffs", "maps", "--order", "20"}, &code);
  const double t = seconds_since(t0);
  c.expect(code == 0, "exit code " + std::to_string(code));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  bool exact = true;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string n, m0;
    std::getline(fields, n, ',');
    std::getline(fields, m0, ',');
    exact = exact && parse_rat(m0) == Rat(oracle::rooted_maps(std::stoi(n)));
    ++rows;
  }
  c.expect(rows == 21 && exact, std::to_string(rows) + " rows equal 2(2n)!3^n/((n+2)!n!)");
  c.expect(t < 5.0, "runtime " + num(t) + " s");
}

void maps_asymptotics(Criterion& c) {
  CatalyticEquation eq = oracle::fixture("maps");
  K1Report rep = k1_solve(eq);
  c.expect(near_abs(rep.fold.z0, 1.0 / 12.0, 1e-8), "z0 = " + num(rep.fold.z0));
  SectionSeries s = solve_sections(eq, 400);
  FitResult f = oracle_fit(s.m0, rep.fold.z0, 1.5, 1, 0);
  const double target = 2.0 / std::sqrt(M_PI);
  c.expect(near_rel(f.value, target, 1e-2), "c = " + num(f.value) + " vs 2/sqrt(pi) = " + num(target));
}

void lattice_paths(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  AnalyzeOptions opt;
  opt.order = 2000;
  SingularityReport r = analyze(oracle::fixture("lp12"), opt);
  const double t = seconds_since(t0);
  c.expect(near_abs(r.z0, 0.25, 1e-8), "z0 = " + num(r.z0));
  c.expect(near_abs(r.diagnostic("u1_z0").value_or(0.0), 1.0, 1e-8), "u1(z0) = " + num(r.diagnostic("u1_z0").value_or(0)));
  const double u2 = (std::sqrt(5.0) - 3.0) / 2.0;
  c.expect(near_abs(r.diagnostic("u2_z0").value_or(0.0), u2, 1e-8), "u2(z0) = " + num(r.diagnostic("u2_z0").value_or(0)));
  c.expect(r.alpha == 0.5 && r.d == 1, "alpha = " + num(r.alpha) + ", d = " + std::to_string(r.d));
  const double m0 = 6.0 - 2.0 * std::sqrt(5.0);
  c.expect(near_abs(r.diagnostic("M0_z0").value_or(0.0), m0, 1e-8), "M0(z0) = " + num(r.diagnostic("M0_z0").value_or(0)));
  const ClassConstant* c0 = class_constant(r, 0);
  const double target = (101.0 * std::sqrt(2.0) - 45.0 * std::sqrt(10.0)) / (38.0 * std::sqrt(M_PI));
  const double fit = c0 ? c0->value : 0.0;
  c.expect(near_rel(fit, target, 0.02), "c0 = " + num(fit) + " vs target " + num(target));
  c.expect(t < 30.0, "runtime " + num(t) + " s at N = 2000");
}

void constellations(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  CatalyticEquation eq = oracle::fixture("const3");
  Z0Result fold = find_z0_nonlinear(eq);
  c.expect(near_abs(fold.z0, 4.0 / 81.0, 1e-6), "z0 = " + num(fold.z0));
  const SystemState& s = fold.state;
  const double got[6] = {s.u1, s.u2, s.f1, s.f2, s.m1, s.m0};
  const double want[6] = {0.6867, -0.1562, 0.1070, 0.0433, 0.1134, 0.0833};
  const char* names[6] = {"u1", "u2", "f1", "f2", "M1", "M0"};
  for (int i = 0; i < 6; ++i) c.expect(near_abs(got[i], want[i], 1e-3), std::string(names[i]) + " = " + num(got[i]));
  c.expect(near_abs(fold.blocks.det_a, -0.2588, 1e-3), "det A = " + num(fold.blocks.det_a));
  c.expect(near_abs(fold.blocks.det_b2, 0.1828, 1e-3), "det B2 = " + num(fold.blocks.det_b2));
  TReport t = compute_T(eq, s);
  c.expect(near_rel(t.value, 2.7209, 1e-3), "T = " + num(t.value) + " vs 2.7209");
  AnalyzeOptions opt;
  opt.order = 300;
  SingularityReport r = analyze(eq, opt);
  c.expect(r.alpha == 1.5, "alpha = " + num(r.alpha));
  const ClassConstant* c0 = class_constant(r, 0);
  const double fit = c0 ? c0->value : 0.0;
  c.expect(near_rel(fit, 0.0731, 0.05), "c = " + num(fit) + " vs 0.0731");
  const double time = seconds_since(t0);
  c.expect(time < 60.0, "runtime " + num(time) + " s");
}

void central_limit(Criterion& c) {
  AnalyzeOptions opt;
  opt.order = 100;
  CltReport rep = clt(oracle::fixture("lp12_marked"), 0, opt);
  c.expect(near_abs(rep.mu, 0.25, 1e-3), "mu = " + num(rep.mu));
  const int n = 500;
  const double mean = oracle::mean_up_steps(n);
  c.expect(near_rel(mean, rep.mu * n, 0.02), "oracle mean " + num(mean) + " vs mu n = " + num(rep.mu * n));
}

const std::vector<oracle::RandomEquation>& random_set() {
  static const std::vector<oracle::RandomEquation> eqs = oracle::random_equations(20, 12345u);
  return eqs;
}

void positivity(Criterion& c) {
  int failures = 0;
  for (const auto& r : random_set()) {
    GHPair gh = solve_gh_series(r.eq, 40);
    bool ok = true;
    for (const Rat& x : gh.g.coeffs) ok = ok && sgn(x) >= 0;
    for (const Rat& x : gh.h.coeffs) ok = ok && sgn(x) >= 0;
    if (!ok) {
      ++failures;
      c.expect(false, r.eq.name + " has a negative coefficient: " + r.document);
    }
  }
  c.expect(failures == 0, std::to_string(random_set().size()) + " equations, " + std::to_string(failures) + " failures");
}

void jacobian_sanity(Criterion& c) {
  int tested = 0;
  double worst_slope = 0.0, worst_ratio = 0.0;
  for (const auto& r : random_set()) {
    if (classify(r.eq) != Linearity::Nonlinear) continue;
    ++tested;
    const std::string tag = r.eq.name + ": ";
    Z0Result fold;
    try {
      fold = find_z0_nonlinear(r.eq);
    } catch (const Error& e) {
      c.expect(false, tag + e.what());
      continue;
    }
    const std::size_t m = fold.path.size();
    bool positive = m >= 10;
    for (int i = 0; i < 10 && m >= 10; ++i) {
      const PathPoint& p = fold.path[static_cast<std::size_t>(i) * (m - 1) / 9];
      positive = positive && p.det_b1 > 0.0 && p.det_b2 > 0.0;
    }
    c.expect(positive, tag + "path determinants positive over " + std::to_string(m) + " points");
    try {
      std::vector<double> lx, ly;
      for (int i = 0; i < 10; ++i) {
        const double du = 1e-2 * std::max(fold.state.u1, 1e-2) * std::pow(0.6, i);
        SystemState s = solve_at_u1(r.eq, fold, fold.state.u1 - du);
        lx.push_back(std::log(du));
        ly.push_back(std::log(jacobian_blocks(r.eq, s).det_b1));
      }
      const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
      worst_slope = std::max(worst_slope, std::abs(slope - 1.0));
      c.expect(std::abs(slope - 1.0) <= 0.1, tag + "det B1 slope " + num(slope));
    } catch (const Error& e) {
      c.expect(false, tag + e.what());
    }
    SectionSeries s = solve_sections(r.eq, 150);
    Period p = support_period(s.m0);
    RatioEstimate est = ratio_test(s.m0, p.d, *p.residues.begin());
    const double rel = std::abs(est.z0 - fold.z0) / fold.z0;
    worst_ratio = std::max(worst_ratio, rel);
    c.expect(rel <= 1e-3, tag + "ratio z0 " + num(est.z0) + " vs " + num(fold.z0));
  }
  c.expect(tested > 0, std::to_string(tested) + " non-linear equations, worst |slope - 1| " + num(worst_slope) +
                           ", worst ratio deviation " + num(worst_ratio));
}

void degenerate_routing(Criterion& c) {
  CatalyticEquation eq = oracle::fixture("lp2");
  DegenerateCase dc = degenerate_route(eq);
  c.expect(dc.kind == DegenerateKind::EvenCurve, "route " + degenerate_name(dc.kind));
  AnalyzeOptions opt;
  opt.order = 200;
  SingularityReport r = analyze(eq, opt);
  c.expect(r.sub_reports.size() == 2, std::to_string(r.sub_reports.size()) + " sub-reports");
  const double z0 = r.sub_reports.empty() ? 0.0 : r.sub_reports.front().z0;
  c.expect(near_abs(z0, 0.5, 1e-10), "even part z0 = " + num(z0));
  c.expect(r.d == 2 && r.J == std::vector<int>{0}, "d = " + std::to_string(r.d));
  SectionSeries s = solve_sections(eq, 20);
  const auto walks = oracle::walk_counts({2, -2}, 20);
  bool exact = true;
  for (int m = 0; m <= 10; ++m) {
    const BigInt cat = oracle::catalan(m);
    exact = exact && walks[static_cast<std::size_t>(2 * m)][0] == cat &&
            s.m0.coeffs[static_cast<std::size_t>(2 * m)] == Rat(cat);
  }
  c.expect(exact, "E_2m = Catalan(m) for m <= 10");
}

void residue_classes(Criterion& c) {
  AnalyzeOptions opt;
  opt.order = 400;
  SectionSeries s;
  SingularityReport r = analyze(oracle::fixture("lp12_squared"), opt, &s);
  c.expect(r.d == 2, "d = " + std::to_string(r.d));
  c.expect(r.J == std::vector<int>{0}, "J has " + std::to_string(r.J.size()) + " classes");
  bool zero = true;
  for (std::size_t n = 1; n < s.m0.coeffs.size(); n += 2) zero = zero && s.m0.coeffs[n] == 0;
  const ClassConstant* odd = class_constant(r, 1);
  c.expect(zero && odd && odd->zero_class, "M_n = 0 for every odd n <= " + std::to_string(s.m0.order()));
}

void determinism(Criterion& c) {
  const std::vector<std::string> args = {"verify", "lp12", "lp12_marked", "lp12_squared", "lp2",
                                         "maps", "const3", "--order", "200"};
  int a_code = 0, b_code = 0;
  const std::string a = run_cli(args, &a_code);
  const std::string b = run_cli(args, &b_code);
  c.expect(a == b, std::to_string(a.size()) + " bytes, identical");
  c.expect(a_code == 0 && b_code == 0, "verify exit codes " + std::to_string(a_code) + ", " + std::to_string(b_code));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria = {
      {"planar maps exactness", maps_exact},
      {"planar maps asymptotics", maps_asymptotics},
      {"lattice paths", lattice_paths},
      {"3-constellations", constellations},
      {"central limit theorem", central_limit},
      {"positivity of g and h", positivity},
      {"Jacobian sanity", jacobian_sanity},
      {"degenerate routing", degenerate_routing},
      {"residue classes", residue_classes},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    if (!c.passed()) ++failed;
    std::printf("%s %2zu %s: %s\n", c.passed() ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                c.summary().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
