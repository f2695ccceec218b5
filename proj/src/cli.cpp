#include "catalytic/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "catalytic/error.hpp"
#include "catalytic/linear_solver.hpp"
#include "catalytic/report.hpp"
#include "catalytic/series.hpp"

#ifndef CATALYTIC_FIXTURE_DIR
#define CATALYTIC_FIXTURE_DIR "fixtures"
#endif

namespace catalytic {

bool VerifyResult::passed() const {
  for (const VerifyCheck& c : checks)
    if (!c.passed) return false;
  return true;
}

namespace {

std::string g10(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double eval_series(const UnivariateSeries& s, double z) {
  // Term by term in log scale: large orders overflow a plain Horner scheme.
  const double lz = std::log(z);
  double acc = 0.0;
  for (std::size_t n = s.coeffs.size(); n-- > 0;) {
    const Rat& c = s.coeffs[n];
    if (sgn(c) == 0) continue;
    acc += sgn(c) * std::exp(log_abs(c) + static_cast<double>(n) * lz);
  }
  return acc;
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

class Checks {
 public:
  explicit Checks(VerifyResult& r) : r_(r) {}
  void add(const std::string& name, bool passed, const std::string& detail) {
    r_.checks.push_back(VerifyCheck{name, passed, detail});
  }

 private:
  VerifyResult& r_;
};

void verify_series(const SingularityReport& rep, const SectionSeries& s, Checks& ck) {
  bool nonneg = true;
  for (const Rat& c : s.m0.coeffs) nonneg = nonneg && c >= 0;
  for (const Rat& c : s.m1.coeffs) nonneg = nonneg && c >= 0;
  ck.add("series_nonnegative", nonneg, "M0 and M1 up to z^" + std::to_string(s.m0.order()));
  const double rel = relative(rep.ratio_z0, rep.z0);
  ck.add("ratio_test_z0", rep.ratio_z0 > 0.0 && rel <= 1e-3,
         "ratio " + g10(rep.ratio_z0) + " vs " + g10(rep.z0) + " (relative " + g10(rel) + ")");
  ck.add("J_nonempty", !rep.J.empty(), "d = " + std::to_string(rep.d) + ", |J| = " + std::to_string(rep.J.size()));
  for (const ClassConstant& c : rep.constants) {
    const std::string tag = "class_" + std::to_string(c.j);
    const bool in_support = std::find(rep.residues.begin(), rep.residues.end(), c.j) != rep.residues.end();
    if (!in_support) {
      ck.add(tag + "_vanishes", c.zero_class, c.zero_class ? "all coefficients zero" : "nonzero coefficients");
      continue;
    }
    ck.add(tag + "_fit_converged", c.converged, "c = " + g10(c.value) + " +- " + g10(c.error));
    if (c.analytic) {
      ck.add(tag + "_analytic_vs_fit", *c.discrepancy <= 0.02,
             "analytic " + g10(*c.analytic) + ", relative discrepancy " + g10(*c.discrepancy));
    }
  }
}

void verify_linear(const CatalyticEquation& eq, const SingularityReport& rep, const SectionSeries& s,
                   const AnalyzeOptions& options, Checks& ck) {
  LinearOptions lo;
  lo.w = options.w;
  lo.zmax = options.zmax;
  lo.tol_residual = options.tol_residual;
  CurvePolynomial c = curve_polynomial(eq);
  CriticalPoint cp = find_z0_linear(c, lo);
  const double z = 0.5 * cp.z0;
  const double u1 = branch_u1(c, cp, z, lo);
  double u2 = 0.0;
  if (eq.k == 2) {
    const double u2z0 = second_branch(c, cp, lo);
    u2 = branch_u2(c, cp, u2z0, z, lo);
    ck.add("u2_bounded", std::abs(u2z0) < cp.u0 && std::abs(u2) <= u1,
           "u2(z0) = " + g10(u2z0) + ", u1(z0) = " + g10(cp.u0));
  }
  M01 m = solve_M01_linear(eq, z, u1, u2, lo);
  const double e0 = relative(m.m0, eval_series(s.m0, z));
  ck.add("kernel_M0_vs_series", e0 <= 1e-10, "relative difference " + g10(e0) + " at z0/2");
  if (eq.k == 2) {
    const double e1 = relative(m.m1, eval_series(s.m1, z));
    ck.add("kernel_M1_vs_series", e1 <= 1e-10, "relative difference " + g10(e1) + " at z0/2");
  }
  (void)rep;
}

void verify_nonlinear(const CatalyticEquation& eq, const SectionSeries& s, const AnalyzeOptions& options,
                      Checks& ck) {
  NonlinearOptions no;
  no.w = options.w;
  no.zmax = options.zmax;
  no.tol_residual = options.tol_residual;
  no.tol_detb1 = options.tol_detb1;
  no.precision = options.precision;
  Z0Result fold = find_z0_nonlinear(eq, no);
  ck.add("det_B1_vanishes", std::abs(fold.blocks.det_b1) < 1e-8, "det B1 = " + g10(fold.blocks.det_b1));
  ck.add("det_A_nonzero", std::abs(fold.blocks.det_a) > 1e-6, "det A = " + g10(fold.blocks.det_a));
  if (eq.k == 2) ck.add("det_B2_nonzero", std::abs(fold.blocks.det_b2) > 1e-6, "det B2 = " + g10(fold.blocks.det_b2));
  bool positive = true;
  for (const PathPoint& p : fold.path) positive = positive && p.det_b1 > 0.0 && p.det_b2 > 0.0;
  ck.add("path_determinants_positive", positive, std::to_string(fold.path.size()) + " continuation points");
  ck.add("five_equation_invertible", std::isfinite(fold.condition_five) && fold.condition_five < 1e12,
         "condition number " + g10(fold.condition_five));

  // Block entries against central differences of the residual map.
  SystemState st = fold.path[fold.path.size() / 2].state;
  Mat<double> jac = system_jacobian(eq, st, no);
  Vec<double> x = state_vector(eq.k, st);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
    Vec<double> xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    Vec<double> col = (system_residual(eq, state_from_vector(eq.k, st.z, xp), no) -
                       system_residual(eq, state_from_vector(eq.k, st.z, xm), no)) /
                      (2.0 * h);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      worst = std::max(worst, std::abs(col[i] - jac(i, j)) / std::max(1.0, std::abs(jac(i, j))));
    }
  }
  ck.add("jacobian_finite_difference", worst <= 1e-6, "max deviation " + g10(worst));

  // State against the coefficient series well inside the disc.
  const double zh = 0.5 * fold.z0;
  SystemState half = continue_state(eq, fold.path.front().state, zh, no);
  const double e0 = relative(half.m0, eval_series(s.m0, zh));
  ck.add("state_M0_vs_series", e0 <= 1e-8, "relative difference " + g10(e0) + " at z0/2");
  if (eq.k == 2) {
    TReport t = compute_T(eq, fold.state, no);
    ck.add("T_nonzero", !t.inconclusive, "T = " + g10(t.value));
    SplitCheck sc = split_determinant_check(eq, st, no);
    const double e = relative(sc.det_split, sc.predicted);
    ck.add("split_determinant_identity", e <= 1e-4,
           "det B' = " + g10(sc.det_split) + ", det B1 det B2 / (2h) = " + g10(sc.predicted));
  }
}

void verify_gh(const CatalyticEquation& eq, const AnalyzeOptions& options, Checks& ck) {
  SeriesOptions so;
  so.w = Rat(options.w);
  try {
    GHPair gh = solve_gh_series(eq, 30, so);
    ck.add("gh_nonnegative", true, "g, h up to z^30 with d = " + std::to_string(gh.d));
  } catch (const Error& e) {
    const bool benign = e.code() == ErrorCode::DegenerateEvenCurve || e.code() == ErrorCode::TrivialPuiseuxRoots;
    ck.add("gh_nonnegative", benign, benign ? std::string("not applicable: ") + e.what() : e.what());
  }
}

void verify_clt(const CatalyticEquation& eq, const AnalyzeOptions& options, Checks& ck) {
  CltOptions a, b;
  b.h = 5e-4;
  CltReport ra = clt(eq, 0, options, a);
  CltReport rb = clt(eq, 0, options, b);
  ck.add("clt_nonnegative", ra.mu >= 0.0 && ra.sigma2 >= 0.0, "mu = " + g10(ra.mu) + ", sigma2 = " + g10(ra.sigma2));
  const double dev = std::max(std::abs(ra.mu - rb.mu), std::abs(ra.sigma2 - rb.sigma2));
  ck.add("clt_step_stable", dev <= 1e-4, "change " + g10(dev) + " between h = 1e-3 and 5e-4");
}

}  // namespace

VerifyResult verify_equation(const CatalyticEquation& eq, const AnalyzeOptions& options) {
  VerifyResult res;
  Checks ck(res);
  SectionSeries s;
  SingularityReport rep;
  try {
    rep = analyze(eq, options, &s);
  } catch (const Error& e) {
    ck.add("analysis", false, e.what());
    return res;
  }
  ck.add("analysis", true, "route " + rep.route);
  res.inconclusive = rep.inconclusive;
  if (rep.inconclusive && s.m0.coeffs.empty()) return res;
  try {
    verify_series(rep, s, ck);
    const bool kernel = rep.linearity == "linear" &&
                        (rep.route == "linear" || rep.route == "linear-k1" ||
                         rep.degenerate_kind == "UDividesQ2PlusQ3" || rep.degenerate_kind == "UDividesQ3Only");
    if (kernel) verify_linear(eq, rep, s, options, ck);
    if (!rep.sub_reports.empty()) {
      const SingularityReport& lead = rep.sub_reports.front();
      ck.add("leading_part_classified", lead.z0 > 0.0 && !lead.inconclusive,
             lead.name + ": z0 = " + g10(lead.z0) + ", J size " + std::to_string(lead.J.size()));
    }
    if (rep.linearity == "nonlinear") verify_nonlinear(eq, s, options, ck);
    if (eq.k == 2) verify_gh(eq, options, ck);
    if (eq.has_mark) verify_clt(eq, options, ck);
  } catch (const Error& e) {
    ck.add("oracle_cross_check", false, e.what());
  }
  return res;
}

std::string resolve_equation_path(const std::string& arg) {
  namespace fs = std::filesystem;
  if (fs::exists(arg)) return arg;
  for (const std::string& cand : {std::string(CATALYTIC_FIXTURE_DIR) + "/" + arg,
                                  std::string(CATALYTIC_FIXTURE_DIR) + "/" + arg + ".json"}) {
    if (fs::exists(cand)) return cand;
  }
  fail(ErrorCode::IoError, "no such file or fixture: " + arg);
}

namespace {

struct RunConfig {
  int order = 400;
  double zmax = 1e3;
  double tol_residual = 1e-12;
  double tol_detb1 = 1e-10;
  std::string format;
  std::string precision = "f64";
  int j0 = 0;
  double h = 1e-3;
  std::vector<std::string> files;
};

AnalyzeOptions analyze_options(const RunConfig& c) {
  AnalyzeOptions o;
  o.order = c.order;
  o.zmax = c.zmax;
  o.tol_residual = c.tol_residual;
  o.tol_detb1 = c.tol_detb1;
  o.precision = c.precision == "dd" ? Precision::DD : Precision::F64;
  return o;
}

void emit(std::ostream& out, const Json& j, const std::string& text, const std::string& format) {
  if (format == "text") {
    out << text;
  } else {
    out << j.dump(2) << "\n";
  }
}

int cmd_coeffs(const RunConfig& c, std::ostream& out) {
  CatalyticEquation eq = load_equation(resolve_equation_path(c.files.at(0)));
  SectionSeries s = solve_sections(eq, c.order);
  if (c.format == "json") {
    Json j;
    j["schema"] = kReportSchema;
    j["kind"] = "coeffs";
    j["equation"] = {{"name", eq.name}, {"hash", canonical_hash(eq)}};
    j["M0"] = Json::array();
    j["M1"] = Json::array();
    for (const Rat& r : s.m0.coeffs) j["M0"].push_back(format_rat(r));
    for (const Rat& r : s.m1.coeffs) j["M1"].push_back(format_rat(r));
    out << j.dump(2) << "\n";
  } else {
    out << coefficients_csv(s);
  }
  return 0;
}

int cmd_classify(const RunConfig& c, std::ostream& out) {
  CatalyticEquation eq = load_equation(resolve_equation_path(c.files.at(0)));
  Json j = classify_json(eq);
  emit(out, j, j.dump(2) + "\n", c.format);
  return 0;
}

int cmd_analyze(const RunConfig& c, std::ostream& out) {
  CatalyticEquation eq = load_equation(resolve_equation_path(c.files.at(0)));
  SingularityReport rep = analyze(eq, analyze_options(c));
  emit(out, report_json(rep), report_text(rep), c.format);
  return rep.inconclusive ? 2 : 0;
}

int cmd_clt(const RunConfig& c, std::ostream& out) {
  CatalyticEquation eq = load_equation(resolve_equation_path(c.files.at(0)));
  CltOptions co;
  co.h = c.h;
  CltReport rep = clt(eq, c.j0, analyze_options(c), co);
  emit(out, clt_json(eq, rep), clt_text(rep), c.format);
  return 0;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  Json all;
  all["schema"] = kReportSchema;
  all["kind"] = "verify";
  all["series_order"] = c.order;
  all["equations"] = Json::array();
  std::ostringstream text;
  bool ok = true, inconclusive = false;
  for (const std::string& f : c.files) {
    CatalyticEquation eq = load_equation(resolve_equation_path(f));
    VerifyResult r = verify_equation(eq, analyze_options(c));
    ok = ok && r.passed();
    inconclusive = inconclusive || r.inconclusive;
    Json e{{"name", eq.name}, {"hash", canonical_hash(eq)}, {"passed", r.passed()}, {"inconclusive", r.inconclusive}};
    e["checks"] = Json::array();
    text << "== " << (eq.name.empty() ? f : eq.name) << " [" << canonical_hash(eq) << "]\n";
    for (const VerifyCheck& ch : r.checks) {
      e["checks"].push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
      text << (ch.passed ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << "\n";
    }
    all["equations"].push_back(e);
  }
  all["passed"] = ok;
  if (c.format == "json") {
    out << all.dump(2) << "\n";
  } else {
    out << text.str() << (ok ? "verify: all checks passed\n" : "verify: failures present\n");
  }
  if (!ok) return 1;
  return inconclusive ? 2 : 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solver and classifier for positive catalytic functional equations", "catalytic"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto common = [&](CLI::App* sub, bool many) {
    if (many) {
      sub->add_option("files", cfg.files, "Equation files or fixture names")->required();
    } else {
      sub->add_option("file", cfg.files, "Equation file or fixture name")->required()->expected(1);
    }
    sub->add_option("--order", cfg.order, "Series order")->check(CLI::NonNegativeNumber);
    sub->add_option("--zmax", cfg.zmax, "Continuation bound for z")->check(CLI::PositiveNumber);
    sub->add_option("--tol-residual", cfg.tol_residual, "Residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--tol-detb1", cfg.tol_detb1, "Tolerance on det B1 at z0")->check(CLI::PositiveNumber);
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text", "csv"}));
    sub->add_option("--precision", cfg.precision, "Arithmetic for the final polish")->check(CLI::IsMember({"f64", "dd"}));
  };
  CLI::App* coeffs = app.add_subcommand("coeffs", "Exact coefficients of M0 and M1 as CSV");
  CLI::App* classify_cmd = app.add_subcommand("classify", "Connectivity and degenerate-case report");
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Singularity report");
  CLI::App* clt_cmd = app.add_subcommand("clt", "Mean and variance of the marked parameter");
  CLI::App* verify = app.add_subcommand("verify", "Oracle cross-checks with pass/fail per invariant");
  common(coeffs, false);
  common(classify_cmd, false);
  common(analyze_cmd, false);
  common(clt_cmd, false);
  common(verify, true);
  clt_cmd->add_option("--residue", cfg.j0, "Residue class j0");
  clt_cmd->add_option("--step", cfg.h, "Stencil step h in s = log w")->check(CLI::PositiveNumber);

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[" << static_cast<int>(ErrorCode::InvalidArgument) << "] InvalidArgument: " << e.what() << "\n";
    return 1;
  }
  try {
    if (coeffs->parsed()) {
      if (cfg.format == "text") cfg.format = "csv";
      return cmd_coeffs(cfg, out);
    }
    if (cfg.format == "csv") fail(ErrorCode::InvalidArgument, "csv output is only available for coeffs");
    if (classify_cmd->parsed()) return cmd_classify(cfg, out);
    if (analyze_cmd->parsed()) return cmd_analyze(cfg, out);
    if (clt_cmd->parsed()) return cmd_clt(cfg, out);
    if (verify->parsed()) {
      if (cfg.format.empty()) cfg.format = "text";
      return cmd_verify(cfg, out);
    }
  } catch (const Error& e) {
    err << "error[" << static_cast<int>(e.code()) << "] " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error[" << static_cast<int>(ErrorCode::InvalidArgument) << "] " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace catalytic
