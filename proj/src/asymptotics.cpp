#include "catalytic/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "catalytic/error.hpp"
#include "catalytic/linear_solver.hpp"
#include "catalytic/series.hpp"

namespace catalytic {

std::string method_name(Method m) {
  switch (m) {
    case Method::Analytic: return "Analytic";
    case Method::OracleFit: return "OracleFit";
    case Method::Both: return "Both";
  }
  return "Analytic";
}

std::optional<double> SingularityReport::diagnostic(const std::string& key) const {
  for (const auto& [k, v] : diagnostics)
    if (k == key) return v;
  return std::nullopt;
}

namespace {

NonlinearOptions nonlinear_options(const AnalyzeOptions& o) {
  NonlinearOptions n;
  n.w = o.w;
  n.zmax = o.zmax;
  n.tol_residual = o.tol_residual;
  n.tol_detb1 = o.tol_detb1;
  n.precision = o.precision;
  return n;
}

LinearOptions linear_options(const AnalyzeOptions& o) {
  LinearOptions l;
  l.w = o.w;
  l.zmax = o.zmax;
  l.tol_residual = o.tol_residual;
  return l;
}

// Kernel pipeline; returns b/(2 sqrt(pi)) for an aperiodic M0.
double linear_pipeline(const CatalyticEquation& eq, const AnalyzeOptions& options, SingularityReport& rep) {
  LinearOptions lo = linear_options(options);
  CurvePolynomial c = curve_polynomial(eq);
  CriticalPoint cp = find_z0_linear(c, lo);
  rep.z0 = cp.z0;
  rep.alpha = 0.5;
  rep.diagnostics.emplace_back("u1_z0", cp.u0);
  rep.diagnostics.emplace_back("critical_residual", cp.residual);
  SingularExpansion se = local_expansion_linear(eq, cp, lo);
  if (eq.k == 2) rep.diagnostics.emplace_back("u2_z0", second_branch(c, cp, lo));
  rep.diagnostics.emplace_back("M0_z0", se.a_m0);
  rep.diagnostics.emplace_back("M1_z0", se.a_m1);
  rep.diagnostics.emplace_back("b_M0", se.b_m0);
  rep.diagnostics.emplace_back("b_M1", se.b_m1);
  rep.diagnostics.emplace_back("b_error", se.b_error);
  return se.c;
}

void nonlinear_pipeline(const CatalyticEquation& eq, const AnalyzeOptions& options, SingularityReport& rep) {
  NonlinearOptions no = nonlinear_options(options);
  Z0Result fold = find_z0_nonlinear(eq, no);
  rep.z0 = fold.z0;
  rep.alpha = 1.5;
  rep.state = fold.state;
  rep.diagnostics.emplace_back("det_A", fold.blocks.det_a);
  rep.diagnostics.emplace_back("det_B1", fold.blocks.det_b1);
  if (eq.k == 2) rep.diagnostics.emplace_back("det_B2", fold.blocks.det_b2);
  rep.diagnostics.emplace_back("residual", fold.residual);
  rep.diagnostics.emplace_back("condition_bordered", fold.condition_full);
  rep.diagnostics.emplace_back("condition_five", fold.condition_five);
  rep.diagnostics.emplace_back("extended_precision", fold.extended_used ? 1.0 : 0.0);
  if (eq.k == 2) {
    TReport t = compute_T(eq, fold.state, no);
    rep.diagnostics.emplace_back("T", t.value);
    rep.diagnostics.emplace_back("delta_u", t.delta_u);
    rep.diagnostics.emplace_back("T_scale", t.scale);
    if (t.inconclusive) {
      rep.inconclusive = true;
      rep.inconclusive_reason = "T vanishes within tolerance";
    }
  }
  ThreeHalvesExpansion ex = expansion_three_halves(eq, fold, no);
  rep.diagnostics.emplace_back("M0_z0", ex.a0);
  rep.diagnostics.emplace_back("b_M0", ex.b);
  rep.diagnostics.emplace_back("b_error", ex.b_error);
  rep.candidates.emplace_back("three_over_four_sqrt_pi", ex.c_standard);
  rep.candidates.emplace_back("one_over_two_sqrt_pi", ex.c_paper);
}

void fit_classes(const CatalyticEquation& eq, const AnalyzeOptions& options, SingularityReport& rep,
                 std::optional<double> analytic_unit, SectionSeries* series_out) {
  SeriesOptions so;
  so.w = Rat(options.w);
  SectionSeries s = solve_sections(eq, options.order, so);
  if (series_out) *series_out = s;
  Period p = support_period(s.m0);
  rep.d = p.d;
  rep.residues.assign(p.residues.begin(), p.residues.end());
  const int j_ratio = *p.residues.begin();
  try {
    RatioEstimate r = ratio_test(s.m0, p.d, j_ratio);
    rep.ratio_z0 = r.z0;
    rep.ratio_error = r.error;
    if (std::abs(r.z0 - rep.z0) <= 1e-3 * rep.z0) rep.z0_method = Method::Both;
  } catch (const Error&) {
    rep.ratio_z0 = 0.0;
  }
  for (auto& [label, value] : rep.candidates) value *= p.d;
  for (int j = 0; j < p.d; ++j) {
    ClassConstant cc;
    cc.j = j;
    FitResult f = oracle_fit(s.m0, rep.z0, rep.alpha, p.d, j);
    cc.value = f.value;
    cc.error = f.error;
    cc.zero_class = f.zero_class;
    cc.converged = f.converged;
    cc.in_j = !f.zero_class && f.value > 5.0 * f.error;
    if (analytic_unit && p.residues.size() == 1 && p.residues.count(j)) {
      cc.analytic = p.d * *analytic_unit;
      cc.method = Method::Both;
      cc.discrepancy = std::abs(cc.value - *cc.analytic) / std::abs(*cc.analytic);
    }
    if (cc.in_j) rep.J.push_back(j);
    rep.constants.push_back(cc);
  }
  if (rep.J.empty() && !rep.inconclusive) {
    rep.inconclusive = true;
    rep.inconclusive_reason = "no residue class has a positive constant";
  }
}

SingularityReport analyze_at_depth(const CatalyticEquation& eq, const AnalyzeOptions& options, int depth,
                                   SectionSeries* series_out) {
  if (depth > 3) fail(ErrorCode::RecursionTooDeep, "degenerate routes nest too deeply");
  if (options.order < 50) fail(ErrorCode::SeriesOrderTooLow, "series order must be at least 50 for fitting");
  SingularityReport rep;
  rep.name = eq.name;
  rep.hash = canonical_hash(eq);
  rep.order = options.order;
  const bool linear = classify(eq) == Linearity::Linear;
  rep.linearity = linear ? "linear" : "nonlinear";
  std::optional<double> analytic;

  if (linear) {
    rep.connectivity = linear_connectivity(eq);
    DegenerateCase dc;
    if (eq.k == 2) dc = degenerate_route(eq);
    rep.degenerate_kind = degenerate_name(dc.kind);
    rep.degenerate_description = dc.description;
    const bool split = (dc.kind == DegenerateKind::EvenCurve || dc.kind == DegenerateKind::Q1uZero);
    if (split && !dc.transformed.empty()) {
      rep.route = "degenerate:" + degenerate_name(dc.kind);
      for (const CatalyticEquation& sub : dc.transformed) {
        try {
          rep.sub_reports.push_back(analyze_at_depth(sub, options, depth + 1, nullptr));
        } catch (const Error& e) {
          if (rep.sub_reports.empty()) throw;
          SingularityReport trivial;
          trivial.name = sub.name;
          trivial.hash = canonical_hash(sub);
          trivial.route = "unavailable";
          trivial.linearity = rep.linearity;
          trivial.order = options.order;
          trivial.inconclusive = true;
          trivial.inconclusive_reason = e.what();
          rep.sub_reports.push_back(trivial);
        }
      }
      const SingularityReport& lead = rep.sub_reports.front();
      rep.z0 = lead.z0;
      rep.alpha = lead.alpha;
      rep.diagnostics = lead.diagnostics;
      if (dc.kind == DegenerateKind::EvenCurve) {
        // The even part has the same M0 series.
        for (const ClassConstant& cc : lead.constants)
          if (cc.analytic) analytic = *cc.analytic / lead.d;
      }
    } else if (split) {
      rep.route = "degenerate:" + degenerate_name(dc.kind);
      rep.inconclusive = true;
      rep.inconclusive_reason = dc.description;
      return rep;
    } else {
      rep.route = dc.kind == DegenerateKind::None ? (eq.k == 2 ? "linear" : "linear-k1")
                                                  : "degenerate:" + degenerate_name(dc.kind);
      analytic = linear_pipeline(eq, options, rep);
    }
    if (rep.connectivity.verdict == Verdict::Failed && dc.kind == DegenerateKind::None) {
      rep.inconclusive = true;
      rep.inconclusive_reason = "linear connectivity checks failed";
    }
  } else {
    rep.route = eq.k == 2 ? "nonlinear" : "nonlinear-k1";
    rep.connectivity = nonlinear_necessary(eq);
    if (rep.connectivity.verdict == Verdict::Failed) {
      rep.inconclusive = true;
      rep.inconclusive_reason = "necessary connectivity conditions fail";
      return rep;
    }
    if (!rep.connectivity.empirical_ok) {
      rep.inconclusive = true;
      rep.inconclusive_reason = "empirical support check failed";
    }
    nonlinear_pipeline(eq, options, rep);
  }
  fit_classes(eq, options, rep, analytic, series_out);
  return rep;
}

}  // namespace

SingularityReport analyze(const CatalyticEquation& eq, const AnalyzeOptions& options, SectionSeries* series_out) {
  return analyze_at_depth(eq, options, 0, series_out);
}

double singularity_at(const CatalyticEquation& eq, double w, const AnalyzeOptions& options) {
  AnalyzeOptions o = options;
  o.w = w;
  if (classify(eq) == Linearity::Nonlinear) return find_z0_nonlinear(eq, nonlinear_options(o)).z0;
  if (eq.k == 2) {
    DegenerateCase dc = degenerate_route(eq);
    if (dc.kind == DegenerateKind::Q1uZero && !dc.transformed.empty()) return singularity_at(dc.transformed[0], w, o);
  }
  return find_z0_linear(curve_polynomial(eq), linear_options(o)).z0;
}

CltReport clt(const CatalyticEquation& eq, int j0, const AnalyzeOptions& options, const CltOptions& co) {
  if (co.require_mark && !eq.has_mark) fail(ErrorCode::MarkMissing, "the equation does not contain the mark w");
  if (!(co.h > 0.0)) fail(ErrorCode::InvalidArgument, "stencil step must be positive");
  SectionSeries s = solve_sections(eq, co.support_order);
  Period p = support_period(s.m0);
  if (!p.residues.count(((j0 % p.d) + p.d) % p.d)) {
    fail(ErrorCode::InvalidArgument, "residue " + std::to_string(j0) + " is not in the support of M0");
  }
  CltReport rep;
  rep.j0 = j0;
  rep.h = co.h;
  std::array<double, 5> f{};
  for (int i = -2; i <= 2; ++i) {
    const double w = std::exp(i * co.h);
    double z0 = 0.0;
    try {
      z0 = singularity_at(eq, w, options);
    } catch (const Error& e) {
      fail(ErrorCode::StencilFailure, "stencil point w = " + std::to_string(w) + ": " + e.what());
    }
    rep.samples.emplace_back(w, z0);
    f[static_cast<std::size_t>(i + 2)] = std::log(z0);
  }
  const double h = co.h;
  const double d1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
  const double d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
  rep.mu = -d1;
  rep.sigma2 = -d2;
  const double noise = 1e-7;
  if (rep.mu < -noise || rep.sigma2 < -noise) {
    fail(ErrorCode::StencilFailure, "negative mean or variance from the stencil");
  }
  rep.mu = rep.mu > 0.0 ? rep.mu : 0.0;
  rep.sigma2 = rep.sigma2 > 0.0 ? rep.sigma2 : 0.0;
  return rep;
}

}  // namespace catalytic
