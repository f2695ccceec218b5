#include "catalytic/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "catalytic/error.hpp"

namespace catalytic {

namespace {

std::string fmt10(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

Json connectivity_json(const ConnectivityReport& c) {
  Json j;
  j["verdict"] = verdict_name(c.verdict);
  j["checks"] = Json::array();
  for (const Check& ch : c.checks) {
    j["checks"].push_back({{"name", ch.name}, {"passed", ch.passed}, {"witness", ch.witness}});
  }
  j["empirical_ok"] = c.empirical_ok;
  return j;
}

Json state_json(const SystemState& s) {
  return Json{{"z", number_json(s.z)},   {"u1", number_json(s.u1)}, {"u2", number_json(s.u2)},
              {"f1", number_json(s.f1)}, {"f2", number_json(s.f2)}, {"M1", number_json(s.m1)},
              {"M0", number_json(s.m0)}};
}

}  // namespace

Json number_json(double x) {
  if (!std::isfinite(x)) return nullptr;
  double r = std::strtod(fmt10(x).c_str(), nullptr);
  if (r == 0.0) r = 0.0;
  return r;
}

Json report_json(const SingularityReport& rep) {
  Json j;
  j["schema"] = kReportSchema;
  j["kind"] = "analyze";
  j["equation"] = {{"name", rep.name}, {"hash", rep.hash}};
  j["route"] = rep.route;
  j["linearity"] = rep.linearity;
  j["verdict"] = rep.inconclusive ? "Inconclusive" : "Classified";
  if (rep.inconclusive) j["inconclusive_reason"] = rep.inconclusive_reason;
  j["series_order"] = rep.order;
  j["z0"] = number_json(rep.z0);
  j["z0_method"] = method_name(rep.z0_method);
  j["ratio_z0"] = number_json(rep.ratio_z0);
  j["ratio_error"] = number_json(rep.ratio_error);
  j["alpha"] = number_json(rep.alpha);
  j["d"] = rep.d;
  j["residues"] = rep.residues;
  j["J"] = rep.J;
  j["constants"] = Json::array();
  for (const ClassConstant& c : rep.constants) {
    Json cj{{"j", c.j},
            {"value", number_json(c.value)},
            {"error", number_json(c.error)},
            {"zero_class", c.zero_class},
            {"converged", c.converged},
            {"in_J", c.in_j},
            {"method", method_name(c.method)}};
    if (c.analytic) cj["analytic"] = number_json(*c.analytic);
    if (c.discrepancy) cj["discrepancy"] = number_json(*c.discrepancy);
    j["constants"].push_back(cj);
  }
  if (!rep.candidates.empty()) {
    Json cands = Json::object();
    for (const auto& [label, v] : rep.candidates) cands[label] = number_json(v);
    j["analytic_candidates"] = cands;
  }
  if (rep.state) j["state"] = state_json(*rep.state);
  Json diag = Json::object();
  for (const auto& [k, v] : rep.diagnostics) diag[k] = number_json(v);
  j["diagnostics"] = diag;
  j["connectivity"] = connectivity_json(rep.connectivity);
  j["degenerate"] = {{"kind", rep.degenerate_kind}, {"description", rep.degenerate_description}};
  if (!rep.sub_reports.empty()) {
    j["sub_reports"] = Json::array();
    for (const SingularityReport& s : rep.sub_reports) j["sub_reports"].push_back(report_json(s));
  }
  return j;
}

Json clt_json(const CatalyticEquation& eq, const CltReport& rep) {
  Json j;
  j["schema"] = kReportSchema;
  j["kind"] = "clt";
  j["equation"] = {{"name", eq.name}, {"hash", canonical_hash(eq)}};
  j["mu"] = number_json(rep.mu);
  j["sigma2"] = number_json(rep.sigma2);
  j["h"] = number_json(rep.h);
  j["j0"] = rep.j0;
  j["samples"] = Json::array();
  for (const auto& [w, z0] : rep.samples) j["samples"].push_back({{"w", number_json(w)}, {"z0", number_json(z0)}});
  return j;
}

Json classify_json(const CatalyticEquation& eq) {
  Json j;
  j["schema"] = kReportSchema;
  j["kind"] = "classify";
  j["equation"] = {{"name", eq.name}, {"hash", canonical_hash(eq)}};
  j["k"] = eq.k;
  j["mode"] = eq.mode == Mode::Q ? "Q" : "R";
  j["has_mark"] = eq.has_mark;
  const bool linear = classify(eq) == Linearity::Linear;
  j["linearity"] = linear ? "linear" : "nonlinear";
  if (linear) {
    j["connectivity"] = connectivity_json(linear_connectivity(eq));
    if (eq.k == 2) {
      DegenerateCase dc = degenerate_route(eq);
      Json d{{"kind", degenerate_name(dc.kind)}, {"description", dc.description}};
      d["transformed"] = Json::array();
      for (const CatalyticEquation& t : dc.transformed) d["transformed"].push_back(Json::parse(canonical_form(t)));
      j["degenerate"] = d;
    }
  } else {
    j["connectivity"] = connectivity_json(nonlinear_necessary(eq));
  }
  return j;
}

std::string report_text(const SingularityReport& rep) {
  std::ostringstream os;
  os << "equation " << (rep.name.empty() ? "(unnamed)" : rep.name) << " [" << rep.hash << "]\n";
  os << "route " << rep.route << ", " << rep.linearity << "\n";
  if (rep.inconclusive) os << "verdict Inconclusive: " << rep.inconclusive_reason << "\n";
  os << "z0 = " << fmt10(rep.z0) << " (" << method_name(rep.z0_method) << ", ratio test " << fmt10(rep.ratio_z0)
     << ")\n";
  os << "alpha = " << fmt10(rep.alpha) << ", d = " << rep.d << ", J = {";
  for (std::size_t i = 0; i < rep.J.size(); ++i) os << (i ? "," : "") << rep.J[i];
  os << "}\n";
  for (const ClassConstant& c : rep.constants) {
    os << "c_" << c.j << " = " << fmt10(c.value) << " +- " << fmt10(c.error);
    if (c.zero_class) os << " (zero class)";
    if (c.analytic) os << ", analytic " << fmt10(*c.analytic);
    os << "\n";
  }
  for (const auto& [label, v] : rep.candidates) os << "candidate " << label << " = " << fmt10(v) << "\n";
  for (const auto& [k, v] : rep.diagnostics) os << k << " = " << fmt10(v) << "\n";
  for (const SingularityReport& s : rep.sub_reports) {
    std::istringstream in(report_text(s));
    std::string line;
    while (std::getline(in, line)) os << "  " << line << "\n";
  }
  return os.str();
}

std::string clt_text(const CltReport& rep) {
  std::ostringstream os;
  os << "mu = " << fmt10(rep.mu) << "\nsigma2 = " << fmt10(rep.sigma2) << "\n";
  for (const auto& [w, z0] : rep.samples) os << "z0(" << fmt10(w) << ") = " << fmt10(z0) << "\n";
  return os.str();
}

std::string coefficients_csv(const SectionSeries& s) {
  std::ostringstream os;
  os << "n,M0,M1\n";
  for (int n = 0; n <= s.m0.order(); ++n) {
    os << n << "," << format_rat(s.m0.coeffs[static_cast<std::size_t>(n)]) << ","
       << format_rat(s.m1.coeffs[static_cast<std::size_t>(n)]) << "\n";
  }
  return os.str();
}

}  // namespace catalytic
