#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "catalytic/equation.hpp"
#include "catalytic/nonlinear_solver.hpp"
#include "catalytic/numeric.hpp"
#include "catalytic/series.hpp"
#include "catalytic/structure.hpp"

namespace catalytic {

enum class Method { Analytic, OracleFit, Both };
std::string method_name(Method m);

struct AnalyzeOptions {
  int order = 400;
  double w = 1.0;
  double zmax = 1e3;
  double tol_residual = 1e-12;
  double tol_detb1 = 1e-10;
  Precision precision = Precision::F64;
};

struct ClassConstant {
  int j = 0;
  double value = 0.0;  // oracle fit
  double error = 0.0;
  bool zero_class = false;
  bool converged = false;
  bool in_j = false;
  Method method = Method::OracleFit;
  std::optional<double> analytic;
  std::optional<double> discrepancy;  // |fit - analytic| / analytic
};

struct SingularityReport {
  std::string name;
  std::string hash;
  std::string route;  // linear, nonlinear, linear-k1, nonlinear-k1, degenerate:<kind>
  std::string linearity;
  double z0 = 0.0;
  Method z0_method = Method::Analytic;
  double ratio_z0 = 0.0, ratio_error = 0.0;
  double alpha = 0.5;
  int d = 1;
  std::vector<int> residues;  // support of M0 modulo d
  std::vector<int> J;
  std::vector<ClassConstant> constants;
  int order = 0;
  ConnectivityReport connectivity;
  std::string degenerate_kind = "None";
  std::string degenerate_description;
  // Named scalars: det_A, det_B2, T, u1_z0, u2_z0, M0_z0, M1_z0, b_M0, ...
  std::vector<std::pair<std::string, double>> diagnostics;
  // Candidate analytic constants with labels (3/2 case).
  std::vector<std::pair<std::string, double>> candidates;
  std::optional<SystemState> state;
  bool inconclusive = false;
  std::string inconclusive_reason;
  std::vector<SingularityReport> sub_reports;

  std::optional<double> diagnostic(const std::string& key) const;
};

// series_out, when given, receives the sections used for fitting.
SingularityReport analyze(const CatalyticEquation& eq, const AnalyzeOptions& options = {},
                          SectionSeries* series_out = nullptr);

// Dominant singularity at a fixed value of the mark.
double singularity_at(const CatalyticEquation& eq, double w, const AnalyzeOptions& options = {});

struct CltOptions {
  double h = 1e-3;
  bool require_mark = true;
  int support_order = 60;
};

struct CltReport {
  double mu = 0.0;
  double sigma2 = 0.0;
  std::vector<std::pair<double, double>> samples;  // (w, z0(w))
  int j0 = 0;
  double h = 1e-3;
};

CltReport clt(const CatalyticEquation& eq, int j0 = 0, const AnalyzeOptions& options = {}, const CltOptions& clt = {});

}  // namespace catalytic
