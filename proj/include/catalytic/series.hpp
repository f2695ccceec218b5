#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include "catalytic/equation.hpp"

namespace catalytic {

struct UnivariateSeries {
  std::vector<Rat> coeffs;
  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

// coeffs[n] holds the u-polynomial [z^n] as a dense vector without trailing zeros.
struct BivariateSeries {
  std::vector<std::vector<Rat>> coeffs;
  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  std::size_t max_u_degree() const;
};

struct SeriesOptions {
  // Value substituted for the mark variable w.
  Rat w = 1;
  // Largest u-degree allowed in full mode; exceeding it raises UDegreeCapExceeded.
  std::size_t u_degree_cap = 20000;
};

// Full bivariate solution M(z,u) up to z^N.
BivariateSeries solve_series(const CatalyticEquation& eq, int order, const SeriesOptions& options = {});

struct Sections {
  UnivariateSeries m0, m1;
  BivariateSeries delta;
};
// Splits M = u^k Delta + ... + M0. For k = 2 this is the u^2 Delta + u M1 + M0
// decomposition; for k = 1, Delta = (M - M0)/u and M1 is still [u^1]M.
Sections extract_sections(const BivariateSeries& m, int k = 2);

// M0 and M1 only. Drops every u-coefficient that cannot reach the sections
// by order N, and for linear equations also drops history that is no longer
// referenced, so long runs stay cheap.
struct SectionSeries {
  UnivariateSeries m0, m1;
};
SectionSeries solve_sections(const CatalyticEquation& eq, int order, const SeriesOptions& options = {});

// Full solution together with extra polynomials G(z,u,y0,y1,y2) evaluated on it.
struct SeriesWithExtras {
  BivariateSeries m;
  std::vector<BivariateSeries> extras;
};
SeriesWithExtras solve_series_with(const CatalyticEquation& eq, int order, const std::vector<Poly>& extras,
                                   const SeriesOptions& options = {});

// C(z,u) = R_{y0}(z,u,Delta,M1,M0) as a bivariate series.
BivariateSeries curve_series(const CatalyticEquation& eq, int order, const SeriesOptions& options = {});

struct GHPair {
  UnivariateSeries g, h;
  int d = 1;
  int d1 = 0, d2 = 0;
};
GHPair solve_gh_series(const CatalyticEquation& eq, int order, const SeriesOptions& options = {});
GHPair solve_gh_from_curve(const BivariateSeries& curve);

struct Period {
  int d = 1;
  std::set<int> residues;
};
Period support_period(const UnivariateSeries& s, int ignore_prefix = 0);

struct FitResult {
  double value = 0.0;
  double error = 0.0;
  bool zero_class = false;   // every coefficient in the class vanishes
  bool converged = true;     // false when the error estimate exceeds the threshold
  int used = 0;              // number of class indices considered
};
// Fits M_n ~ c n^{-1-alpha} z0^{-n} over n = j (mod d).
FitResult oracle_fit(const UnivariateSeries& coeffs, double z0, double alpha, int d, int j,
                     double threshold = 1e-2);

// Radius estimate from consecutive coefficient ratios in class j (mod d).
struct RatioEstimate {
  double z0 = 0.0;
  double error = 0.0;
};
RatioEstimate ratio_test(const UnivariateSeries& coeffs, int d, int j);

}  // namespace catalytic
