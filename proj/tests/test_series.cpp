#include <doctest.h>

#include <cmath>

#include "catalytic/series.hpp"
#include "oracles.hpp"

using namespace catalytic;

namespace {

std::vector<Rat> column(const std::vector<std::vector<BigInt>>& walks, std::size_t height) {
  std::vector<Rat> out;
  for (const auto& row : walks) out.emplace_back(row[height]);
  return out;
}

}  // namespace

TEST_CASE("lp12 sections match the walk oracle") {
  const auto walks = oracle::walk_counts({1, -1, 2, -2}, 40);
  Sections full = extract_sections(solve_series(oracle::fixture("lp12"), 4), 2);
  CHECK(full.m0.coeffs == std::vector<Rat>{1, 0, 2, 2, 11});
  CHECK(full.m1.coeffs == std::vector<Rat>{0, 1, 1, 5, 11});
  SectionSeries s = solve_sections(oracle::fixture("lp12"), 40);
  CHECK(s.m0.coeffs == column(walks, 0));
  CHECK(s.m1.coeffs == column(walks, 1));
}

TEST_CASE("full solution counts walks by final height") {
  const auto walks = oracle::walk_counts({1, -1, 2, -2}, 12);
  BivariateSeries m = solve_series(oracle::fixture("lp12"), 12);
  for (int n = 0; n <= 12; ++n) {
    const auto& row = m.coeffs[static_cast<std::size_t>(n)];
    for (std::size_t h = 0; h < row.size(); ++h) CHECK(row[h] == Rat(walks[static_cast<std::size_t>(n)][h]));
  }
}

TEST_CASE("planar maps are exact") {
  SectionSeries s = solve_sections(oracle::fixture("maps"), 20);
  CHECK(s.m0.coeffs[0] == 1);
  CHECK(s.m0.coeffs[1] == 2);
  CHECK(s.m0.coeffs[2] == 9);
  CHECK(s.m0.coeffs[3] == 54);
  for (int n = 0; n <= 20; ++n) CHECK(s.m0.coeffs[static_cast<std::size_t>(n)] == Rat(oracle::rooted_maps(n)));
}

TEST_CASE("section solver agrees with the full solver") {
  for (const char* name : {"const3", "lp2", "maps", "lp12_squared"}) {
    CatalyticEquation eq = oracle::fixture(name);
    Sections full = extract_sections(solve_series(eq, 16), eq.k);
    SectionSeries s = solve_sections(eq, 16);
    CHECK(full.m0.coeffs == s.m0.coeffs);
    CHECK(full.m1.coeffs == s.m1.coeffs);
  }
}

TEST_CASE("zero equation") {
  CatalyticEquation eq = parse_equation(R"({"k": 2, "terms": [], "f0_terms": []})");
  SectionSeries s = solve_sections(eq, 10);
  for (const Rat& c : s.m0.coeffs) CHECK(c == 0);
}

TEST_CASE("sections of 1 + zu") {
  BivariateSeries m;
  m.coeffs = {{Rat(1)}, {Rat(0), Rat(1)}};
  Sections s = extract_sections(m, 2);
  CHECK(s.m0.coeffs == std::vector<Rat>{1, 0});
  CHECK(s.m1.coeffs == std::vector<Rat>{0, 1});
  for (const auto& row : s.delta.coeffs) CHECK(row.empty());
}

TEST_CASE("u-degree cap") {
  SeriesOptions opt;
  opt.u_degree_cap = 5;
  CHECK(oracle::error_code([&] { solve_series(oracle::fixture("lp12"), 10, opt); }) ==
        ErrorCode::UDegreeCapExceeded);
}

TEST_CASE("mark specialisation") {
  CatalyticEquation marked = oracle::fixture("lp12_marked");
  SeriesOptions opt;
  opt.w = 1;
  CHECK(solve_sections(marked, 20, opt).m0.coeffs == solve_sections(oracle::fixture("lp12"), 20).m0.coeffs);
  opt.w = 0;
  // w = 0 removes the +1 steps.
  SectionSeries s = solve_sections(marked, 10, opt);
  const auto walks = oracle::walk_counts({-1, 2, -2}, 10);
  for (int n = 0; n <= 10; ++n) CHECK(s.m0.coeffs[static_cast<std::size_t>(n)] == Rat(walks[static_cast<std::size_t>(n)][0]));
}

TEST_CASE("g and h are non-negative for lp12") {
  GHPair gh = solve_gh_series(oracle::fixture("lp12"), 30);
  CHECK(gh.d == 1);
  for (const Rat& c : gh.g.coeffs) CHECK(sgn(c) >= 0);
  for (const Rat& c : gh.h.coeffs) CHECK(sgn(c) >= 0);
}

TEST_CASE("g and h from a toy curve vanish at zero") {
  BivariateSeries curve;
  curve.coeffs = {{}, {Rat(1), Rat(0), Rat(0), Rat(1)}};
  GHPair gh = solve_gh_from_curve(curve);
  REQUIRE_FALSE(gh.g.coeffs.empty());
  CHECK(gh.g.coeffs[0] == 0);
  CHECK(gh.h.coeffs[0] == 0);
}

TEST_CASE("even curve is rejected by the g/h solver") {
  CHECK(oracle::error_code([] { solve_gh_series(oracle::fixture("lp2"), 20); }) == ErrorCode::DegenerateEvenCurve);
}

TEST_CASE("support period") {
  SectionSeries lp2 = solve_sections(oracle::fixture("lp2"), 40);
  Period p = support_period(lp2.m0);
  CHECK(p.d == 2);
  CHECK(p.residues == std::set<int>{0});
  for (int m = 0; m <= 20; ++m) CHECK(lp2.m0.coeffs[static_cast<std::size_t>(2 * m)] == Rat(oracle::catalan(m)));

  CHECK(support_period(solve_sections(oracle::fixture("lp12"), 40).m0).d == 1);

  UnivariateSeries ones;
  ones.coeffs.assign(30, Rat(1));
  Period q = support_period(ones);
  CHECK(q.d == 1);
  CHECK(q.residues == std::set<int>{0});
}

TEST_CASE("oracle fit on a geometric sequence") {
  UnivariateSeries g;
  Rat c = 2;
  for (int n = 0; n <= 80; ++n, c *= 3) g.coeffs.push_back(c);
  FitResult f = oracle_fit(g, 1.0 / 3.0, -1.0, 1, 0);
  CHECK(f.value == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f.converged);
  RatioEstimate r = ratio_test(g, 1, 0);
  CHECK(r.z0 == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("oracle fit for planar maps") {
  SectionSeries s = solve_sections(oracle::fixture("maps"), 400);
  FitResult f = oracle_fit(s.m0, 1.0 / 12.0, 1.5, 1, 0);
  CHECK(f.converged);
  CHECK(f.value == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-2));
  CHECK(ratio_test(s.m0, 1, 0).z0 == doctest::Approx(1.0 / 12.0).epsilon(1e-6));
}

TEST_CASE("oracle fit for lp12") {
  SectionSeries s = solve_sections(oracle::fixture("lp12"), 1000);
  FitResult f = oracle_fit(s.m0, 0.25, 0.5, 1, 0);
  const double exact = (12.0 / std::sqrt(5.0) - 4.0) / (2.0 * std::sqrt(M_PI));
  CHECK(f.converged);
  CHECK(f.value == doctest::Approx(exact).epsilon(1e-5));
}

TEST_CASE("zero class is flagged") {
  SectionSeries s = solve_sections(oracle::fixture("lp2"), 200);
  FitResult odd = oracle_fit(s.m0, 0.5, 0.5, 2, 1);
  CHECK(odd.zero_class);
  FitResult even = oracle_fit(s.m0, 0.5, 0.5, 2, 0);
  CHECK_FALSE(even.zero_class);
  CHECK(even.value > 0.0);
}
