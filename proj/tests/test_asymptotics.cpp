#include <doctest.h>

#include <cmath>

#include "catalytic/asymptotics.hpp"
#include "oracles.hpp"

using namespace catalytic;

namespace {

AnalyzeOptions order(int n) {
  AnalyzeOptions o;
  o.order = n;
  return o;
}

const ClassConstant* constant(const SingularityReport& r, int j) {
  for (const ClassConstant& c : r.constants) {
    if (c.j == j) return &c;
  }
  return nullptr;
}

// Fold of u^2 = z P(u), P = w u^3 + u^4 + u + 1: 2P = u P' at the critical point.
double lp12_marked_z0(double w) {
  auto g = [w](double u) { return -w * u * u * u - 2.0 * u * u * u * u + u + 2.0; };
  double lo = 0.0, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  const double u = 0.5 * (lo + hi);
  return u * u / (w * u * u * u + u * u * u * u + u + 1.0);
}

}  // namespace

TEST_CASE("analyze lp12") {
  SingularityReport r = analyze(oracle::fixture("lp12"), order(1000));
  CHECK(r.route == "linear");
  CHECK_FALSE(r.inconclusive);
  CHECK(r.z0 == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(r.z0_method == Method::Both);
  CHECK(r.alpha == 0.5);
  CHECK(r.d == 1);
  CHECK(r.J == std::vector<int>{0});
  const ClassConstant* c = constant(r, 0);
  REQUIRE(c != nullptr);
  REQUIRE(c->analytic.has_value());
  CHECK(c->method == Method::Both);
  CHECK(*c->discrepancy < 0.02);
  CHECK(c->value == doctest::Approx((12.0 / std::sqrt(5.0) - 4.0) / (2.0 * std::sqrt(M_PI))).epsilon(1e-4));
  CHECK(*r.diagnostic("u2_z0") == doctest::Approx((std::sqrt(5.0) - 3.0) / 2.0).epsilon(1e-10));
  CHECK(*r.diagnostic("M0_z0") == doctest::Approx(6.0 - 2.0 * std::sqrt(5.0)).epsilon(1e-9));
  CHECK_FALSE(r.diagnostic("T").has_value());
}

TEST_CASE("analyze lp2 through the even route") {
  SingularityReport r = analyze(oracle::fixture("lp2"), order(400));
  CHECK(r.route == "degenerate:EvenCurve");
  CHECK(r.sub_reports.size() == 2);
  CHECK(r.d == 2);
  CHECK(r.J == std::vector<int>{0});
  CHECK(r.z0 == doctest::Approx(0.5).epsilon(1e-10));
  const ClassConstant* even = constant(r, 0);
  const ClassConstant* odd = constant(r, 1);
  REQUIRE(even != nullptr);
  REQUIRE(odd != nullptr);
  CHECK(odd->zero_class);
  // Catalan(m) ~ 4^m m^{-3/2} / sqrt(pi) at n = 2m: c = 2^{3/2} / sqrt(pi).
  CHECK(even->value == doctest::Approx(std::pow(2.0, 1.5) / std::sqrt(M_PI)).epsilon(1e-3));
}

TEST_CASE("analyze a period two fixture") {
  SingularityReport r = analyze(oracle::fixture("lp12_squared"), order(400));
  CHECK(r.d == 2);
  CHECK(r.J == std::vector<int>{0});
  const ClassConstant* odd = constant(r, 1);
  REQUIRE(odd != nullptr);
  CHECK(odd->zero_class);
  CHECK_FALSE(odd->in_j);
  CHECK(r.z0 == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("analyze const3") {
  SingularityReport r = analyze(oracle::fixture("const3"), order(200));
  CHECK(r.route == "nonlinear");
  CHECK(r.alpha == 1.5);
  CHECK(r.d == 1);
  CHECK(r.z0 == doctest::Approx(4.0 / 81.0).epsilon(1e-10));
  CHECK(r.z0_method == Method::Both);
  REQUIRE(r.state.has_value());
  CHECK(r.diagnostic("T").has_value());
  CHECK(r.candidates.size() == 2);
  const ClassConstant* c = constant(r, 0);
  REQUIRE(c != nullptr);
  CHECK(c->in_j);
  CHECK(c->method == Method::OracleFit);
  CHECK(c->value == doctest::Approx(r.candidates[0].second).epsilon(1e-3));
}

TEST_CASE("analyze planar maps") {
  SingularityReport r = analyze(oracle::fixture("maps"), order(400));
  CHECK(r.route == "nonlinear-k1");
  CHECK(r.z0 == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
  const ClassConstant* c = constant(r, 0);
  REQUIRE(c != nullptr);
  CHECK(c->value == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-2));
}

TEST_CASE("analyze preconditions") {
  CHECK(oracle::error_code([] { analyze(oracle::fixture("lp12"), order(20)); }) == ErrorCode::SeriesOrderTooLow);
}

TEST_CASE("central limit theorem for +1 steps") {
  CatalyticEquation eq = oracle::fixture("lp12_marked");
  CltReport rep = clt(eq, 0, order(100));
  CHECK(rep.samples.size() == 5);
  CHECK(rep.mu == doctest::Approx(0.25).epsilon(1e-6));

  const double h = 1e-2;
  double f[5];
  for (int i = -2; i <= 2; ++i) f[i + 2] = std::log(lp12_marked_z0(std::exp(i * h)));
  const double mu = -(f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
  const double sigma2 = -(-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
  CHECK(rep.mu == doctest::Approx(mu).epsilon(1e-6));
  CHECK(rep.sigma2 == doctest::Approx(sigma2).epsilon(1e-4));

  const int n = 500;
  CHECK(oracle::mean_up_steps(n) == doctest::Approx(rep.mu * n).epsilon(0.02));

  CltOptions half;
  half.h = 5e-4;
  CltReport other = clt(eq, 0, order(100), half);
  CHECK(std::abs(other.mu - rep.mu) < 1e-4);
  CHECK(std::abs(other.sigma2 - rep.sigma2) < 1e-4);
}

TEST_CASE("clt without a mark") {
  CatalyticEquation eq = oracle::fixture("lp12");
  CHECK(oracle::error_code([&] { clt(eq, 0, order(100)); }) == ErrorCode::MarkMissing);
  CltOptions opt;
  opt.require_mark = false;
  CltReport rep = clt(eq, 0, order(100), opt);
  CHECK(std::abs(rep.mu) < 1e-12);
  CHECK(std::abs(rep.sigma2) < 1e-9);
}

TEST_CASE("clt residue must be in the support") {
  CHECK(oracle::error_code([] { clt(oracle::fixture("lp12_marked"), 1, order(100)); }) == ErrorCode::InvalidArgument);
}
