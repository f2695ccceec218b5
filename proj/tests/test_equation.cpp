#include <doctest.h>

#include "catalytic/equation.hpp"
#include "catalytic/series.hpp"
#include "oracles.hpp"

using namespace catalytic;

namespace {

Poly var(Var v) { return Poly::variable(v); }
Poly num(long n) { return Poly(Rat(n)); }

const Poly Z = var(Var::Z), U = var(Var::U), Y0 = var(Var::V0), Y1 = var(Var::V1), Y2 = var(Var::V2);

}  // namespace

TEST_CASE("parse lp12 fixture") {
  CatalyticEquation eq = oracle::fixture("lp12");
  CHECK(eq.k == 2);
  CHECK(eq.mode == Mode::Q);
  CHECK(eq.q_or_r.size() == 4);
  CHECK(eq.f0 == num(1));
  CHECK_FALSE(eq.has_mark);
  CHECK(eq.name == "lp12");
}

TEST_CASE("empty equation has the zero solution") {
  CatalyticEquation eq = parse_equation(R"({"k": 2, "terms": [], "f0_terms": []})");
  BivariateSeries m = solve_series(eq, 6);
  for (const auto& row : m.coeffs) CHECK(row.empty());
}

TEST_CASE("parser rejections") {
  using oracle::error_code;
  CHECK(error_code([] { parse_equation(R"({"k": 2, "terms": [{"coef": "-1", "a0": 1}]})"); }) ==
        ErrorCode::NegativeCoefficient);
  CHECK(error_code([] { parse_equation(R"({"k": 3, "terms": []})"); }) == ErrorCode::UnsupportedK);
  CHECK(error_code([] { parse_equation("{not json"); }) == ErrorCode::SyntaxError);
  CHECK(error_code([] { parse_equation(R"({"k": 1, "terms": [{"coef": "1", "a2": 1}]})"); }) ==
        ErrorCode::SyntaxError);
  CHECK(error_code([] { parse_equation(R"({"k": 2, "mode": "R", "terms": [{"coef": "1", "y0": 1}]})"); }) ==
        ErrorCode::SyntaxError);
  CHECK(error_code([] { load_equation("/nonexistent/eq.json"); }) == ErrorCode::IoError);
}

TEST_CASE("rational coefficients are reduced") {
  CatalyticEquation eq = parse_equation(R"({"k": 2, "terms": [{"coef": "2/4", "a2": 1}]})");
  CHECK(eq.q_or_r.terms().begin()->second == Rat(1, 2));
}

TEST_CASE("R-form of a single slot") {
  CatalyticEquation eq = parse_equation(R"({"k": 2, "terms": [{"coef": "1", "a2": 1}]})");
  CHECK(build_r_form(eq).r() == Z * Y0);
}

TEST_CASE("R-form of lp12") {
  RForm rf = build_r_form(oracle::fixture("lp12"));
  Poly expected = Z * (U + U * U) * (U * U * Y0 + U * Y1 + Y2) + Z * (U * Y0 + Y1) + Z * Y0 + num(1);
  CHECK(rf.r() == expected);
  CHECK(rf.linear());
  CHECK(rf.partial({0, 0, 1, 0, 0}) == Z * U.pow(4) + Z * U.pow(3) + Z * U + Z);
  CHECK(rf.partial({0, 0, 2, 0, 0}).is_zero());
}

TEST_CASE("R-form of planar maps") {
  RForm rf = build_r_form(oracle::fixture("maps"));
  const Poly one_u = num(1) + U;
  const Poly slot = U * Y0 + Y1;
  Poly expected = Z * one_u.pow(2) * slot.pow(2) + Z * one_u * slot + Z * one_u * Y0 + num(1);
  CHECK(rf.r() == expected);
  CHECK_FALSE(rf.linear());
  CHECK(rf.partial({0, 0, 1, 0, 0}).degree(Var::U) >= 2);
}

TEST_CASE("numeric partials agree with exact ones") {
  RForm rf = build_r_form(oracle::fixture("const3"));
  Point<double> x{0.05, 0.3, 1.0, 0.2, 0.1, 0.08};
  std::array<Rat, kNumVars> xr{Rat(1, 20), Rat(3, 10), Rat(1), Rat(1, 5), Rat(1, 10), Rat(2, 25)};
  for (PartialIndex p : {PartialIndex{}, PartialIndex{0, 1, 0, 0, 0}, PartialIndex{0, 1, 1, 0, 0},
                         PartialIndex{0, 0, 3, 0, 0}, PartialIndex{1, 2, 0, 0, 0}}) {
    CHECK(rf.eval(p, x) == doctest::Approx(to_double(rf.partial(p).evaluate(xr))).epsilon(1e-13));
  }
}

TEST_CASE("eval_r") {
  RForm simple = build_r_form(parse_equation(R"({"k": 2, "terms": [{"coef": "1", "a2": 1}]})"));
  Number v = eval_r(simple, {{"z", Rat(1, 2)}, {"y0", Rat(1, 3)}}, EvalMode::Exact);
  CHECK(v.is_exact);
  CHECK(v.exact == Rat(1, 6));

  RForm lp = build_r_form(oracle::fixture("lp12"));
  Number c = eval_poly(lp.partial({0, 0, 1, 0, 0}), {{"z", Rat(1, 4)}, {"u", Rat(1)}}, EvalMode::Exact);
  CHECK(c.exact == 1);

  Assignment zero{{"z", 0}, {"u", 0}, {"w", 0}, {"y0", 0}, {"y1", 0}, {"y2", 0}};
  CHECK(eval_r(lp, zero, EvalMode::Exact).exact == 1);
  CHECK(eval_r(lp, zero, EvalMode::Float).value == 1.0);
  CHECK(oracle::error_code([&] { eval_r(lp, {{"z", 1}}, EvalMode::Exact); }) == ErrorCode::MissingVariable);
}

TEST_CASE("classify") {
  CHECK(classify(oracle::fixture("lp12")) == Linearity::Linear);
  CHECK(classify(oracle::fixture("const3")) == Linearity::Nonlinear);
  CHECK(classify(oracle::fixture("maps")) == Linearity::Nonlinear);
  CHECK(classify(parse_equation(R"({"k": 2, "terms": [{"coef": "1", "a0": 1, "a2": 1}]})")) ==
        Linearity::Nonlinear);
}

TEST_CASE("canonical form ignores names and term order") {
  CatalyticEquation a = parse_equation(
      R"({"k": 2, "name": "a", "terms": [{"coef": "1", "a1": 1}, {"coef": "2", "u": 1, "a0": 1}]})");
  CatalyticEquation b = parse_equation(
      R"({"k": 2, "name": "b", "terms": [{"coef": "2", "u": 1, "a0": 1}, {"coef": "1", "a1": 1}]})");
  CHECK(canonical_form(a) == canonical_form(b));
  CHECK(canonical_hash(a) == canonical_hash(b));
  CHECK(canonical_hash(a).size() == 16);
  CHECK(canonical_hash(a) != canonical_hash(oracle::fixture("lp12")));
  CHECK(canonical_form(parse_equation(canonical_form(a))) == canonical_form(a));
}
