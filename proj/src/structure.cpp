#include "catalytic/structure.hpp"

#include "catalytic/error.hpp"
#include "catalytic/series.hpp"

namespace catalytic {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "Certified";
    case Verdict::NecessaryOnly: return "NecessaryOnly";
    case Verdict::Failed: return "Failed";
  }
  return "Failed";
}

std::string degenerate_name(DegenerateKind k) {
  switch (k) {
    case DegenerateKind::None: return "None";
    case DegenerateKind::Q1uZero: return "Q1uZero";
    case DegenerateKind::EvenCurve: return "EvenCurve";
    case DegenerateKind::UDividesQ2PlusQ3: return "UDividesQ2PlusQ3";
    case DegenerateKind::UDividesQ3Only: return "UDividesQ3Only";
  }
  return "None";
}

namespace {

const std::array<const char*, 3> kR = {"y0", "y1", "y2"};

std::string first_term(const Poly& p, bool (*pred)(const Exponents&)) {
  for (const auto& [e, c] : p.terms()) {
    if (pred(e)) return monomial_string(e, c, kR);
  }
  return "";
}

Poly at_u_zero(const Poly& p) { return p.coefficient_of(Var::U, 0); }

// (p - p(u=0)) / u
Poly delta_u(const Poly& p) {
  Poly r;
  for (const auto& [e, c] : p.terms()) {
    if (e[idx(Var::U)] == 0) continue;
    Exponents ne = e;
    --ne[idx(Var::U)];
    r.add_term(ne, c);
  }
  return r;
}

Poly divide_by_z(const Poly& p) {
  Poly r;
  for (const auto& [e, c] : p.terms()) {
    if (e[idx(Var::Z)] == 0) fail(ErrorCode::InvalidArgument, "expected a multiple of z");
    Exponents ne = e;
    --ne[idx(Var::Z)];
    r.add_term(ne, c);
  }
  return r;
}

Poly times_u(const Poly& p) { return p * Poly::variable(Var::U); }

// Builds an R-mode equation from a full R-form polynomial.
CatalyticEquation r_mode_equation(int k, const Poly& r, const std::string& name) {
  CatalyticEquation eq;
  eq.k = k;
  eq.mode = Mode::R;
  eq.name = name;
  for (const auto& [e, c] : r.terms()) {
    if (e[idx(Var::Z)] == 0) {
      if (e[3] + e[4] + e[5] > 0 || e[idx(Var::W)] > 0) {
        fail(ErrorCode::InvalidArgument, "z-free term with a y or w factor");
      }
      eq.f0.add_term(e, c);
    } else {
      eq.q_or_r.add_term(e, c);
    }
  }
  eq.has_mark = eq.q_or_r.depends_on(Var::W);
  return eq;
}

// Maps u^{2j} -> U^j (even part) or u^{2j+1} -> U^j (odd part).
Poly parity_part(const Poly& p, bool odd) {
  Poly r;
  for (const auto& [e, c] : p.terms()) {
    std::uint32_t a = e[idx(Var::U)];
    if ((a % 2 == 1) != odd) continue;
    Exponents ne = e;
    ne[idx(Var::U)] = a / 2;
    r.add_term(ne, c);
  }
  return r;
}

Poly with_slot(const Poly& p, Var slot) { return p * Poly::variable(slot); }

void require_linear_k2(const CatalyticEquation& eq) {
  if (classify(eq) != Linearity::Linear) fail(ErrorCode::NotLinear, "equation is not linear");
}

}  // namespace

ConnectivityReport linear_connectivity(const CatalyticEquation& eq) {
  require_linear_k2(eq);
  RForm rf(eq);
  LinearParts lp = linear_parts(rf);
  ConnectivityReport rep;
  auto has_u = [](const Exponents& e) { return e[idx(Var::U)] > 0; };
  auto odd_u = [](const Exponents& e) { return e[idx(Var::U)] % 2 == 1; };
  auto no_u = [](const Exponents& e) { return e[idx(Var::U)] == 0; };
  if (eq.k == 2) {
    Check c1{"Q1u_nonzero", lp.l2.depends_on(Var::U), ""};
    c1.witness = c1.passed ? "y2-coefficient term " + first_term(lp.l2, has_u) : "the y2-coefficient is free of u";
    Check c2{"curve_not_even", false, ""};
    std::string odd = first_term(lp.l0, odd_u);
    c2.passed = !odd.empty();
    c2.witness = c2.passed ? "curve term " + odd : "curve " + lp.l0.to_string(kR) + " is a polynomial in u^2";
    Check c3{"u_not_dividing_Q2_plus_Q3", false, ""};
    std::string w0 = first_term(lp.l0, no_u), w1 = first_term(lp.l1, no_u);
    c3.passed = !w0.empty() || !w1.empty();
    c3.witness = c3.passed ? "u-free term " + (w0.empty() ? w1 : w0) : "Q2(z,0) + Q3(z,0) = 0";
    rep.checks = {c1, c2, c3};
  } else {
    Check c1{"M0_coefficient_depends_on_u", lp.l1.depends_on(Var::U), ""};
    c1.witness = c1.passed ? "y1-coefficient term " + first_term(lp.l1, has_u) : "the y1-coefficient is free of u";
    Check c2{"u_not_dividing_curve", false, ""};
    std::string w0 = first_term(lp.l0, no_u);
    c2.passed = !w0.empty();
    c2.witness = c2.passed ? "u-free curve term " + w0 : "u divides the curve";
    rep.checks = {c1, c2};
  }
  bool all = true;
  for (const auto& c : rep.checks) all = all && c.passed;
  rep.verdict = all ? Verdict::Certified : Verdict::Failed;
  return rep;
}

ConnectivityReport nonlinear_necessary(const CatalyticEquation& eq, int series_order) {
  if (classify(eq) != Linearity::Nonlinear) fail(ErrorCode::NotNonlinear, "equation is linear");
  ConnectivityReport rep;
  const Var top = eq.k == 2 ? Var::V2 : Var::V1;  // the slot carrying M0 in R-form
  const Var delta_slot = eq.k == 2 ? Var::V2 : Var::V1;  // Q-mode slot of the highest divided difference
  Check c1{"Q_alpha0_depends_on_u_or_Delta", false, ""};
  if (eq.mode == Mode::Q) {
    Poly qa0 = eq.q_or_r.derivative(Var::V0);
    c1.passed = qa0.depends_on(Var::U) || qa0.depends_on(delta_slot);
    for (const auto& [e, c] : qa0.terms()) {
      if (e[idx(Var::U)] > 0 || e[idx(delta_slot)] > 0) {
        c1.witness = "Q_a0 term " + monomial_string(e, c, slot_names(Mode::Q));
        break;
      }
    }
    if (!c1.passed) c1.witness = "Q_a0 = " + qa0.to_string(slot_names(Mode::Q));
  } else {
    Poly ry = RForm(eq).r().derivative(top);
    c1.passed = ry.depends_on(Var::U) || ry.depends_on(Var::V0);
    for (const auto& [e, c] : ry.terms()) {
      if (e[idx(Var::U)] > 0 || e[idx(Var::V0)] > 0) {
        c1.witness = "R_M0 term " + monomial_string(e, c, kR);
        break;
      }
    }
    if (!c1.passed) c1.witness = "R_M0 = " + ry.to_string(kR);
  }
  Check c2{"curve_not_even", true, "not applicable for k=1"};
  Check c3{"empirical_series_support", false, ""};
  SeriesWithExtras s = solve_series_with(eq, series_order, {RForm(eq).partial(PartialIndex{0, 0, 1, 0, 0})});
  if (eq.k == 2) {
    c2.passed = false;
    for (int n = 0; n <= s.extras[0].order() && !c2.passed; ++n) {
      const auto& row = s.extras[0].coeffs[static_cast<std::size_t>(n)];
      for (std::size_t j = 1; j < row.size(); j += 2) {
        if (row[j] != 0) {
          c2.passed = true;
          c2.witness = "curve series coefficient [z^" + std::to_string(n) + " u^" + std::to_string(j) + "] = " +
                       format_rat(row[j]);
          break;
        }
      }
    }
    if (!c2.passed) c2.witness = "curve series has only even u-powers up to z^" + std::to_string(series_order);
  }
  Sections sec = extract_sections(s.m, eq.k);
  bool delta_alive = false;
  for (const auto& row : sec.delta.coeffs) delta_alive = delta_alive || !row.empty();
  try {
    Period p = support_period(sec.m0, 0);
    c3.passed = delta_alive;
    c3.witness = "M0 support period " + std::to_string(p.d) + (delta_alive ? "" : "; Delta vanishes");
  } catch (const Error& ex) {
    c3.passed = false;
    c3.witness = ex.what();
  }
  rep.checks = {c1, c2, c3};
  rep.empirical_ok = c3.passed;
  rep.verdict = c1.passed && c2.passed ? Verdict::NecessaryOnly : Verdict::Failed;
  return rep;
}

DegenerateCase degenerate_route(const CatalyticEquation& eq) {
  require_linear_k2(eq);
  if (eq.k != 2) fail(ErrorCode::WrongK, "degenerate routes are defined for k = 2");
  RForm rf(eq);
  LinearParts lp = linear_parts(rf);
  DegenerateCase dc;
  const Poly one(Rat(1));
  const Poly y0 = Poly::variable(Var::V0), y1 = Poly::variable(Var::V1), y2 = Poly::variable(Var::V2);

  bool odd_curve = false;
  for (const auto& [e, c] : lp.l0.terms()) odd_curve = odd_curve || e[idx(Var::U)] % 2 == 1;
  const Poly l0_0 = at_u_zero(lp.l0), l1_0 = at_u_zero(lp.l1), l2_0 = at_u_zero(lp.l2);

  if (!lp.l2.depends_on(Var::U)) {
    dc.kind = DegenerateKind::Q1uZero;
    const Poly q1 = divide_by_z(lp.l2);
    const Poly q2 = divide_by_z(lp.l1 - times_u(lp.l2));
    const Poly q3 = divide_by_z(lp.l0 - times_u(lp.l1));
    const Poly q0 = divide_by_z(lp.p0 - rf.f0());
    if (!q2.all_nonnegative() || !q3.all_nonnegative()) {
      fail(ErrorCode::InvalidArgument, "the R-form has no non-negative Q decomposition");
    }
    CatalyticEquation f;
    f.k = 2;
    f.mode = Mode::Q;
    f.name = eq.name.empty() ? "F" : eq.name + "_F";
    f.q_or_r = delta_u(q0) + with_slot(q1 + delta_u(q2), Var::V0) + with_slot(at_u_zero(q2) + delta_u(q3), Var::V1) +
               with_slot(at_u_zero(q3), Var::V2);
    f.f0 = delta_u(rf.f0());
    f.has_mark = f.q_or_r.depends_on(Var::W);
    dc.transformed.push_back(f);
    dc.numerator = at_u_zero(lp.p0);
    dc.m1_coefficient = l1_0;
    dc.f1_coefficient = l0_0;
    dc.denominator = one - l2_0;
    dc.description = "F = Delta M satisfies a k=2 equation; M0 = (P0(z,0) + L1(z,0) F(z,0) + L0(z,0) [u^1]F) / (1 - L2(z,0))";
    return dc;
  }
  if (!odd_curve) {
    dc.kind = DegenerateKind::EvenCurve;
    bool coupled = !parity_part(lp.l1, false).is_zero() || !parity_part(lp.l2, true).is_zero();
    if (coupled) {
      dc.description = "curve is even in u but the y1/y2 coefficients mix parities; the parts are coupled";
      return dc;
    }
    const Poly c = parity_part(lp.l0, false);
    Poly even = parity_part(lp.p0, false) + with_slot(c, Var::V0) + with_slot(parity_part(lp.l2, false), Var::V1);
    Poly odd = parity_part(lp.p0, true) + with_slot(c, Var::V0) + with_slot(parity_part(lp.l1, true), Var::V1);
    dc.transformed.push_back(r_mode_equation(1, even, eq.name.empty() ? "even" : eq.name + "_even"));
    dc.transformed.push_back(r_mode_equation(1, odd, eq.name.empty() ? "odd" : eq.name + "_odd"));
    dc.description = "M = M_even(u^2) + u M_odd(u^2); each part solves a k=1 equation in U = u^2 with M0 = M_even(z,0), M1 = M_odd(z,0)";
    return dc;
  }
  if (l0_0.is_zero() && l1_0.is_zero()) {
    dc.kind = DegenerateKind::UDividesQ2PlusQ3;
    dc.numerator = at_u_zero(lp.p0);
    dc.denominator = one - l2_0;
    dc.description = "M0 = P0(z,0) / (1 - L2(z,0)) is rational";
    return dc;
  }
  if (l0_0.is_zero()) {
    dc.kind = DegenerateKind::UDividesQ3Only;
    dc.numerator = at_u_zero(lp.p0);
    dc.m1_coefficient = l1_0;
    dc.denominator = one - l2_0;
    dc.description = "u2 = 0 solves the curve equation; M0 = (P0(z,0) + L1(z,0) M1) / (1 - L2(z,0))";
    return dc;
  }
  dc.description = "no degeneracy";
  return dc;
}

}  // namespace catalytic
