#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "catalytic/polynomial.hpp"

namespace catalytic {

enum class Mode { Q, R };

struct CatalyticEquation {
  int k = 2;
  Mode mode = Mode::Q;
  Poly q_or_r;  // Q(z,u,w,a0,a1,a2) or R(z,u,w,y0,y1,y2)
  Poly f0;      // F0(z,u)
  bool has_mark = false;
  std::string name;
};

// Slot names used for V0..V2 when rendering.
std::array<const char*, 3> slot_names(Mode mode);

CatalyticEquation parse_equation(std::string_view document);
CatalyticEquation load_equation(const std::string& path);

// Canonical JSON rendering (sorted terms, reduced coefficients, no name).
std::string canonical_form(const CatalyticEquation& eq);
// 16 hex digits, FNV-1a over canonical_form.
std::string canonical_hash(const CatalyticEquation& eq);

enum class Linearity { Linear, Nonlinear };
Linearity classify(const CatalyticEquation& eq);

struct PartialIndex {
  std::uint8_t z = 0, u = 0, y0 = 0, y1 = 0, y2 = 0;
  int total() const { return z + u + y0 + y1 + y2; }
  auto operator<=>(const PartialIndex&) const = default;
};

inline constexpr int kMaxPartialOrder = 3;

// Evaluation point layout for numeric partials: {z, u, w, y0, y1, y2}.
template <class S>
using Point = std::array<S, kNumVars>;

// R(z,u,w,y0,y1,y2) with every partial derivative of total order <= 3 over
// (z,u,y0,y1,y2) computed at construction. Immutable afterwards.
class RForm {
 public:
  explicit RForm(const CatalyticEquation& eq);

  int k() const { return k_; }
  const Poly& r() const { return r_; }
  const Poly& f0() const { return f0_; }
  bool linear() const { return r_.slot_degree() <= 1; }

  const Poly& partial(const PartialIndex& index) const;
  double eval(const PartialIndex& index, const Point<double>& x) const;

 private:
  int k_;
  Poly r_;
  Poly f0_;
  std::map<PartialIndex, Poly> partials_;
  std::map<PartialIndex, HornerPoly<double>> numeric_;
};

RForm build_r_form(const CatalyticEquation& eq);

// Linear R-form written as R = P0 + L0*y0 + L1*y1 + L2*y2.
struct LinearParts {
  Poly p0, l0, l1, l2;
};
LinearParts linear_parts(const RForm& rf);

enum class EvalMode { Exact, Float };
// Variable names: z, u, w, y0, y1, y2 (a0..a2 accepted as aliases of the slots).
using Assignment = std::map<std::string, Rat>;

struct Number {
  Rat exact;
  double value = 0.0;
  bool is_exact = false;
};
Number eval_poly(const Poly& p, const Assignment& point, EvalMode mode);
Number eval_r(const RForm& rf, const Assignment& point, EvalMode mode);

}  // namespace catalytic
