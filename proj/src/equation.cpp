#include "catalytic/equation.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "catalytic/error.hpp"

namespace catalytic {

using nlohmann::json;

std::array<const char*, 3> slot_names(Mode mode) {
  if (mode == Mode::Q) return {"a0", "a1", "a2"};
  return {"y0", "y1", "y2"};
}

namespace {

const char* kBaseNames[3] = {"z", "u", "w"};

Rat coefficient_field(const json& term) {
  auto it = term.find("coef");
  if (it == term.end()) fail(ErrorCode::SyntaxError, "term without 'coef'");
  if (it->is_string()) return parse_rat(it->get<std::string>());
  if (it->is_number_integer()) return Rat(std::to_string(it->get<long long>()));
  fail(ErrorCode::SyntaxError, "'coef' must be a \"p/q\" string or an integer");
}

Poly parse_terms(const json& list, const std::vector<std::string>& allowed, Mode mode) {
  if (!list.is_array()) fail(ErrorCode::SyntaxError, "term list must be an array");
  const auto names = slot_names(mode);
  Poly p;
  for (const auto& term : list) {
    if (!term.is_object()) fail(ErrorCode::SyntaxError, "term must be an object");
    Exponents e{};
    for (const auto& [key, value] : term.items()) {
      if (key == "coef") continue;
      std::size_t slot = kNumVars;
      for (std::size_t i = 0; i < allowed.size(); ++i) {
        if (!allowed[i].empty() && allowed[i] == key) slot = i;
      }
      if (slot == kNumVars) fail(ErrorCode::SyntaxError, "unexpected field '" + key + "' in term");
      if (!value.is_number_integer() || value.get<long long>() < 0 || value.get<long long>() > 100000) {
        fail(ErrorCode::SyntaxError, "exponent '" + key + "' must be a non-negative integer");
      }
      // allowed lists are laid out in slot order, with absent slots as "".
      e[slot] = static_cast<std::uint32_t>(value.get<long long>());
    }
    Rat c = coefficient_field(term);
    if (sgn(c) < 0) {
      fail(ErrorCode::NegativeCoefficient, "negative coefficient in monomial " + monomial_string(e, c, names));
    }
    p.add_term(e, c);
  }
  return p;
}

}  // namespace

CatalyticEquation parse_equation(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& ex) {
    fail(ErrorCode::SyntaxError, std::string("invalid JSON: ") + ex.what());
  }
  if (!doc.is_object()) fail(ErrorCode::SyntaxError, "document must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "k" && key != "mode" && key != "terms" && key != "f0_terms" && key != "name" && key != "comment") {
      fail(ErrorCode::SyntaxError, "unexpected top-level field '" + key + "'");
    }
  }
  CatalyticEquation eq;
  if (!doc.contains("k") || !doc["k"].is_number_integer()) fail(ErrorCode::SyntaxError, "missing integer field 'k'");
  long long k = doc["k"].get<long long>();
  if (k != 1 && k != 2) fail(ErrorCode::UnsupportedK, "k=" + std::to_string(k) + " is not supported");
  eq.k = static_cast<int>(k);
  std::string mode = doc.value("mode", std::string("Q"));
  if (mode == "Q") {
    eq.mode = Mode::Q;
  } else if (mode == "R") {
    eq.mode = Mode::R;
  } else {
    fail(ErrorCode::SyntaxError, "mode must be \"Q\" or \"R\"");
  }
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail(ErrorCode::SyntaxError, "'name' must be a string");
    eq.name = doc["name"].get<std::string>();
  }
  std::vector<std::string> allowed = {"z", "u", "w"};
  const auto names = slot_names(eq.mode);
  for (int i = 0; i < 3; ++i) allowed.push_back(i <= eq.k ? names[i] : "");
  eq.q_or_r = parse_terms(doc.value("terms", json::array()), allowed, eq.mode);
  eq.f0 = parse_terms(doc.value("f0_terms", json::array()), {"z", "u"}, eq.mode);
  eq.has_mark = eq.q_or_r.depends_on(Var::W);
  if (eq.mode == Mode::R) {
    for (const auto& [e, c] : eq.q_or_r.terms()) {
      if (e[idx(Var::Z)] == 0) {
        fail(ErrorCode::SyntaxError, "R-mode term " + monomial_string(e, c, names) + " lacks the factor z");
      }
    }
  }
  return eq;
}

CatalyticEquation load_equation(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_equation(ss.str());
}

namespace {

json terms_json(const Poly& p, Mode mode, bool zu_only) {
  const auto names = slot_names(mode);
  json list = json::array();
  for (const auto& [e, c] : p.terms()) {
    json t = json::object();
    t["coef"] = format_rat(c);
    for (std::size_t i = 0; i < (zu_only ? 2u : kNumVars); ++i) {
      if (e[i] == 0) continue;
      t[i < 3 ? kBaseNames[i] : names[i - 3]] = e[i];
    }
    list.push_back(t);
  }
  return list;
}

}  // namespace

std::string canonical_form(const CatalyticEquation& eq) {
  json doc = json::object();
  doc["k"] = eq.k;
  doc["mode"] = eq.mode == Mode::Q ? "Q" : "R";
  doc["terms"] = terms_json(eq.q_or_r, eq.mode, false);
  doc["f0_terms"] = terms_json(eq.f0, eq.mode, true);
  return doc.dump();
}

std::string canonical_hash(const CatalyticEquation& eq) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical_form(eq)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = hex[h & 0xfu];
    h >>= 4u;
  }
  return s;
}

Linearity classify(const CatalyticEquation& eq) {
  return eq.q_or_r.slot_degree() <= 1 ? Linearity::Linear : Linearity::Nonlinear;
}

namespace {

Poly r_from_q(const CatalyticEquation& eq) {
  // Slot polynomials in y for a0, a1, a2.
  const Poly u = Poly::variable(Var::U);
  const Poly y0 = Poly::variable(Var::V0);
  const Poly y1 = Poly::variable(Var::V1);
  const Poly y2 = Poly::variable(Var::V2);
  std::array<Poly, 3> sub;
  if (eq.k == 2) {
    sub = {u * u * y0 + u * y1 + y2, u * y0 + y1, y0};
  } else {
    sub = {u * y0 + y1, y0, Poly()};
  }
  std::map<std::pair<int, std::uint32_t>, Poly> powers;
  auto power = [&](int slot, std::uint32_t e) -> const Poly& {
    auto key = std::make_pair(slot, e);
    auto it = powers.find(key);
    if (it == powers.end()) it = powers.emplace(key, sub[static_cast<std::size_t>(slot)].pow(e)).first;
    return it->second;
  };
  Poly r;
  for (const auto& [e, c] : eq.q_or_r.terms()) {
    Exponents base{};
    base[idx(Var::Z)] = e[idx(Var::Z)] + 1;
    base[idx(Var::U)] = e[idx(Var::U)];
    base[idx(Var::W)] = e[idx(Var::W)];
    Poly t = Poly::monomial(c, base);
    for (int s = 0; s < 3; ++s) {
      std::uint32_t p = e[3 + static_cast<std::size_t>(s)];
      if (p > 0) t = t * power(s, p);
    }
    r += t;
  }
  return r;
}

}  // namespace

RForm::RForm(const CatalyticEquation& eq) : k_(eq.k), f0_(eq.f0) {
  r_ = (eq.mode == Mode::Q ? r_from_q(eq) : eq.q_or_r) + eq.f0;
  // Breadth-first over multi-indices, each derived from a smaller one.
  partials_.emplace(PartialIndex{}, r_);
  std::vector<PartialIndex> frontier = {PartialIndex{}};
  const Var vars[5] = {Var::Z, Var::U, Var::V0, Var::V1, Var::V2};
  for (int order = 1; order <= kMaxPartialOrder; ++order) {
    std::vector<PartialIndex> next;
    for (const PartialIndex& base : frontier) {
      for (int v = 0; v < 5; ++v) {
        PartialIndex p = base;
        std::uint8_t* slots[5] = {&p.z, &p.u, &p.y0, &p.y1, &p.y2};
        ++*slots[v];
        if (partials_.count(p)) continue;
        partials_.emplace(p, partials_.at(base).derivative(vars[v]));
        next.push_back(p);
      }
    }
    frontier = std::move(next);
  }
  for (const auto& [index, poly] : partials_) numeric_.emplace(index, HornerPoly<double>(poly));
}

const Poly& RForm::partial(const PartialIndex& index) const {
  if (index.total() > kMaxPartialOrder) {
    fail(ErrorCode::OrderTooHigh, "partial derivative of total order " + std::to_string(index.total()));
  }
  return partials_.at(index);
}

double RForm::eval(const PartialIndex& index, const Point<double>& x) const {
  if (index.total() > kMaxPartialOrder) {
    fail(ErrorCode::OrderTooHigh, "partial derivative of total order " + std::to_string(index.total()));
  }
  return numeric_.at(index)(x);
}

RForm build_r_form(const CatalyticEquation& eq) { return RForm(eq); }

LinearParts linear_parts(const RForm& rf) {
  if (!rf.linear()) fail(ErrorCode::NotLinear, "R-form is not linear in the y slots");
  LinearParts lp;
  for (const auto& [e, c] : rf.r().terms()) {
    Exponents base = e;
    base[3] = base[4] = base[5] = 0;
    if (e[3] == 1) {
      lp.l0.add_term(base, c);
    } else if (e[4] == 1) {
      lp.l1.add_term(base, c);
    } else if (e[5] == 1) {
      lp.l2.add_term(base, c);
    } else {
      lp.p0.add_term(base, c);
    }
  }
  return lp;
}

Number eval_poly(const Poly& p, const Assignment& point, EvalMode mode) {
  static const char* names[kNumVars] = {"z", "u", "w", "y0", "y1", "y2"};
  static const char* aliases[kNumVars] = {"z", "u", "w", "a0", "a1", "a2"};
  std::array<Rat, kNumVars> x;
  for (std::size_t i = 0; i < kNumVars; ++i) {
    auto it = point.find(names[i]);
    if (it == point.end()) it = point.find(aliases[i]);
    if (it != point.end()) {
      x[i] = it->second;
    } else if (p.depends_on(static_cast<Var>(i))) {
      fail(ErrorCode::MissingVariable, std::string("no value for variable ") + names[i]);
    }
  }
  Number n;
  if (mode == EvalMode::Exact) {
    n.exact = p.evaluate(x);
    n.value = to_double(n.exact);
    n.is_exact = true;
  } else {
    Point<double> xd;
    for (std::size_t i = 0; i < kNumVars; ++i) xd[i] = to_double(x[i]);
    n.value = HornerPoly<double>(p)(xd);
  }
  return n;
}

Number eval_r(const RForm& rf, const Assignment& point, EvalMode mode) { return eval_poly(rf.r(), point, mode); }

}  // namespace catalytic
