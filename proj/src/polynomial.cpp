#include "catalytic/polynomial.hpp"

#include <sstream>

namespace catalytic {

Poly::Poly(const Rat& constant) {
  if (constant != 0) terms_.emplace(Exponents{}, constant);
}

Poly Poly::variable(Var v) {
  Exponents e{};
  e[idx(v)] = 1;
  return monomial(Rat(1), e);
}

Poly Poly::monomial(const Rat& coef, const Exponents& e) {
  Poly p;
  p.add_term(e, coef);
  return p;
}

void Poly::add_term(const Exponents& e, const Rat& coef) {
  if (coef == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly Poly::operator+(const Poly& other) const {
  Poly r = *this;
  r += other;
  return r;
}

Poly& Poly::operator+=(const Poly& other) {
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Poly Poly::operator-(const Poly& other) const {
  Poly r = *this;
  for (const auto& [e, c] : other.terms_) r.add_term(e, -c);
  return r;
}

Poly Poly::operator*(const Poly& other) const {
  Poly r;
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : other.terms_) {
      Exponents e;
      for (std::size_t i = 0; i < kNumVars; ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Poly Poly::scaled(const Rat& factor) const {
  Poly r;
  if (factor == 0) return r;
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, c * factor);
  return r;
}

Poly Poly::pow(unsigned n) const {
  Poly result(Rat(1));
  Poly base = *this;
  while (n) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n) base = base * base;
  }
  return result;
}

Poly Poly::derivative(Var v, unsigned order) const {
  Poly r;
  const std::size_t i = idx(v);
  for (const auto& [e, c] : terms_) {
    if (e[i] < order) continue;
    Rat f = c;
    for (unsigned k = 0; k < order; ++k) f *= e[i] - k;
    Exponents ne = e;
    ne[i] -= order;
    r.add_term(ne, f);
  }
  return r;
}

Poly Poly::substitute(Var v, const Poly& p) const {
  const std::size_t i = idx(v);
  std::map<std::uint32_t, Poly> powers;
  Poly r;
  for (const auto& [e, c] : terms_) {
    Exponents rest = e;
    rest[i] = 0;
    Poly head = monomial(c, rest);
    if (e[i] == 0) {
      r += head;
      continue;
    }
    auto it = powers.find(e[i]);
    if (it == powers.end()) it = powers.emplace(e[i], p.pow(e[i])).first;
    r += head * it->second;
  }
  return r;
}

Poly Poly::coefficient_of(Var v, std::uint32_t ex) const {
  Poly r;
  const std::size_t i = idx(v);
  for (const auto& [e, c] : terms_) {
    if (e[i] != ex) continue;
    Exponents ne = e;
    ne[i] = 0;
    r.terms_.emplace(ne, c);
  }
  return r;
}

std::uint32_t Poly::degree(Var v) const {
  std::uint32_t d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[idx(v)]);
  return d;
}

bool Poly::depends_on(Var v) const {
  for (const auto& [e, c] : terms_) {
    if (e[idx(v)] > 0) return true;
  }
  return false;
}

std::uint32_t Poly::slot_degree() const {
  std::uint32_t d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[3] + e[4] + e[5]);
  return d;
}

bool Poly::all_nonnegative() const {
  for (const auto& [e, c] : terms_) {
    if (sgn(c) < 0) return false;
  }
  return true;
}

bool Poly::all_integral() const {
  for (const auto& [e, c] : terms_) {
    if (c.get_den() != 1) return false;
  }
  return true;
}

Rat Poly::evaluate(const std::array<Rat, kNumVars>& point) const {
  // Exact arithmetic, so term order does not matter.
  Rat sum = 0;
  for (const auto& [e, c] : terms_) {
    Rat t = c;
    for (std::size_t i = 0; i < kNumVars; ++i) {
      if (e[i] == 0) continue;
      Rat pw;
      mpz_pow_ui(pw.get_num_mpz_t(), point[i].get_num_mpz_t(), e[i]);
      mpz_pow_ui(pw.get_den_mpz_t(), point[i].get_den_mpz_t(), e[i]);
      t *= pw;
    }
    sum += t;
  }
  return sum;
}

std::string monomial_string(const Exponents& e, const Rat& coef, const std::array<const char*, 3>& slot_names) {
  static const char* base[3] = {"z", "u", "w"};
  std::ostringstream os;
  bool any = false;
  for (std::size_t i = 0; i < kNumVars; ++i) {
    if (e[i] == 0) continue;
    if (any) os << "*";
    os << (i < 3 ? base[i] : slot_names[i - 3]);
    if (e[i] > 1) os << "^" << e[i];
    any = true;
  }
  if (!any) return format_rat(coef);
  if (coef == 1) return os.str();
  return format_rat(coef) + "*" + os.str();
}

std::string Poly::to_string(const std::array<const char*, 3>& slot_names) const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [e, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += monomial_string(e, c, slot_names);
  }
  return s;
}

}  // namespace catalytic
