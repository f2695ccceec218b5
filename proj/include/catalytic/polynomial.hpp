#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "catalytic/rational.hpp"

namespace catalytic {

// Fixed variable alphabet. Slots V0..V2 hold a0..a2 in Q-mode and y0..y2 in R-form.
enum class Var : std::uint8_t { Z = 0, U = 1, W = 2, V0 = 3, V1 = 4, V2 = 5 };
inline constexpr std::size_t kNumVars = 6;

using Exponents = std::array<std::uint32_t, kNumVars>;

inline constexpr std::size_t idx(Var v) { return static_cast<std::size_t>(v); }

// Sparse multivariate polynomial with exact rational coefficients. Terms are
// kept in lexicographic order of the exponent vector (z first).
class Poly {
 public:
  using TermMap = std::map<Exponents, Rat>;

  Poly() = default;
  explicit Poly(const Rat& constant);
  static Poly variable(Var v);
  static Poly monomial(const Rat& coef, const Exponents& e);

  void add_term(const Exponents& e, const Rat& coef);

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Poly operator+(const Poly& other) const;
  Poly operator-(const Poly& other) const;
  Poly operator*(const Poly& other) const;
  Poly& operator+=(const Poly& other);
  Poly scaled(const Rat& factor) const;
  Poly pow(unsigned n) const;
  bool operator==(const Poly& other) const { return terms_ == other.terms_; }

  Poly derivative(Var v, unsigned order = 1) const;
  // Replaces every occurrence of v by the polynomial p.
  Poly substitute(Var v, const Poly& p) const;
  // Terms whose exponent of v equals e, with v removed.
  Poly coefficient_of(Var v, std::uint32_t e) const;

  std::uint32_t degree(Var v) const;
  bool depends_on(Var v) const;
  // Largest sum of exponents over the V0..V2 slots.
  std::uint32_t slot_degree() const;
  bool all_nonnegative() const;
  bool all_integral() const;

  Rat evaluate(const std::array<Rat, kNumVars>& point) const;

  // Human-readable rendering; slot names are the names used for V0..V2.
  std::string to_string(const std::array<const char*, 3>& slot_names) const;

 private:
  TermMap terms_;
};

std::string monomial_string(const Exponents& e, const Rat& coef, const std::array<const char*, 3>& slot_names);

// Horner-scheme evaluator compiled from a Poly. Evaluation nests the variables
// in the order z, u, w, v0, v1, v2; at each level the exponents are visited in
// decreasing order, so the floating summation order is fixed by the term set.
template <class S>
class HornerPoly {
 public:
  HornerPoly() = default;
  explicit HornerPoly(const Poly& p);

  S operator()(const std::array<S, kNumVars>& x) const;
  bool is_zero() const { return root_ < 0; }

 private:
  struct Node {
    std::uint8_t level;
    std::vector<std::uint32_t> exps;
    std::vector<std::int32_t> children;  // node ids, or coefficient ids at the last level
  };
  std::int32_t build(const std::vector<std::pair<Exponents, S>>& terms, std::size_t begin, std::size_t end,
                     std::uint8_t level);
  S eval_node(std::int32_t id, const std::array<S, kNumVars>& x) const;

  std::vector<Node> nodes_;
  std::vector<S> coeffs_;
  std::int32_t root_ = -1;
};

template <class S>
S small_pow(S x, std::uint32_t e) {
  S r = S(1);
  while (e) {
    if (e & 1u) r *= x;
    e >>= 1u;
    if (e) x *= x;
  }
  return r;
}

template <class S>
HornerPoly<S>::HornerPoly(const Poly& p) {
  std::vector<std::pair<Exponents, S>> terms;
  terms.reserve(p.size());
  for (const auto& [e, c] : p.terms()) terms.emplace_back(e, from_rat<S>(c));
  if (!terms.empty()) root_ = build(terms, 0, terms.size(), 0);
}

template <class S>
std::int32_t HornerPoly<S>::build(const std::vector<std::pair<Exponents, S>>& terms, std::size_t begin,
                                  std::size_t end, std::uint8_t level) {
  // terms[begin,end) share exponents for levels < level and are sorted ascending.
  Node node;
  node.level = level;
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t i = begin;
  while (i < end) {
    std::size_t j = i;
    while (j < end && terms[j].first[level] == terms[i].first[level]) ++j;
    groups.emplace_back(i, j);
    i = j;
  }
  for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
    node.exps.push_back(terms[it->first].first[level]);
    if (level + 1 == kNumVars) {
      coeffs_.push_back(terms[it->first].second);
      node.children.push_back(static_cast<std::int32_t>(coeffs_.size() - 1));
    } else {
      node.children.push_back(build(terms, it->first, it->second, static_cast<std::uint8_t>(level + 1)));
    }
  }
  nodes_.push_back(std::move(node));
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

template <class S>
S HornerPoly<S>::eval_node(std::int32_t id, const std::array<S, kNumVars>& x) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  const bool leaf = n.level + 1 == kNumVars;
  auto child = [&](std::size_t k) -> S {
    return leaf ? coeffs_[static_cast<std::size_t>(n.children[k])] : eval_node(n.children[k], x);
  };
  const S& xv = x[n.level];
  S acc = child(0);
  for (std::size_t k = 1; k < n.exps.size(); ++k) {
    acc = acc * small_pow(xv, n.exps[k - 1] - n.exps[k]) + child(k);
  }
  if (n.exps.back() > 0) acc *= small_pow(xv, n.exps.back());
  return acc;
}

template <class S>
S HornerPoly<S>::operator()(const std::array<S, kNumVars>& x) const {
  if (root_ < 0) return S(0);
  return eval_node(root_, x);
}

}  // namespace catalytic
