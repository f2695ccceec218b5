#include "catalytic/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "catalytic/error.hpp"
#include "catalytic/numeric.hpp"

namespace catalytic {

std::size_t BivariateSeries::max_u_degree() const {
  std::size_t d = 0;
  for (const auto& c : coeffs) {
    if (!c.empty()) d = std::max(d, c.size() - 1);
  }
  return d;
}

namespace {

inline void fma_into(mpz_class& acc, const mpz_class& a, const mpz_class& b) {
  mpz_addmul(acc.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}
inline void fma_into(mpq_class& acc, const mpq_class& a, const mpq_class& b) { acc += a * b; }
inline void add_into(mpz_class& acc, const mpz_class& a) { mpz_add(acc.get_mpz_t(), acc.get_mpz_t(), a.get_mpz_t()); }
inline void add_into(mpq_class& acc, const mpq_class& a) { acc += a; }
inline bool is_zero(const mpz_class& a) { return mpz_sgn(a.get_mpz_t()) == 0; }
inline bool is_zero(const mpq_class& a) { return mpq_sgn(a.get_mpq_t()) == 0; }

template <class T>
T convert(const Rat& r);
template <>
mpz_class convert<mpz_class>(const Rat& r) {
  return r.get_num();
}
template <>
mpq_class convert<mpq_class>(const Rat& r) {
  return r;
}
inline Rat to_rat(const mpz_class& v) { return Rat(v); }
inline Rat to_rat(const mpq_class& v) { return v; }

template <class T>
void trim(std::vector<T>& v) {
  while (!v.empty() && is_zero(v.back())) v.pop_back();
}

using SlotMono = std::array<std::uint32_t, 3>;

// Online order-by-order solver for M(z,u) = R(z,u,Delta,M1,M0) (k = 2) or
// R(z,u,Delta,M0) (k = 1). Every y-monomial of R is a node whose z-series is
// grown with the solution; products are formed one z-order at a time.
template <class T>
class Engine {
 public:
  using UPoly = std::vector<T>;

  Engine(const Poly& r, const std::vector<Poly>& extras, int k, int order, bool truncate, std::size_t u_cap)
      : k_(k), order_(order), truncate_(truncate), u_cap_(u_cap) {
    for (int s = 0; s < 3; ++s) {
      Node n;
      n.p = {0, 0, 0};
      n.p[static_cast<std::size_t>(s)] = 1;
      nodes_.push_back(n);
      node_id_[n.p] = s;
    }
    r_groups_ = make_groups(r, true);
    for (const Poly& e : extras) extra_groups_.push_back(make_groups(e, false));
    for (auto& n : nodes_) n.series.resize(static_cast<std::size_t>(order) + 1);
  }

  void run() {
    if (truncate_ && extra_groups_.empty()) mark_prunable();
    for (int n = 0; n <= order_; ++n) step(n);
  }

  const std::vector<UPoly>& m() const { return m_; }
  const std::vector<T>& m0() const { return m0_; }
  const std::vector<T>& m1() const { return m1_; }

  std::vector<UPoly> extra(std::size_t i) const {
    std::vector<UPoly> out(static_cast<std::size_t>(order_) + 1);
    for (int n = 0; n <= order_; ++n) out[static_cast<std::size_t>(n)] = accumulate(extra_groups_[i], n, u_cap_, false);
    return out;
  }

 private:
  struct Term {
    std::uint32_t b, a;
    T c;
    bool one;
  };
  struct Group {
    int node;  // -1 is the constant monomial
    std::vector<Term> terms;
  };
  struct Node {
    SlotMono p;
    int parent = -1;
    int factor = -1;
    bool operand = false;
    std::uint32_t max_lag = 0;
    std::vector<UPoly> series;
  };

  int node_for(const SlotMono& p) {
    if (p[0] + p[1] + p[2] == 0) return -1;
    auto it = node_id_.find(p);
    if (it != node_id_.end()) return it->second;
    int factor = p[2] > 0 ? 2 : (p[1] > 0 ? 1 : 0);
    SlotMono q = p;
    --q[static_cast<std::size_t>(factor)];
    int parent = node_for(q);
    Node n;
    n.p = p;
    n.parent = parent;
    n.factor = factor;
    nodes_[static_cast<std::size_t>(parent)].operand = true;
    nodes_[static_cast<std::size_t>(factor)].operand = true;
    nodes_.push_back(n);
    int id = static_cast<int>(nodes_.size()) - 1;
    node_id_[p] = id;
    product_order_.push_back(id);
    return id;
  }

  std::vector<Group> make_groups(const Poly& poly, bool is_r) {
    std::map<SlotMono, std::vector<Term>> by_mono;
    for (const auto& [e, c] : poly.terms()) {
      SlotMono p = {e[3], e[4], e[5]};
      if (is_r && p[0] + p[1] + p[2] > 0 && e[0] == 0) {
        fail(ErrorCode::SyntaxError, "R-form term with a y factor lacks the factor z");
      }
      by_mono[p].push_back(Term{e[0], e[1], convert<T>(c), c == 1});
    }
    std::vector<Group> groups;
    for (auto& [p, terms] : by_mono) {
      Group g;
      g.node = node_for(p);
      g.terms = std::move(terms);
      if (is_r && g.node >= 0) {
        auto& n = nodes_[static_cast<std::size_t>(g.node)];
        for (const auto& t : g.terms) n.max_lag = std::max(n.max_lag, t.b);
      }
      groups.push_back(std::move(g));
    }
    return groups;
  }

  void mark_prunable() {
    for (auto& n : nodes_) prunable_.push_back(!n.operand);
    // The base slots y1, y2 are tiny; only Delta and unused products matter.
  }

  const UPoly* node_entry(int node, int n) const {
    if (n < 0) return nullptr;
    if (node < 0) return n == 0 ? &one_ : nullptr;
    return &nodes_[static_cast<std::size_t>(node)].series[static_cast<std::size_t>(n)];
  }

  UPoly accumulate(const std::vector<Group>& groups, int n, std::size_t cap, bool check_cap) const {
    std::size_t top = 0;
    bool any = false;
    for (const auto& g : groups) {
      for (const auto& t : g.terms) {
        const UPoly* s = node_entry(g.node, n - static_cast<int>(t.b));
        if (!s || s->empty()) continue;
        top = std::max(top, t.a + s->size() - 1);
        any = true;
      }
    }
    UPoly acc;
    if (!any) return acc;
    if (check_cap && top > cap) {
      fail(ErrorCode::UDegreeCapExceeded, "u-degree " + std::to_string(top) + " at z-order " + std::to_string(n) +
                                              " exceeds the cap " + std::to_string(cap));
    }
    acc.resize(std::min(top, cap) + 1);
    for (const auto& g : groups) {
      for (const auto& t : g.terms) {
        const UPoly* s = node_entry(g.node, n - static_cast<int>(t.b));
        if (!s || s->empty() || t.a > cap) continue;
        std::size_t len = std::min(s->size(), cap - t.a + 1);
        T* out = acc.data() + t.a;
        const T* in = s->data();
        if (t.one) {
          for (std::size_t j = 0; j < len; ++j) add_into(out[j], in[j]);
        } else {
          for (std::size_t j = 0; j < len; ++j) fma_into(out[j], t.c, in[j]);
        }
      }
    }
    trim(acc);
    return acc;
  }

  // Keeps u^1 at the top order so M1 is exact for k = 1 too.
  int slack() const { return std::max(k_ - 1, 1); }

  std::size_t cap_m(int n) const {
    if (!truncate_) return u_cap_;
    return static_cast<std::size_t>(k_ * (order_ - n) + slack());
  }

  void step(int n) {
    UPoly t = accumulate(r_groups_, n, cap_m(n), !truncate_);
    const std::size_t un = static_cast<std::size_t>(n);
    m0_.push_back(t.size() > 0 ? t[0] : T(0));
    m1_.push_back(t.size() > 1 ? t[1] : T(0));
    if (k_ == 2) {
      if (!is_zero(m1_.back())) nodes_[1].series[un] = {m1_.back()};
      if (!is_zero(m0_.back())) nodes_[2].series[un] = {m0_.back()};
    } else {
      if (!is_zero(m0_.back())) nodes_[1].series[un] = {m0_.back()};
    }
    if (t.size() > static_cast<std::size_t>(k_)) {
      nodes_[0].series[un].assign(t.begin() + k_, t.end());
    }
    if (!truncate_) m_.push_back(std::move(t));
    if (truncate_ && n == order_) return;
    const std::size_t pcap = truncate_ ? static_cast<std::size_t>(k_ * (order_ - n - 1) + slack()) : u_cap_;
    for (int id : product_order_) extend_product(id, n, pcap);
    if (!prunable_.empty()) prune(n);
  }

  void extend_product(int id, int n, std::size_t cap) {
    Node& node = nodes_[static_cast<std::size_t>(id)];
    const Node& par = nodes_[static_cast<std::size_t>(node.parent)];
    const Node& fac = nodes_[static_cast<std::size_t>(node.factor)];
    std::size_t top = 0;
    bool any = false;
    for (int i = 0; i <= n; ++i) {
      const UPoly& a = par.series[static_cast<std::size_t>(i)];
      const UPoly& b = fac.series[static_cast<std::size_t>(n - i)];
      if (a.empty() || b.empty()) continue;
      top = std::max(top, a.size() + b.size() - 2);
      any = true;
    }
    UPoly& acc = node.series[static_cast<std::size_t>(n)];
    acc.clear();
    if (!any) return;
    acc.resize(std::min(top, cap) + 1);
    const std::size_t alen = acc.size();
    auto mul_into = [&](const UPoly& a, const UPoly& b) {
      if (a.empty() || b.empty()) return;
      const std::size_t la = std::min(a.size(), alen);
      for (std::size_t ia = 0; ia < la; ++ia) {
        if (is_zero(a[ia])) continue;
        const std::size_t lb = std::min(b.size(), alen - ia);
        T* out = acc.data() + ia;
        for (std::size_t ib = 0; ib < lb; ++ib) fma_into(out[ib], a[ia], b[ib]);
      }
    };
    if (node.parent == node.factor) {
      // Square: each off-diagonal pair once, then doubled.
      for (int i = 0; 2 * i < n; ++i) {
        mul_into(par.series[static_cast<std::size_t>(i)], par.series[static_cast<std::size_t>(n - i)]);
      }
      for (auto& c : acc) c *= 2;
      if (n % 2 == 0) {
        const UPoly& mid = par.series[static_cast<std::size_t>(n / 2)];
        mul_into(mid, mid);
      }
    } else {
      for (int i = 0; i <= n; ++i) {
        mul_into(par.series[static_cast<std::size_t>(i)], fac.series[static_cast<std::size_t>(n - i)]);
      }
    }
    trim(acc);
  }

  void prune(int n) {
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
      if (!prunable_[id]) continue;
      int drop = n - static_cast<int>(nodes_[id].max_lag);
      if (drop >= 0) UPoly().swap(nodes_[id].series[static_cast<std::size_t>(drop)]);
    }
  }

  int k_;
  int order_;
  bool truncate_;
  std::size_t u_cap_;
  UPoly one_ = {T(1)};
  std::vector<Node> nodes_;
  std::map<SlotMono, int> node_id_;
  std::vector<int> product_order_;
  std::vector<bool> prunable_;
  std::vector<Group> r_groups_;
  std::vector<std::vector<Group>> extra_groups_;
  std::vector<UPoly> m_;
  std::vector<T> m0_, m1_;
};

Poly substitute_w(const Poly& p, const Rat& w) {
  if (!p.depends_on(Var::W)) return p;
  return p.substitute(Var::W, Poly(w));
}

template <class T>
BivariateSeries to_bivariate(const std::vector<std::vector<T>>& s) {
  BivariateSeries b;
  b.coeffs.reserve(s.size());
  for (const auto& row : s) {
    std::vector<Rat> r;
    r.reserve(row.size());
    for (const auto& c : row) r.push_back(to_rat(c));
    b.coeffs.push_back(std::move(r));
  }
  return b;
}

template <class T>
UnivariateSeries to_univariate(const std::vector<T>& s) {
  UnivariateSeries u;
  u.coeffs.reserve(s.size());
  for (const auto& c : s) u.coeffs.push_back(to_rat(c));
  return u;
}

template <class T>
SeriesWithExtras run_full(const Poly& r, const std::vector<Poly>& extras, int k, int order, std::size_t cap) {
  Engine<T> e(r, extras, k, order, false, cap);
  e.run();
  SeriesWithExtras out;
  out.m = to_bivariate(e.m());
  for (std::size_t i = 0; i < extras.size(); ++i) out.extras.push_back(to_bivariate(e.extra(i)));
  return out;
}

template <class T>
SectionSeries run_sections(const Poly& r, int k, int order) {
  Engine<T> e(r, {}, k, order, true, 0);
  e.run();
  return SectionSeries{to_univariate(e.m0()), to_univariate(e.m1())};
}

void check_order(int order) {
  if (order < 0) fail(ErrorCode::InvalidArgument, "series order must be non-negative");
}

}  // namespace

SeriesWithExtras solve_series_with(const CatalyticEquation& eq, int order, const std::vector<Poly>& extras,
                                   const SeriesOptions& options) {
  check_order(order);
  RForm rf(eq);
  Poly r = substitute_w(rf.r(), options.w);
  std::vector<Poly> ex;
  bool integral = r.all_integral();
  for (const Poly& p : extras) {
    ex.push_back(substitute_w(p, options.w));
    integral = integral && ex.back().all_integral();
  }
  if (integral) return run_full<mpz_class>(r, ex, eq.k, order, options.u_degree_cap);
  return run_full<mpq_class>(r, ex, eq.k, order, options.u_degree_cap);
}

BivariateSeries solve_series(const CatalyticEquation& eq, int order, const SeriesOptions& options) {
  return solve_series_with(eq, order, {}, options).m;
}

SectionSeries solve_sections(const CatalyticEquation& eq, int order, const SeriesOptions& options) {
  check_order(order);
  RForm rf(eq);
  Poly r = substitute_w(rf.r(), options.w);
  if (r.all_integral()) return run_sections<mpz_class>(r, eq.k, order);
  return run_sections<mpq_class>(r, eq.k, order);
}

Sections extract_sections(const BivariateSeries& m, int k) {
  Sections s;
  const std::size_t kk = static_cast<std::size_t>(k);
  for (const auto& row : m.coeffs) {
    s.m0.coeffs.push_back(row.size() > 0 ? row[0] : Rat(0));
    s.m1.coeffs.push_back(row.size() > 1 ? row[1] : Rat(0));
    std::vector<Rat> d;
    if (row.size() > kk) d.assign(row.begin() + static_cast<std::ptrdiff_t>(kk), row.end());
    s.delta.coeffs.push_back(std::move(d));
  }
  return s;
}

BivariateSeries curve_series(const CatalyticEquation& eq, int order, const SeriesOptions& options) {
  RForm rf(eq);
  return solve_series_with(eq, order, {rf.partial(PartialIndex{0, 0, 1, 0, 0})}, options).extras[0];
}

GHPair solve_gh_from_curve(const BivariateSeries& curve) {
  const int order = curve.order();
  const std::size_t top = curve.max_u_degree();
  bool odd = false, c0 = false, c1 = false;
  for (const auto& row : curve.coeffs) {
    for (std::size_t j = 1; j < row.size(); j += 2) odd = odd || row[j] != 0;
    c0 = c0 || (row.size() > 0 && row[0] != 0);
    c1 = c1 || (row.size() > 1 && row[1] != 0);
  }
  if (!c0 && !c1) fail(ErrorCode::TrivialPuiseuxRoots, "u^2 divides the curve series");
  if (!odd) fail(ErrorCode::DegenerateEvenCurve, "the curve series contains only even powers of u");

  // Binomial coefficients up to the u-degree of the curve.
  std::vector<std::vector<BigInt>> binom(top + 1);
  for (std::size_t n = 0; n <= top; ++n) {
    binom[n].assign(n + 1, 1);
    for (std::size_t r = 1; r < n; ++r) binom[n][r] = binom[n - 1][r - 1] + binom[n - 1][r];
  }
  // One contribution per (u-power k, g-power a, h-power b, parity) with a + 2b (+1) = k.
  struct Contribution {
    std::size_t k;
    std::pair<int, int> pw;
    BigInt weight;
    bool odd_part;
  };
  std::vector<Contribution> contributions;
  std::set<std::pair<int, int>> needed;  // stored as (b, a) for evaluation order
  for (std::size_t k = 0; k <= top; ++k) {
    bool nonzero = false;
    for (const auto& row : curve.coeffs) nonzero = nonzero || (row.size() > k && row[k] != 0);
    if (!nonzero) continue;
    for (std::size_t j = 0; j <= k; ++j) {
      int b = static_cast<int>(j / 2);
      int a = static_cast<int>(k - j);
      if (a + b + 1 > order) continue;
      contributions.push_back({k, {a, b}, binom[k][j], j % 2 == 1});
      for (int bb = 0; bb <= b; ++bb) needed.insert({bb, 0});
      for (int aa = 0; aa <= a; ++aa) needed.insert({b, aa});
    }
  }
  const std::size_t len = static_cast<std::size_t>(order) + 1;
  std::map<std::pair<int, int>, std::vector<Rat>> pw;  // key (a, b)
  for (const auto& [b, a] : needed) pw[{a, b}].assign(len, Rat(0));
  pw[{0, 0}][0] = 1;

  GHPair out;
  out.g.coeffs.assign(len, Rat(0));
  out.h.coeffs.assign(len, Rat(0));
  auto& g = out.g.coeffs;
  auto& h = out.h.coeffs;
  for (std::size_t n = 1; n < len; ++n) {
    Rat plus = 0, minus = 0;
    for (const auto& c : contributions) {
      const auto& p = pw.at(c.pw);
      Rat acc = 0;
      for (std::size_t i = 1; i <= n; ++i) {
        const auto& row = curve.coeffs[i];
        if (row.size() <= c.k || row[c.k] == 0 || p[n - i] == 0) continue;
        acc += row[c.k] * p[n - i];
      }
      if (acc == 0) continue;
      (c.odd_part ? minus : plus) += acc * Rat(c.weight);
    }
    g[n] = minus / 2;
    Rat gg = 0;
    for (std::size_t i = 1; i < n; ++i) gg += g[i] * g[n - i];
    h[n] = plus - gg;
    if (sgn(g[n]) < 0 || sgn(h[n]) < 0) {
      fail(ErrorCode::NegativeCoefficientDetected,
           "negative coefficient in the g/h split at z^" + std::to_string(n) + ": g=" + format_rat(g[n]) +
               " h=" + format_rat(h[n]));
    }
    for (const auto& [b, a] : needed) {
      if (a == 0 && b == 0) continue;
      auto& target = pw[{a, b}];
      const auto& base = a > 0 ? pw.at({a - 1, b}) : pw.at({0, b - 1});
      const auto& f = a > 0 ? g : h;
      Rat acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (base[i] == 0 || f[n - i] == 0) continue;
        acc += base[i] * f[n - i];
      }
      target[n] = acc;
    }
  }

  auto support = [](const std::vector<Rat>& s) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != 0) idx.push_back(static_cast<int>(i));
    }
    return idx;
  };
  auto sg = support(g), sh = support(h);
  out.d1 = sg.empty() ? 0 : sg.front();
  out.d2 = sh.empty() ? 0 : sh.front();
  int d = 0;
  for (int i : sg) d = std::gcd(d, i - out.d1);
  for (int i : sh) d = std::gcd(d, i - out.d2);
  out.d = d == 0 ? 1 : d;
  return out;
}

GHPair solve_gh_series(const CatalyticEquation& eq, int order, const SeriesOptions& options) {
  if (eq.k != 2) fail(ErrorCode::WrongK, "the g/h split is defined for k = 2");
  return solve_gh_from_curve(curve_series(eq, order, options));
}

Period support_period(const UnivariateSeries& s, int ignore_prefix) {
  std::vector<int> idx;
  for (int i = std::max(ignore_prefix, 0); i <= s.order(); ++i) {
    if (s.coeffs[static_cast<std::size_t>(i)] != 0) idx.push_back(i);
  }
  if (idx.size() < 10) {
    fail(ErrorCode::InsufficientData, "only " + std::to_string(idx.size()) + " nonzero coefficients beyond the prefix");
  }
  int d = 0;
  for (int i : idx) d = std::gcd(d, i - idx.front());
  Period p;
  p.d = d;
  for (int i : idx) p.residues.insert(i % d);
  return p;
}

namespace {

struct ClassSequence {
  std::vector<int> n;
  std::vector<double> value;
  int zero_count = 0;
  int total = 0;
};

// Richardson in 1/n over the points n, n/2, n/4 (snapped to the sequence).
struct Extrapolants {
  double level1 = 0.0, level2 = 0.0;
};

Extrapolants richardson_at(const ClassSequence& s, std::size_t top) {
  auto nearest = [&](double target) {
    auto it = std::lower_bound(s.n.begin(), s.n.end(), static_cast<int>(std::lround(target)));
    if (it == s.n.end()) --it;
    if (it != s.n.begin()) {
      auto prev = it - 1;
      if (std::abs(*prev - target) < std::abs(*it - target)) it = prev;
    }
    return static_cast<std::size_t>(it - s.n.begin());
  };
  const std::size_t i0 = top;
  const std::size_t i1 = nearest(s.n[top] / 2.0);
  const std::size_t i2 = nearest(s.n[top] / 4.0);
  auto h = [&](std::size_t i) { return 1.0 / s.n[i]; };
  Extrapolants e;
  e.level1 = extrapolate_to_zero({h(i0), h(i1)}, {s.value[i0], s.value[i1]});
  e.level2 = extrapolate_to_zero({h(i0), h(i1), h(i2)}, {s.value[i0], s.value[i1], s.value[i2]});
  return e;
}

}  // namespace

FitResult oracle_fit(const UnivariateSeries& coeffs, double z0, double alpha, int d, int j, double threshold) {
  if (d < 1 || j < 0 || j >= d) fail(ErrorCode::InvalidArgument, "residue class out of range");
  if (!(z0 > 0.0)) fail(ErrorCode::InvalidArgument, "z0 must be positive");
  ClassSequence s;
  const double lz = std::log(z0);
  for (int n = j == 0 ? d : j; n <= coeffs.order(); n += d) {
    ++s.total;
    const Rat& c = coeffs.coeffs[static_cast<std::size_t>(n)];
    if (c == 0) {
      ++s.zero_count;
      continue;
    }
    s.n.push_back(n);
    s.value.push_back(std::exp(log_abs(c) + (1.0 + alpha) * std::log(static_cast<double>(n)) + n * lz));
  }
  FitResult r;
  r.used = s.total;
  if (s.total < 50) fail(ErrorCode::InsufficientData, "fewer than 50 coefficients in the residue class");
  if (s.n.empty()) {
    r.zero_class = true;
    return r;
  }
  if (s.n.size() < 12) fail(ErrorCode::InsufficientData, "too few nonzero coefficients in the residue class");
  const std::size_t last = s.n.size() - 1;
  std::vector<double> tops;
  for (std::size_t t = 0; t < 3; ++t) tops.push_back(richardson_at(s, last - t).level2);
  Extrapolants e = richardson_at(s, last);
  r.value = e.level2;
  double spread = 0.0;
  for (double a : tops) {
    for (double b : tops) spread = std::max(spread, std::abs(a - b));
  }
  r.error = std::max(spread, std::abs(e.level2 - e.level1));
  r.converged = r.error <= threshold * std::abs(r.value);
  return r;
}

namespace {

double ratio_tail_fit(const std::vector<double>& n, const std::vector<double>& value, std::size_t from, int terms) {
  const auto rows = static_cast<Eigen::Index>(n.size() - from);
  Eigen::MatrixXd a(rows, terms);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double inv = 1.0 / n[from + static_cast<std::size_t>(i)];
    double p = 1.0;
    for (int t = 0; t < terms; ++t, p *= inv) a(i, t) = p;
    b[i] = value[from + static_cast<std::size_t>(i)];
  }
  return a.colPivHouseholderQr().solve(b)[0];
}

}  // namespace

RatioEstimate ratio_test(const UnivariateSeries& coeffs, int d, int j) {
  if (d < 1 || j < 0 || j >= d) fail(ErrorCode::InvalidArgument, "residue class out of range");
  ClassSequence s;
  for (int n = j + d; n <= coeffs.order(); n += d) {
    const Rat& a = coeffs.coeffs[static_cast<std::size_t>(n - d)];
    const Rat& b = coeffs.coeffs[static_cast<std::size_t>(n)];
    if (a == 0 || b == 0) continue;
    s.n.push_back(n);
    s.value.push_back(std::exp((log_abs(a) - log_abs(b)) / d));
  }
  if (s.n.size() < 12) fail(ErrorCode::InsufficientData, "too few consecutive nonzero coefficients for a ratio test");
  // Least squares for r_n = z0 + a/n + b/n^2 over a tail window; averaging
  // suppresses oscillations from subdominant singularities.
  // Geometric means of neighbouring ratios cancel an alternating component.
  std::vector<double> n, value;
  for (std::size_t i = 0; i + 1 < s.n.size(); ++i) {
    n.push_back(0.5 * (s.n[i] + s.n[i + 1]));
    value.push_back(std::sqrt(s.value[i] * s.value[i + 1]));
  }
  const std::size_t size = n.size();
  const std::size_t half = size / 2, quarter = size - size / 4;
  const double wide = ratio_tail_fit(n, value, half, 3);
  const double narrow = ratio_tail_fit(n, value, quarter, 3);
  const double linear = ratio_tail_fit(n, value, quarter, 2);
  RatioEstimate r;
  r.z0 = wide;
  r.error = std::max(std::abs(wide - narrow), std::abs(narrow - linear));
  return r;
}

}  // namespace catalytic
