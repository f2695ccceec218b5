#include "catalytic/rational.hpp"

#include <cctype>
#include <cmath>

#include "catalytic/error.hpp"

namespace catalytic {

namespace {

bool valid_integer_text(std::string_view s, bool allow_sign) {
  if (s.empty()) return false;
  std::size_t i = 0;
  if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Rat parse_rat(std::string_view text) {
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!valid_integer_text(num, true) || !valid_integer_text(den, false)) {
    fail(ErrorCode::SyntaxError, "malformed rational '" + std::string(text) + "'");
  }
  std::string n(num);
  if (n[0] == '+') n.erase(0, 1);
  BigInt p(n, 10);
  BigInt q(std::string(den), 10);
  if (q == 0) fail(ErrorCode::SyntaxError, "zero denominator in '" + std::string(text) + "'");
  Rat r(p, q);
  r.canonicalize();
  return r;
}

std::string format_rat(const Rat& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

double to_double(const Rat& value) {
  double d = value.get_d();
  if (std::isfinite(d) && d != 0.0) return d;
  if (value == 0) return 0.0;
  double l = log_abs(value);
  return (sgn(value) < 0 ? -1.0 : 1.0) * std::exp(l);
}

double log_abs(const BigInt& value) {
  long exp = 0;
  double m = mpz_get_d_2exp(&exp, value.get_mpz_t());
  return std::log(std::fabs(m)) + static_cast<double>(exp) * std::log(2.0);
}

double log_abs(const Rat& value) { return log_abs(value.get_num()) - log_abs(value.get_den()); }

bool is_integer(const Rat& value) { return value.get_den() == 1; }

}  // namespace catalytic
