#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace catalytic {

// Exact rational number, always kept in canonical form.
using Rat = mpq_class;
using BigInt = mpz_class;

// Parses "p", "p/q" or "-p/q". Throws Error(SyntaxError) on malformed input.
Rat parse_rat(std::string_view text);

// "p" when the denominator is 1, "p/q" otherwise.
std::string format_rat(const Rat& value);

double to_double(const Rat& value);

// Natural logarithm of |value| without overflow; value must be nonzero.
double log_abs(const Rat& value);
double log_abs(const BigInt& value);

bool is_integer(const Rat& value);

// Conversion to a floating scalar type. Types other than double must be
// constructible from a decimal integer string.
template <class S>
S from_rat(const Rat& value) {
  return S(value.get_num().get_str()) / S(value.get_den().get_str());
}

template <>
inline double from_rat<double>(const Rat& value) {
  return to_double(value);
}

}  // namespace catalytic
