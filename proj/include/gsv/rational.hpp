#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gsv {

// Exact arbitrary-precision rational. GMP keeps every mpq_class result in
// canonical form (lowest terms, positive denominator).
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

// Accepts "p/q", "p", and exact decimals such as "-0.125" or "2.5e-3".
// Throws GsvError(kParse) on anything else.
Rational parse_rational(std::string_view text);

// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& value);
std::vector<std::string> to_strings(std::span<const Rational> values);

// num/den in lowest terms. mpq_class(num, den) alone does not reduce.
Rational make_rational(long num, long den);

Rational abs(const Rational& value);

// Smallest integer k >= 0 with k*k >= value (value >= 0).
mpz_class ceil_sqrt(const Rational& value);

// 2^exponent as an exact rational (exponent may be negative).
Rational pow2(int exponent);
Rational pow(const Rational& base, unsigned long exponent);

double to_double(const Rational& value);

}  // namespace gsv
