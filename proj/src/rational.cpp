#include "gsv/rational.hpp"

#include <cctype>

#include "gsv/error.hpp"

namespace gsv {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

[[noreturn]] void bad(std::string_view text) {
  throw GsvError(ErrorCode::kParse,
                 "not an exact rational: '" + std::string(text) + "'");
}

// Signed integer literal: optional sign followed by digits.
mpz_class parse_integer(std::string_view s, std::string_view whole) {
  std::string_view digits = s;
  bool negative = false;
  if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) {
    negative = digits.front() == '-';
    digits.remove_prefix(1);
  }
  if (!all_digits(digits)) bad(whole);
  mpz_class out(std::string(digits), 10);
  return negative ? mpz_class(-out) : out;
}

Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mpz_class exp = parse_integer(s.substr(e + 1), text);
    if (exp > 100000 || exp < -100000) bad(text);
    exponent = exp.get_si();
    s = s.substr(0, e);
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) bad(text);
  if (!int_part.empty() && !all_digits(int_part)) bad(text);
  if (!frac_part.empty() && !all_digits(frac_part)) bad(text);

  std::string digits = std::string(int_part) + std::string(frac_part);
  mpz_class mantissa(digits.empty() ? std::string("0") : digits, 10);
  exponent -= static_cast<long>(frac_part.size());

  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational out = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
  out.canonicalize();
  return negative ? Rational(-out) : out;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) bad(text);

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mpz_class num = parse_integer(text.substr(0, slash), text);
    mpz_class den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw GsvError(ErrorCode::kParse, "zero denominator in '" + std::string(text) + "'");
    Rational out(num, den);
    out.canonicalize();
    return out;
  }
  return parse_decimal(text);
}

std::string to_string(const Rational& value) { return value.get_str(); }

std::vector<std::string> to_strings(std::span<const Rational> values) {
  std::vector<std::string> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.get_str());
  return out;
}

Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

mpz_class ceil_sqrt(const Rational& value) {
  if (value <= 0) return 0;
  // floor(sqrt(ceil(value))) is a lower bound; step up until k^2 >= value.
  mpz_class upper = value.get_num() / value.get_den();
  if (upper * value.get_den() != value.get_num()) upper += 1;
  mpz_class k;
  mpz_sqrt(k.get_mpz_t(), upper.get_mpz_t());
  while (k > 0 && Rational(mpz_class((k - 1) * (k - 1))) >= value) k -= 1;
  while (Rational(mpz_class(k * k)) < value) k += 1;
  return k;
}

Rational make_rational(long num, long den) {
  if (den == 0) throw GsvError(ErrorCode::kInvalidArgument, "zero denominator");
  Rational out(num, den);
  out.canonicalize();
  return out;
}

Rational pow2(int exponent) {
  mpz_class p = 1;
  p <<= static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
  return exponent < 0 ? Rational(mpz_class(1), p) : Rational(p);
}

Rational pow(const Rational& base, unsigned long exponent) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  Rational out(num, den);
  out.canonicalize();
  return out;
}

double to_double(const Rational& value) { return value.get_d(); }

}  // namespace gsv
