#pragma once

// Arbitrary-precision rational scalars (GMP) and the scalar traits shared by
// the exact and floating matrix paths.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>

#include "nnrank/error.hpp"

namespace nnrank {

using Rational = mpq_class;

template <class Scalar>
inline constexpr bool is_exact_v = std::is_same_v<Scalar, Rational>;

/// Exact rational value of a finite double (every binary float is a dyadic rational).
inline Rational rational_from_double(double x) {
  require(std::isfinite(x), ErrorCode::domain, "non-finite value cannot be made rational");
  Rational q(x);
  q.canonicalize();
  return q;
}

/// Nearest double (ties to even); mpq_get_d alone truncates toward zero.
inline double to_double(const Rational& q) {
  const double d = q.get_d();
  if (Rational(d) == q) return d;
  const double e = std::nextafter(d, q > 0 ? HUGE_VAL : -HUGE_VAL);
  if (!std::isfinite(e)) return d;
  const Rational gap_d = abs(q - Rational(d)), gap_e = abs(q - Rational(e));
  if (gap_d != gap_e) return gap_d < gap_e ? d : e;
  std::int64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  return (bits & 1) == 0 ? d : e;
}
inline double to_double(double x) { return x; }

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational abs_value(const Rational& q) { return abs(q); }
inline double abs_value(double x) { return std::fabs(x); }

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Parses [+-]digits[.digits][e[+-]digits] exactly.
inline Rational parse_decimal(std::string_view s, const std::string& original) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    require(all_digits(exp_part) && exp_part.size() < 6, ErrorCode::format,
            "malformed exponent in '" + original + "'");
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  require(!(int_part.empty() && frac_part.empty()), ErrorCode::format,
          "empty numeric literal '" + original + "'");
  require((int_part.empty() || all_digits(int_part)) && (frac_part.empty() || all_digits(frac_part)),
          ErrorCode::format, "malformed numeric literal '" + original + "'");

  std::string digits = std::string(int_part) + std::string(frac_part);
  mpz_class numerator(digits.empty() ? std::string("0") : digits, 10);
  exponent -= static_cast<long>(frac_part.size());
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational value = exponent < 0 ? Rational(numerator, scale) : Rational(numerator * scale);
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

}  // namespace detail

/// Parses "p/q", integers and decimal literals (with optional exponent) exactly.
inline Rational parse_rational(std::string_view text) {
  const std::string original(text);
  std::string_view s = detail::trim(text);
  require(!s.empty(), ErrorCode::format, "empty numeric literal");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = detail::trim(s.substr(0, slash));
    std::string_view den = detail::trim(s.substr(slash + 1));
    bool negative = false;
    if (!num.empty() && (num.front() == '+' || num.front() == '-')) {
      negative = num.front() == '-';
      num.remove_prefix(1);
    }
    require(detail::all_digits(num) && detail::all_digits(den), ErrorCode::format,
            "malformed rational literal '" + original + "'");
    mpz_class d(std::string(den), 10);
    require(d != 0, ErrorCode::format, "zero denominator in '" + original + "'");
    Rational q(mpz_class(std::string(num), 10), d);
    q.canonicalize();
    return negative ? Rational(-q) : q;
  }
  return detail::parse_decimal(s, original);
}

}  // namespace nnrank
