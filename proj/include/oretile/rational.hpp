#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace oretile {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(std::int64_t num, std::int64_t den = 1) { return Rational(num, den); }

inline Integer numer(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer denom(const Rational& r) { return boost::multiprecision::denominator(r); }

Integer floor_rat(const Rational& r);
Integer ceil_rat(const Rational& r);

// Accepts "p", "p/q" and finite decimals such as "0.9" or "-1e-6".
Rational parse_rational(const std::string& text);

// "p/q", or "p" for integers.
std::string to_string(const Rational& r);

double to_double(const Rational& r);

Rational pow_rat(const Rational& base, unsigned exp);

} // namespace oretile
