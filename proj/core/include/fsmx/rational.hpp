#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace fsmx {

using Rational = boost::multiprecision::cpp_rational;

// Accepts "p/q", integers, and finite decimal literals ("0.125", "-3e-2").
// Decimals are converted exactly (0.1 becomes 1/10, not the nearest double).
Rational parse_rational(std::string_view text);

// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& r);

double to_double(const Rational& r);

Rational pow(const Rational& base, unsigned exponent);

// Shortest round-tripping decimal spelling of a double ("%.17g" trimmed).
std::string format_double(double x);

// Inverse of format_double; also accepts "p/q" rationals.
double parse_decimal(std::string_view text);

}  // namespace fsmx
