#include "fsmx/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "fsmx/error.hpp"

namespace fsmx {

namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_integer(std::string_view digits, std::string_view original) {
  if (digits.empty()) throw InvalidInput("malformed rational '" + std::string(original) + "'");
  cpp_int value = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw InvalidInput("malformed rational '" + std::string(original) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view original = text;
  text = trim(text);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational result;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    cpp_int num = parse_integer(trim(text.substr(0, slash)), original);
    cpp_int den = parse_integer(trim(text.substr(slash + 1)), original);
    if (den == 0) throw InvalidInput("zero denominator in '" + std::string(original) + "'");
    result = Rational(num, den);
  } else {
    std::string_view mantissa = text;
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      mantissa = text.substr(0, e);
      std::string_view exp_text = text.substr(e + 1);
      const char* first = exp_text.data();
      if (!exp_text.empty() && exp_text.front() == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, exp_text.data() + exp_text.size(), exponent);
      if (ec != std::errc() || ptr != exp_text.data() + exp_text.size())
        throw InvalidInput("malformed rational '" + std::string(original) + "'");
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false;
    for (char c : mantissa) {
      if (c == '.') {
        if (seen_dot) throw InvalidInput("malformed rational '" + std::string(original) + "'");
        seen_dot = true;
      } else {
        digits.push_back(c);
        if (seen_dot) ++frac_digits;
      }
    }
    cpp_int num = parse_integer(digits, original);
    long scale = exponent - frac_digits;
    cpp_int p10 = 1;
    for (long i = 0; i < std::labs(scale); ++i) p10 *= 10;
    result = scale >= 0 ? Rational(num * p10) : Rational(num, p10);
  }
  return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational pow(const Rational& base, unsigned exponent) {
  Rational result = 1;
  Rational b = base;
  while (exponent) {
    if (exponent & 1u) result *= b;
    b *= b;
    exponent >>= 1u;
  }
  return result;
}

std::string format_double(double x) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_decimal(std::string_view text) {
  text = trim(text);
  if (text.find('/') != std::string_view::npos) return to_double(parse_rational(text));
  std::string owned(text);
  char* end = nullptr;
  double v = std::strtod(owned.c_str(), &end);
  if (owned.empty() || end != owned.c_str() + owned.size() || !std::isfinite(v))
    throw InvalidInput("malformed number '" + owned + "'");
  return v;
}

}  // namespace fsmx
