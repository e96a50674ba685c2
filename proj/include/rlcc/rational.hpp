#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace rlcc {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(long long num, long long den = 1) { return Rational(num, den); }

double to_double(const Rational& r);
// Decimal rendering rounded half away from zero.
std::string to_decimal(const Rational& r, int places = 6);
// "num/den"
std::string to_fraction(const Rational& r);
// Parses "a", "a/b" or a finite decimal such as "0.1" exactly.
Rational parse_rational(const std::string& text);

}  // namespace rlcc
