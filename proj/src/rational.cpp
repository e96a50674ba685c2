#include "rlcc/rational.hpp"

#include <stdexcept>

namespace rlcc {

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_decimal(const Rational& r, int places) {
  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  const bool negative = num < 0;
  const BigInt mag = negative ? BigInt(-num) : num;
  BigInt scaled = (mag * scale * 2 + den) / (den * 2);
  const BigInt whole = scaled / scale;
  const BigInt rem = scaled % scale;
  std::string frac = rem.str();
  std::string out = (negative && scaled != 0 ? "-" : "") + whole.str();
  if (places > 0) {
    out += '.';
    out += std::string(static_cast<std::size_t>(places) - frac.size(), '0') + frac;
  }
  return out;
}

std::string to_fraction(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

namespace {

// Decimal only: BigInt's string constructor reads a leading 0 as octal.
BigInt parse_decimal_int(const std::string& text, const std::string& whole) {
  std::size_t i = 0;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) i = 1;
  if (i == text.size()) throw std::invalid_argument("bad rational '" + whole + "'");
  BigInt out = 0;
  for (; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') throw std::invalid_argument("bad rational '" + whole + "'");
    out = out * 10 + (text[i] - '0');
  }
  return text[0] == '-' ? BigInt(-out) : out;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const BigInt den = parse_decimal_int(text.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return Rational(parse_decimal_int(text.substr(0, slash), text), den);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(parse_decimal_int(text, text));
  BigInt den = 1;
  for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
  return Rational(parse_decimal_int(text.substr(0, dot) + text.substr(dot + 1), text), den);
}

}  // namespace rlcc
