#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "specmix/errors.hpp"

namespace specmix {

// Exact arithmetic for probability tables.  Spectra stay in double; see
// numerics.hpp.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

/// Parses "3", "-1/2" or "0.25" into an exact rational.
inline Rat parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw InputError("empty rational literal");

  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }

  auto digits = [&](std::size_t from, std::size_t to) -> BigInt {
    if (from == to) throw InputError("bad rational literal: " + text);
    BigInt v = 0;
    for (std::size_t k = from; k < to; ++k) {
      if (!std::isdigit(static_cast<unsigned char>(s[k])))
        throw InputError("bad rational literal: " + text);
      v = v * 10 + (s[k] - '0');
    }
    return v;
  };

  Rat value;
  auto slash = s.find('/', i);
  auto dot = s.find('.', i);
  auto exp = s.find_first_of("eE", i);
  if (slash != std::string::npos) {
    BigInt num = digits(i, slash);
    BigInt den = digits(slash + 1, s.size());
    if (den == 0) throw InputError("zero denominator: " + text);
    value = Rat(num, den);
  } else if (dot != std::string::npos || exp != std::string::npos) {
    std::size_t mant_end = exp == std::string::npos ? s.size() : exp;
    BigInt ipart = dot == std::string::npos || dot > mant_end
                       ? digits(i, mant_end)
                       : (dot == i ? BigInt(0) : digits(i, dot));
    BigInt fpart = 0;
    long fdigits = 0;
    if (dot != std::string::npos && dot < mant_end) {
      if (dot + 1 < mant_end) fpart = digits(dot + 1, mant_end);
      fdigits = static_cast<long>(mant_end - dot - 1);
    }
    BigInt scale = 1;
    for (long k = 0; k < fdigits; ++k) scale *= 10;
    value = Rat(ipart * scale + fpart, scale);
    if (exp != std::string::npos) {
      std::size_t e = exp + 1;
      bool eneg = false;
      if (e < s.size() && (s[e] == '+' || s[e] == '-')) {
        eneg = s[e] == '-';
        ++e;
      }
      BigInt ev = digits(e, s.size());
      BigInt pow10 = 1;
      for (BigInt k = 0; k < ev; ++k) pow10 *= 10;
      if (eneg)
        value /= Rat(pow10);
      else
        value *= Rat(pow10);
    }
  } else {
    value = Rat(digits(i, s.size()));
  }
  return neg ? -value : value;
}

inline std::string format_rational(const Rat& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

inline Rat rat_pow(const Rat& base, unsigned exponent) {
  Rat acc = 1;
  for (unsigned i = 0; i < exponent; ++i) acc *= base;
  return acc;
}

inline BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  BigInt acc = 1;
  for (unsigned i = 0; i < k; ++i) {
    acc *= n - i;
    acc /= i + 1;
  }
  return acc;
}

}  // namespace specmix
