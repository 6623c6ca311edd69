#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

#include "l2hecke/error.hpp"

namespace l2hecke {

using BigInt = mpz_class;
using BigRational = mpq_class;

/// Builds num/den in canonical form (reduced, positive denominator).
inline BigRational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw Error(ErrorKind::DimensionMismatch, "zero denominator");
  BigRational r(num, den);
  r.canonicalize();
  return r;
}

inline BigRational make_rational(long num, long den = 1) {
  return make_rational(BigInt(num), BigInt(den));
}

/// "num/den" in base 10, with "/den" omitted when den == 1.
inline std::string to_string(const BigRational& r) {
  if (r.get_den() == 1) return r.get_num().get_str(10);
  return r.get_num().get_str(10) + "/" + r.get_den().get_str(10);
}

inline std::string to_string(const BigInt& z) { return z.get_str(10); }

inline BigRational parse_rational(std::string_view text) {
  auto fail = [&] {
    throw Error(ErrorKind::ParseError, "not a rational: '" + std::string(text) + "'");
  };
  if (text.empty()) fail();
  auto slash = text.find('/');
  BigInt num, den(1);
  std::string n(text.substr(0, slash));
  if (num.set_str(n, 10) != 0) fail();
  if (slash != std::string_view::npos) {
    std::string d(text.substr(slash + 1));
    if (den.set_str(d, 10) != 0 || den == 0) fail();
  }
  return make_rational(num, den);
}

inline double to_double(const BigRational& r) { return r.get_d(); }

/// Decimal rendering with a fixed number of significant digits ("%.12g").
inline std::string to_decimal(const BigRational& r, int significant = 12) {
  // mpf keeps the conversion exact-ish for magnitudes outside double range.
  mpf_class f(r, 256);
  mp_exp_t exponent = 0;
  std::string digits = f.get_str(exponent, 10, static_cast<size_t>(significant));
  if (digits.empty() || digits == "0") return "0";
  double d = r.get_d();
  if (std::isfinite(d) && d != 0.0 && std::fabs(d) > 1e-300 && std::fabs(d) < 1e300) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, d);
    return buf;
  }
  bool negative = digits[0] == '-';
  if (negative) digits.erase(0, 1);
  std::string out = negative ? "-" : "";
  out += digits.substr(0, 1);
  if (digits.size() > 1) out += "." + digits.substr(1);
  out += "e" + std::to_string(static_cast<long>(exponent) - 1);
  return out;
}

inline BigInt pow_int(const BigInt& base, unsigned long exponent) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
  return out;
}

inline BigRational pow_rational(const BigRational& base, unsigned long exponent) {
  BigRational out(pow_int(base.get_num(), exponent), pow_int(base.get_den(), exponent));
  out.canonicalize();
  return out;
}

inline BigRational abs(const BigRational& r) { return r < 0 ? BigRational(-r) : r; }

}  // namespace l2hecke
