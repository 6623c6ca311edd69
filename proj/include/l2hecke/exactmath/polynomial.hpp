#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "l2hecke/error.hpp"
#include "l2hecke/exactmath/rational.hpp"

namespace l2hecke {

/// Univariate polynomial in t with arbitrary-precision integer coefficients.
/// coefficients()[k] is the coefficient of t^k; the highest stored
/// coefficient is nonzero, and the zero polynomial stores nothing.
class IntPolynomial {
 public:
  IntPolynomial() = default;
  IntPolynomial(long constant) : coeffs_{BigInt(constant)} { trim(); }
  explicit IntPolynomial(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static IntPolynomial monomial(const BigInt& c, std::size_t degree) {
    std::vector<BigInt> v(degree + 1, BigInt(0));
    v[degree] = c;
    return IntPolynomial(std::move(v));
  }

  /// -1 for the zero polynomial.
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<BigInt>& coefficients() const { return coeffs_; }
  BigInt coefficient(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : BigInt(0); }
  BigInt leading() const { return is_zero() ? BigInt(0) : coeffs_.back(); }

  BigRational evaluate(const BigRational& x) const {
    BigRational acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + BigRational(*it);
    return acc;
  }

  /// gcd of the coefficients, carrying the sign of the leading coefficient.
  BigInt content() const {
    BigInt g(0);
    for (const auto& c : coeffs_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (leading() < 0) g = -g;
    return g;
  }

  IntPolynomial primitive_part() const {
    if (is_zero()) return {};
    BigInt g = content();
    std::vector<BigInt> v(coeffs_);
    for (auto& c : v) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    return IntPolynomial(std::move(v));
  }

  IntPolynomial scaled(const BigInt& s) const {
    std::vector<BigInt> v(coeffs_);
    for (auto& c : v) c *= s;
    return IntPolynomial(std::move(v));
  }

  IntPolynomial divided_exactly_by(const BigInt& s) const {
    std::vector<BigInt> v(coeffs_);
    for (auto& c : v) {
      if (!mpz_divisible_p(c.get_mpz_t(), s.get_mpz_t()))
        throw Error(ErrorKind::Internal, "inexact scalar division of polynomial");
      mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), s.get_mpz_t());
    }
    return IntPolynomial(std::move(v));
  }

  friend IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b) {
    std::vector<BigInt> v(std::max(a.coeffs_.size(), b.coeffs_.size()), BigInt(0));
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) v[k] += a.coeffs_[k];
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) v[k] += b.coeffs_[k];
    return IntPolynomial(std::move(v));
  }

  friend IntPolynomial operator-(const IntPolynomial& a) { return a.scaled(BigInt(-1)); }
  friend IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b) { return a + (-b); }

  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<BigInt> v(a.coeffs_.size() + b.coeffs_.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      if (a.coeffs_[i] == 0) continue;
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return IntPolynomial(std::move(v));
  }

  friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) { return a.coeffs_ == b.coeffs_; }

  std::string to_string(char var = 't') const {
    if (is_zero()) return "0";
    std::string out;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      const BigInt& c = coeffs_[k];
      if (c == 0) continue;
      BigInt mag = c < 0 ? BigInt(-c) : c;
      if (out.empty()) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      if (k == 0 || mag != 1) out += mag.get_str();
      if (k > 0) {
        if (mag != 1) out += "*";
        out += var;
        if (k > 1) out += "^" + std::to_string(k);
      }
    }
    return out;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }

  std::vector<BigInt> coeffs_;
};

/// 1 + t + ... + t^e.
inline IntPolynomial geometric_sum_poly(unsigned e) {
  return IntPolynomial(std::vector<BigInt>(e + 1, BigInt(1)));
}

/// Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b, computed over Z.
inline IntPolynomial pseudo_remainder(const IntPolynomial& a, const IntPolynomial& b) {
  if (b.is_zero()) throw Error(ErrorKind::Internal, "pseudo-remainder by zero polynomial");
  if (a.degree() < b.degree()) return a;
  std::vector<BigInt> r(a.coefficients());
  const auto& bc = b.coefficients();
  const long db = b.degree();
  const BigInt lb = b.leading();
  for (long k = a.degree(); k >= db; --k) {
    BigInt lead = r[static_cast<std::size_t>(k)];
    for (auto& c : r) c *= lb;
    for (long j = 0; j <= db; ++j) r[static_cast<std::size_t>(k - db + j)] -= lead * bc[static_cast<std::size_t>(j)];
    r.pop_back();
  }
  return IntPolynomial(std::move(r));
}

/// Exact quotient a / b over Z[t]; throws if b does not divide a.
inline IntPolynomial exact_quotient(const IntPolynomial& a, const IntPolynomial& b) {
  if (b.is_zero()) throw Error(ErrorKind::Internal, "division by zero polynomial");
  if (a.is_zero()) return {};
  if (a.degree() < b.degree()) throw Error(ErrorKind::Internal, "inexact polynomial division");
  std::vector<BigInt> r(a.coefficients());
  std::vector<BigInt> q(static_cast<std::size_t>(a.degree() - b.degree() + 1), BigInt(0));
  const auto& bc = b.coefficients();
  const long db = b.degree();
  const BigInt lb = b.leading();
  for (long k = a.degree(); k >= db; --k) {
    BigInt& lead = r[static_cast<std::size_t>(k)];
    if (lead == 0) continue;
    if (!mpz_divisible_p(lead.get_mpz_t(), lb.get_mpz_t()))
      throw Error(ErrorKind::Internal, "inexact polynomial division");
    BigInt f;
    mpz_divexact(f.get_mpz_t(), lead.get_mpz_t(), lb.get_mpz_t());
    q[static_cast<std::size_t>(k - db)] = f;
    for (long j = 0; j <= db; ++j) r[static_cast<std::size_t>(k - db + j)] -= f * bc[static_cast<std::size_t>(j)];
  }
  for (const auto& c : r)
    if (c != 0) throw Error(ErrorKind::Internal, "inexact polynomial division");
  return IntPolynomial(std::move(q));
}

/// Greatest common divisor in Q[t], returned primitive with positive leading
/// coefficient (primitive remainder sequence). gcd(0, 0) = 0.
inline IntPolynomial poly_gcd(IntPolynomial a, IntPolynomial b) {
  if (a.is_zero() && b.is_zero()) return {};
  a = a.primitive_part();
  b = b.primitive_part();
  if (a.degree() < b.degree()) std::swap(a, b);
  while (!b.is_zero()) {
    IntPolynomial r = pseudo_remainder(a, b).primitive_part();
    a = std::move(b);
    b = std::move(r);
  }
  return a.primitive_part();
}

/// Quotient of integer polynomials kept in lowest terms: no common factor of
/// positive degree, no common integer content, and the lowest-order nonzero
/// coefficient of the denominator is positive (so 1/(1-t) stays as written).
class RationalFunction {
 public:
  RationalFunction() : num_(0), den_(1) {}
  RationalFunction(IntPolynomial num) : num_(std::move(num)), den_(1) {}
  RationalFunction(IntPolynomial num, IntPolynomial den) : num_(std::move(num)), den_(std::move(den)) {
    normalize();
  }

  const IntPolynomial& numerator() const { return num_; }
  const IntPolynomial& denominator() const { return den_; }
  bool is_polynomial() const { return den_.degree() == 0; }

  RationalFunction inverse() const {
    if (num_.is_zero()) throw Error(ErrorKind::PoleAtEvaluationPoint, "inverse of zero rational function");
    return RationalFunction(den_, num_);
  }

  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    return a * b.inverse();
  }
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string to_string(char var = 't') const {
    if (is_polynomial() && den_.leading() == 1) return num_.to_string(var);
    return "(" + num_.to_string(var) + ")/(" + den_.to_string(var) + ")";
  }

 private:
  void normalize() {
    if (den_.is_zero()) throw Error(ErrorKind::PoleAtEvaluationPoint, "rational function with zero denominator");
    if (num_.is_zero()) {
      den_ = IntPolynomial(1);
      return;
    }
    IntPolynomial g = poly_gcd(num_, den_);
    if (g.degree() > 0) {
      num_ = exact_quotient(num_, g);
      den_ = exact_quotient(den_, g);
    }
    BigInt c(0);
    for (const auto& x : num_.coefficients()) mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), x.get_mpz_t());
    for (const auto& x : den_.coefficients()) mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), x.get_mpz_t());
    const auto& dc = den_.coefficients();
    auto low = std::find_if(dc.begin(), dc.end(), [](const BigInt& x) { return x != 0; });
    if (*low < 0) c = -c;
    if (c != 1) {
      num_ = num_.divided_exactly_by(c);
      den_ = den_.divided_exactly_by(c);
    }
  }

  IntPolynomial num_;
  IntPolynomial den_;
};

/// Exact value f(q); PoleAtEvaluationPoint when the denominator vanishes at q.
inline BigRational ratfun_eval(const RationalFunction& f, const BigRational& q) {
  BigRational den = f.denominator().evaluate(q);
  if (den == 0)
    throw Error(ErrorKind::PoleAtEvaluationPoint, "denominator vanishes at " + to_string(q));
  return f.numerator().evaluate(q) / den;
}

}  // namespace l2hecke
