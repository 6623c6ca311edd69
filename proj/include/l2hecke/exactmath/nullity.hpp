#pragma once

// Exact nullity of integer matrices too large for rational elimination.
//
// rank mod p never exceeds rank over Q, so a full-column-rank reduction
// modulo any prime certifies nullity 0. Otherwise the reduced echelon form mod
// p yields a candidate kernel basis; it is lifted to Q by CRT and rational
// reconstruction and checked by exact integer multiplication. A verified
// basis with as many vectors as there are free columns certifies the
// nullity. If no prime count up to the budget succeeds, rational elimination
// settles it.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "l2hecke/error.hpp"
#include "l2hecke/exactmath/matrix.hpp"
#include "l2hecke/exactmath/rational.hpp"

namespace l2hecke {

namespace detail {

inline bool is_prime_u32(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// The i-th prime below 2^31, counting downward. Deterministic.
inline std::uint32_t modular_prime(std::size_t index) {
  static const std::vector<std::uint32_t> primes = [] {
    std::vector<std::uint32_t> out;
    for (std::uint32_t p = 2147483647u; out.size() < 64; p -= 2)
      if (is_prime_u32(p)) out.push_back(p);
    return out;
  }();
  return primes.at(index);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
  std::uint64_t r = 1;
  base %= p;
  while (exp) {
    if (exp & 1) r = r * base % p;
    base = base * base % p;
    exp >>= 1;
  }
  return r;
}

/// y += f * x (mod p) elementwise, with Shoup's precomputed quotient so the
/// loop needs no division. Entries and f lie in [0, p), p < 2^31.
inline void axpy_mod(std::uint32_t* y, const std::uint32_t* x, std::size_t len, std::uint32_t f, std::uint32_t p) {
  const std::uint64_t f_shoup = (static_cast<std::uint64_t>(f) << 32) / p;
  for (std::size_t k = 0; k < len; ++k) {
    const std::uint32_t q = static_cast<std::uint32_t>((f_shoup * x[k]) >> 32);
    std::uint32_t r = f * x[k] - q * p;
    r = r >= p ? r - p : r;
    std::uint32_t s = y[k] + r;
    y[k] = s >= p ? s - p : s;
  }
}

struct ModularEchelon {
  std::uint32_t prime = 0;
  std::vector<std::size_t> pivot_cols;
  /// Kernel basis mod p, one vector per free column, in free-column order.
  std::vector<std::vector<std::uint32_t>> kernel;
};

/// Gauss-Jordan elimination mod p with first-nonzero pivoting. The kernel
/// basis is only formed when want_kernel is set and the rank is deficient.
inline ModularEchelon modular_echelon(const SparseIntMatrix& m, std::uint32_t p, bool want_kernel) {
  const std::size_t rows = m.rows(), cols = m.cols();
  const std::uint64_t P = p;
  std::vector<std::uint32_t> a(rows * cols, 0);
  for (const auto& e : m.entries()) {
    std::int64_t v = e.value % static_cast<std::int64_t>(p);
    if (v < 0) v += p;
    a[e.row * cols + e.col] = static_cast<std::uint32_t>(v);
  }
  ModularEchelon out;
  out.prime = p;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && a[piv * cols + c] == 0) ++piv;
    if (piv == rows) continue;
    if (piv != rank) std::swap_ranges(a.begin() + piv * cols + c, a.begin() + piv * cols + cols, a.begin() + rank * cols + c);
    std::uint32_t* pr = &a[rank * cols];
    const std::uint64_t inv = pow_mod(pr[c], P - 2, P);
    for (std::size_t k = c; k < cols; ++k) pr[k] = static_cast<std::uint32_t>(pr[k] * inv % P);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      std::uint32_t* rr = &a[r * cols];
      if (rr[c] == 0) continue;
      axpy_mod(rr + c, pr + c, cols - c, p - rr[c], p);
    }
    out.pivot_cols.push_back(c);
    ++rank;
  }
  if (!want_kernel || rank == cols) return out;

  // Back-eliminate above each pivot to reach reduced echelon form.
  for (std::size_t i = rank; i-- > 0;) {
    const std::size_t c = out.pivot_cols[i];
    const std::uint32_t* pr = &a[i * cols];
    for (std::size_t r = 0; r < i; ++r) {
      std::uint32_t* rr = &a[r * cols];
      if (rr[c] == 0) continue;
      axpy_mod(rr + c, pr + c, cols - c, p - rr[c], p);
    }
  }
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : out.pivot_cols) is_pivot[c] = true;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<std::uint32_t> v(cols, 0);
    v[f] = 1;
    for (std::size_t i = 0; i < rank; ++i) {
      const std::uint32_t x = a[i * cols + f];
      v[out.pivot_cols[i]] = x == 0 ? 0 : static_cast<std::uint32_t>(P - x);
    }
    out.kernel.push_back(std::move(v));
  }
  return out;
}

/// Finds a/b with |a|, b <= sqrt(M/2) and a = b*r (mod M), if one exists.
inline std::optional<BigRational> rational_reconstruction(const BigInt& residue, const BigInt& modulus) {
  BigInt bound;
  mpz_fdiv_q_2exp(bound.get_mpz_t(), modulus.get_mpz_t(), 1);
  mpz_sqrt(bound.get_mpz_t(), bound.get_mpz_t());
  BigInt r0 = modulus, r1 = residue, t0 = 0, t1 = 1;
  while (r1 > bound) {
    BigInt q = r0 / r1;
    BigInt r2 = r0 - q * r1;
    BigInt t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  if (t1 == 0 || abs(t1) > bound) return std::nullopt;
  BigInt g;
  mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), t1.get_mpz_t());
  if (g != 1) return std::nullopt;
  return make_rational(r1, t1);
}

/// Checks m * v == 0 exactly for a rational vector v.
inline bool is_exact_kernel_vector(const SparseIntMatrix& m, const std::vector<BigRational>& v) {
  BigInt lcm(1);
  for (const auto& x : v) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.get_den().get_mpz_t());
  std::vector<BigInt> iv(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) iv[i] = v[i].get_num() * (lcm / v[i].get_den());
  BigInt acc;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    acc = 0;
    auto [cols, vals] = m.row(r);
    for (std::size_t k = 0; k < m.row_size(r); ++k) acc += iv[cols[k]] * static_cast<long>(vals[k]);
    if (acc != 0) return false;
  }
  return true;
}

}  // namespace detail

struct NullityOptions {
  /// Number of primes combined before falling back to rational elimination.
  std::size_t max_primes = 24;
};

/// Exact dimension of the kernel of an integer matrix (cols - rank over Q).
inline std::size_t integer_nullity(const SparseIntMatrix& m, NullityOptions options = {}) {
  if (m.cols() == 0) return 0;
  if (m.nonzeros() == 0) return m.cols();

  std::optional<detail::ModularEchelon> reference;
  std::vector<std::vector<BigInt>> residues;  // CRT-combined kernel entries
  BigInt modulus(1);

  for (std::size_t i = 0; i < options.max_primes; ++i) {
    detail::ModularEchelon e = detail::modular_echelon(m, detail::modular_prime(i), true);
    if (e.pivot_cols.size() == m.cols()) return 0;
    if (reference && e.pivot_cols != reference->pivot_cols) {
      // Larger rank (or earlier pivots) means the reference prime was unlucky.
      bool better = e.pivot_cols.size() > reference->pivot_cols.size() ||
                    (e.pivot_cols.size() == reference->pivot_cols.size() &&
                     std::lexicographical_compare(e.pivot_cols.begin(), e.pivot_cols.end(),
                                                  reference->pivot_cols.begin(), reference->pivot_cols.end()));
      if (!better) continue;
      reference.reset();
    }
    if (!reference) {
      reference = e;
      modulus = e.prime;
      residues.assign(e.kernel.size(), std::vector<BigInt>(m.cols()));
      for (std::size_t v = 0; v < e.kernel.size(); ++v)
        for (std::size_t k = 0; k < m.cols(); ++k) residues[v][k] = static_cast<unsigned long>(e.kernel[v][k]);
    } else {
      // x = r (mod M), x = s (mod p)  ->  x = r + M * ((s - r) * M^{-1} mod p).
      BigInt p(static_cast<unsigned long>(e.prime)), minv;
      mpz_invert(minv.get_mpz_t(), modulus.get_mpz_t(), p.get_mpz_t());
      for (std::size_t v = 0; v < e.kernel.size(); ++v)
        for (std::size_t k = 0; k < m.cols(); ++k) {
          BigInt t = (BigInt(static_cast<unsigned long>(e.kernel[v][k])) - residues[v][k]) * minv;
          mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
          residues[v][k] += modulus * t;
        }
      modulus *= p;
    }

    bool all_verified = true;
    for (const auto& res : residues) {
      std::vector<BigRational> candidate(m.cols());
      for (std::size_t k = 0; k < m.cols() && all_verified; ++k) {
        auto x = detail::rational_reconstruction(res[k], modulus);
        if (!x) all_verified = false;
        else candidate[k] = *x;
      }
      if (!all_verified || !detail::is_exact_kernel_vector(m, candidate)) {
        all_verified = false;
        break;
      }
    }
    if (all_verified) return residues.size();
  }
  return exact_nullity(m.to_rational());
}

}  // namespace l2hecke
