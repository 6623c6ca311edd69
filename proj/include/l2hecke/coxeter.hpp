#pragma once

// Exponents, Poincare series and the exact L2-invariants of Chevalley groups
// over F_q((t^-1)) and their lattices G(F_q[t]), with the Haar measure
// normalised so that the Iwahori subgroup has measure 1.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "l2hecke/error.hpp"
#include "l2hecke/exactmath.hpp"

namespace l2hecke::coxeter {

enum class Family { A, B, C, D, E6, E7, E8, F4, G2 };

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::B: return "B";
    case Family::C: return "C";
    case Family::D: return "D";
    case Family::E6: return "E6";
    case Family::E7: return "E7";
    case Family::E8: return "E8";
    case Family::F4: return "F4";
    case Family::G2: return "G2";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view s) {
  for (Family f : {Family::A, Family::B, Family::C, Family::D, Family::E6, Family::E7, Family::E8, Family::F4,
                   Family::G2})
    if (family_name(f) == s) return f;
  return std::nullopt;
}

/// Rank fixed by the family, or nullopt for the classical series.
inline std::optional<unsigned> fixed_rank(Family f) {
  switch (f) {
    case Family::E6: return 6;
    case Family::E7: return 7;
    case Family::E8: return 8;
    case Family::F4: return 4;
    case Family::G2: return 2;
    default: return std::nullopt;
  }
}

inline bool is_supported(Family f, unsigned rank) {
  if (auto r = fixed_rank(f)) return rank == *r;
  switch (f) {
    case Family::A: return rank >= 1;
    case Family::B:
    case Family::C: return rank >= 2;
    case Family::D: return rank >= 3;
    default: return false;
  }
}

/// Exponents e_1 <= ... <= e_d of the (finite or affine) Weyl group.
inline std::vector<unsigned> exponents(Family f, unsigned rank) {
  if (!is_supported(f, rank))
    throw Error(ErrorKind::UnsupportedType,
                std::string(family_name(f)) + std::to_string(rank) + " is not a supported Coxeter type");
  std::vector<unsigned> e;
  switch (f) {
    case Family::A:
      for (unsigned i = 1; i <= rank; ++i) e.push_back(i);
      break;
    case Family::B:
    case Family::C:
      for (unsigned i = 1; i <= rank; ++i) e.push_back(2 * i - 1);
      break;
    case Family::D:
      for (unsigned i = 1; i + 1 <= rank; ++i) e.push_back(2 * i - 1);
      e.push_back(rank - 1);
      std::sort(e.begin(), e.end());
      break;
    case Family::E6: e = {1, 4, 5, 7, 8, 11}; break;
    case Family::E7: e = {1, 5, 7, 9, 11, 13, 17}; break;
    case Family::E8: e = {1, 7, 11, 13, 17, 19, 23, 29}; break;
    case Family::F4: e = {1, 5, 7, 11}; break;
    case Family::G2: e = {1, 5}; break;
  }
  return e;
}

/// Number of positive roots, from the root-system classification.
inline unsigned positive_root_count(Family f, unsigned rank) {
  switch (f) {
    case Family::A: return rank * (rank + 1) / 2;
    case Family::B:
    case Family::C: return rank * rank;
    case Family::D: return rank * (rank - 1);
    case Family::E6: return 36;
    case Family::E7: return 63;
    case Family::E8: return 120;
    case Family::F4: return 24;
    case Family::G2: return 6;
  }
  return 0;
}

struct CoxeterDatum {
  Family family = Family::A;
  unsigned rank = 1;
  bool affine = false;
  std::vector<unsigned> exponents;

  std::string name() const {
    std::string base(family_name(family));
    if (!fixed_rank(family)) base += std::to_string(rank);
    return affine ? "~" + base : base;
  }

  unsigned exponent_sum() const {
    unsigned m = 0;
    for (unsigned e : exponents) m += e;
    return m;
  }

  friend bool operator==(const CoxeterDatum&, const CoxeterDatum&) = default;
};

inline CoxeterDatum make_datum(Family f, unsigned rank, bool affine) {
  return CoxeterDatum{f, rank, affine, exponents(f, rank)};
}

/// Every supported (family, rank) with rank <= max_rank.
inline std::vector<std::pair<Family, unsigned>> supported_types(unsigned max_rank) {
  std::vector<std::pair<Family, unsigned>> out;
  for (Family f : {Family::A, Family::B, Family::C, Family::D})
    for (unsigned r = 1; r <= max_rank; ++r)
      if (is_supported(f, r)) out.emplace_back(f, r);
  for (Family f : {Family::E6, Family::E7, Family::E8, Family::F4, Family::G2})
    if (*fixed_rank(f) <= max_rank) out.emplace_back(f, *fixed_rank(f));
  return out;
}

/// Growth series of the Coxeter group: prod (1 + t + ... + t^e_i), further
/// divided by prod (1 - t^e_i) in the affine case.
inline RationalFunction poincare_series(const CoxeterDatum& datum) {
  IntPolynomial num(1), den(1);
  for (unsigned e : datum.exponents) {
    num = num * geometric_sum_poly(e);
    if (datum.affine) den = den * (IntPolynomial(1) - IntPolynomial::monomial(BigInt(1), e));
  }
  return RationalFunction(num, den);
}

inline std::optional<std::pair<long, unsigned>> prime_power_decomposition(long q) {
  if (q < 2) return std::nullopt;
  long p = 2;
  while (p * p <= q && q % p != 0) ++p;
  if (q % p != 0) p = q;
  unsigned a = 0;
  long rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++a;
  }
  if (rest != 1) return std::nullopt;
  return std::make_pair(p, a);
}

struct ChevalleyReport {
  CoxeterDatum datum;  // affine
  long q = 2;
  BigRational omega_at_q;
  BigRational euler;
  BigRational beta_top;
  BigInt borel_order;
  BigRational covolume;
  BigRational lattice_beta_top;
  bool euler_poincare_ok = false;
  bool lattice_identity_ok = false;
  // Informational flags; none of them gates the computation.
  bool q_is_prime_power = false;
  bool min_covolume_hypotheses_met = false;
  bool d3_is_a3 = false;
};

/// Exact L2-invariants of G = G(F_q((t^-1))) for the simply connected
/// Chevalley group of the given type, and of the lattice G(F_q[t]).
/// Haar measure normalised by nu(Iwahori) = 1.
inline ChevalleyReport chevalley_report(Family f, unsigned rank, long q) {
  if (q < 2) throw Error(ErrorKind::UnsupportedType, "thickness q must be an integer >= 2");
  ChevalleyReport r;
  r.datum = make_datum(f, rank, true);
  r.q = q;
  const BigRational Q(q);
  const unsigned d = rank;

  r.omega_at_q = ratfun_eval(poincare_series(r.datum), Q);
  r.euler = ratfun_eval(poincare_series(r.datum).inverse(), Q);

  r.beta_top = 1;
  r.lattice_beta_top = 1;
  BigRational covol_factor(1);
  for (unsigned e : r.datum.exponents) {
    BigInt qe = pow_int(BigInt(q), e);
    r.beta_top *= BigRational(qe - 1) / geometric_sum_poly(e).evaluate(Q);
    r.lattice_beta_top /= BigRational(pow_int(BigInt(q), e + 1) - 1);
    covol_factor /= 1 - BigRational(1) / BigRational(qe);
  }
  r.borel_order = pow_int(BigInt(q - 1), d) * pow_int(BigInt(q), r.datum.exponent_sum());
  r.covolume = covol_factor / BigRational(r.borel_order);

  const BigRational sign = d % 2 == 0 ? 1 : -1;
  r.euler_poincare_ok = r.euler == sign * r.beta_top;
  r.lattice_identity_ok = r.lattice_beta_top == r.covolume * r.beta_top;

  auto pp = prime_power_decomposition(q);
  r.q_is_prime_power = pp.has_value();
  const bool classical = f == Family::A || f == Family::B || f == Family::C || f == Family::D;
  const bool type_ok = (classical && d > 1) || f == Family::E6;
  const bool q_ok = f == Family::A ? pp.has_value() : (pp && q > 9 && pp->first > 5);
  r.min_covolume_hypotheses_met = type_ok && q_ok;
  r.d3_is_a3 = f == Family::D && rank == 3;
  return r;
}

struct CellDatum {
  unsigned dimension = 0;
  BigRational stabilizer_measure;  // nu(U) > 0
};

/// Weighted Euler characteristic: sum over cells of (-1)^p / nu(U).
inline BigRational euler_from_cells(std::span<const CellDatum> cells) {
  BigRational chi(0);
  for (const auto& c : cells) {
    if (c.stabilizer_measure <= 0) throw Error(ErrorKind::DimensionMismatch, "stabilizer measure must be positive");
    BigRational w = 1 / c.stabilizer_measure;
    chi += c.dimension % 2 == 0 ? w : BigRational(-w);
  }
  return chi;
}

/// Upper bound (sum of indices [K : K cap K^s] - 1) / nu(K) for the first
/// L2-Betti number from a compact generating set of double cosets.
inline BigRational morse_beta1_bound(const BigRational& nu_k, std::span<const long> indices) {
  if (indices.empty()) throw Error(ErrorKind::EmptyGeneratingSet, "no generating double cosets");
  if (nu_k <= 0) throw Error(ErrorKind::DimensionMismatch, "nu(K) must be positive");
  BigRational sum(0);
  for (long i : indices) {
    if (i < 1) throw Error(ErrorKind::DimensionMismatch, "subgroup index must be >= 1");
    sum += i;
  }
  return (sum - 1) / nu_k;
}

/// Strong Morse inequalities up to degree n: for every m <= n,
/// (-1)^m sum_{i<=m} (-1)^i b_i <= (-1)^m sum_{i<=m} (-1)^i c_i,
/// where c_i = sum of 1/nu(U) over i-cells.
inline bool morse_partial_sums(std::span<const BigRational> betti, std::span<const CellDatum> cells, unsigned n) {
  if (betti.size() != static_cast<std::size_t>(n) + 1)
    throw Error(ErrorKind::DimensionMismatch, "need exactly n+1 Betti numbers");
  std::vector<BigRational> cell_mass(n + 1, BigRational(0));
  for (const auto& c : cells) {
    if (c.stabilizer_measure <= 0) throw Error(ErrorKind::DimensionMismatch, "stabilizer measure must be positive");
    if (c.dimension <= n) cell_mass[c.dimension] += 1 / c.stabilizer_measure;
  }
  BigRational lhs(0), rhs(0);
  for (unsigned m = 0; m <= n; ++m) {
    const BigRational s = m % 2 == 0 ? 1 : -1;
    lhs += s * betti[m];
    rhs += s * cell_mass[m];
    if (s * lhs > s * rhs) return false;
  }
  return true;
}

}  // namespace l2hecke::coxeter
