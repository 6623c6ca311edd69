#pragma once

// Finite weighted models of K\G/Gamma for lattices Gamma in the automorphism
// group of the (q+1)-regular tree. Points carry integer multiplicities
// m_s = |K cap s Gamma s^-1|; the point s has measure 1/m_s and the
// covolume is sum_s 1/m_s. Hecke elements act through integer coefficient
// matrices C, with C[(i,s),(j,h)] the coefficient of 1_s in pi(T_ij) 1_h.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "l2hecke/error.hpp"
#include "l2hecke/exactmath.hpp"
#include "l2hecke/hecke.hpp"

namespace l2hecke::quotient {

/// Finite multigraph standing in for Gamma\T. Loops are edges [v, v] and add
/// 2 to the degree of v; parallel edges are repeated entries.
struct QuotientGraph {
  long q = 2;
  std::size_t vertices = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::int64_t> multiplicities;  // empty means all 1

  std::int64_t multiplicity(std::size_t v) const { return multiplicities.empty() ? 1 : multiplicities[v]; }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> deg(vertices, 0);
    for (auto [u, v] : edges) {
      ++deg[u];
      ++deg[v];
    }
    return deg;
  }

  friend bool operator==(const QuotientGraph&, const QuotientGraph&) = default;
};

inline void check_graph_shape(const QuotientGraph& g) {
  for (auto [u, v] : g.edges)
    if (u >= g.vertices || v >= g.vertices) throw Error(ErrorKind::DimensionMismatch, "edge endpoint out of range");
  if (!g.multiplicities.empty() && g.multiplicities.size() != g.vertices)
    throw Error(ErrorKind::DimensionMismatch, "one multiplicity per vertex required");
}

inline bool is_regular(const QuotientGraph& g) {
  const auto deg = g.degrees();
  return std::all_of(deg.begin(), deg.end(), [&](std::size_t d) { return d == static_cast<std::size_t>(g.q + 1); });
}

/// Coefficient matrix supplied directly, for quotients that are not plain
/// graphs (weighted points, or operators not of the form pi(A_r)).
struct ExplicitOperator {
  std::size_t blocks = 1;
  std::vector<std::int64_t> multiplicities;
  SparseIntMatrix coefficients;
};

struct WeightedQuotient {
  std::vector<std::int64_t> multiplicities;
  BigRational covolume;
  std::vector<std::size_t> full_measure_points;  // points with m_s = 1
  std::variant<QuotientGraph, ExplicitOperator> source;

  std::size_t size() const { return multiplicities.size(); }
  bool unit_multiplicities() const { return full_measure_points.size() == multiplicities.size(); }
  const QuotientGraph* graph() const { return std::get_if<QuotientGraph>(&source); }
};

namespace detail {

inline void fill_measures(WeightedQuotient& wq) {
  wq.covolume = 0;
  wq.full_measure_points.clear();
  for (std::size_t s = 0; s < wq.multiplicities.size(); ++s) {
    const auto m = wq.multiplicities[s];
    if (m <= 0) throw Error(ErrorKind::NonpositiveMultiplicity, "multiplicity of point " + std::to_string(s));
    wq.covolume += BigRational(1, static_cast<unsigned long>(m));
    if (m == 1) wq.full_measure_points.push_back(s);
  }
  if (wq.multiplicities.empty()) throw Error(ErrorKind::DimensionMismatch, "quotient has no points");
}

}  // namespace detail

/// Validates a (q+1)-regular quotient graph and records its measure data.
inline WeightedQuotient build_quotient(const QuotientGraph& g) {
  check_graph_shape(g);
  if (!is_regular(g))
    throw Error(ErrorKind::IrregularGraph, "every vertex must have degree q+1 = " + std::to_string(g.q + 1));
  WeightedQuotient wq;
  wq.multiplicities = g.multiplicities.empty() ? std::vector<std::int64_t>(g.vertices, 1) : g.multiplicities;
  detail::fill_measures(wq);
  wq.source = g;
  return wq;
}

/// Validates an explicit operator: square C of size blocks * |points| and
/// C[a,b] m_b = C[b,a] m_a, which is self-adjointness for the inner product
/// <1_s, 1_s> = 1/m_s.
inline WeightedQuotient build_quotient(const ExplicitOperator& input) {
  WeightedQuotient wq;
  wq.multiplicities = input.multiplicities;
  detail::fill_measures(wq);
  const std::size_t points = wq.size();
  const auto& c = input.coefficients;
  if (input.blocks == 0 || c.rows() != input.blocks * points || c.cols() != c.rows())
    throw Error(ErrorKind::DimensionMismatch, "C must be square of size n * |points|");
  for (const auto& e : c.entries()) {
    const auto ma = input.multiplicities[e.row % points];
    const auto mb = input.multiplicities[e.col % points];
    if (e.value * mb != c.at(e.col, e.row) * ma)
      throw Error(ErrorKind::SelfAdjointnessViolated,
                  "C[" + std::to_string(e.row) + "," + std::to_string(e.col) + "] breaks weighted symmetry");
  }
  wq.source = input;
  return wq;
}

struct QuotientOperator {
  std::shared_ptr<const WeightedQuotient> quotient;
  std::size_t blocks = 1;
  SparseIntMatrix coefficients;

  std::size_t dimension() const { return coefficients.rows(); }
  std::size_t point_of(std::size_t index) const { return index % quotient->size(); }
  std::size_t index(std::size_t block, std::size_t point) const { return block * quotient->size() + point; }

  /// Row indices (i, s) with s of full measure, ascending.
  std::vector<std::size_t> truncated_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < blocks; ++i)
      for (std::size_t s : quotient->full_measure_points) out.push_back(index(i, s));
    std::sort(out.begin(), out.end());
    return out;
  }
};

inline QuotientOperator explicit_operator(std::shared_ptr<const WeightedQuotient> wq) {
  const auto* input = std::get_if<ExplicitOperator>(&wq->source);
  if (!input) throw Error(ErrorKind::DimensionMismatch, "quotient was not built from an explicit operator");
  return QuotientOperator{wq, input->blocks, input->coefficients};
}

/// N_0, ..., N_max_r where N_r[v, w] counts non-backtracking walks of length
/// r from w to v. Each edge instance e gives darts 2e (u -> v) and 2e+1
/// (v -> u); a walk may not follow a dart by its reverse. The two darts of a
/// loop are distinct, so a loop may be run twice in the same direction.
inline std::vector<SparseIntMatrix> nonbacktracking_counts(const QuotientGraph& g, unsigned max_r) {
  check_graph_shape(g);
  const std::size_t n = g.vertices;
  const std::size_t darts = 2 * g.edges.size();
  std::vector<std::uint32_t> head(darts);
  std::vector<std::vector<std::uint32_t>> out_darts(n);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [u, v] = g.edges[e];
    head[2 * e] = v;
    head[2 * e + 1] = u;
    out_darts[u].push_back(static_cast<std::uint32_t>(2 * e));
    out_darts[v].push_back(static_cast<std::uint32_t>(2 * e + 1));
  }
  std::vector<std::vector<SparseIntMatrix::Entry>> entries(max_r + 1);
  std::vector<std::int64_t> cur(darts, 0), next(darts, 0), at_vertex(n, 0);
  std::vector<std::uint32_t> live, next_live, touched;
  for (std::size_t w = 0; w < n; ++w) {
    entries[0].push_back({w, w, 1});
    live.clear();
    for (auto d : out_darts[w]) {
      cur[d] = 1;
      live.push_back(d);
    }
    for (unsigned r = 1; r <= max_r; ++r) {
      for (auto d : live) {
        if (at_vertex[head[d]] == 0) touched.push_back(head[d]);
        at_vertex[head[d]] += cur[d];
      }
      std::sort(touched.begin(), touched.end());
      for (auto v : touched) {
        entries[r].push_back({v, w, at_vertex[v]});
        at_vertex[v] = 0;
      }
      touched.clear();
      if (r == max_r) break;
      next_live.clear();
      for (auto d : live) {
        for (auto d2 : out_darts[head[d]]) {
          if (d2 == (d ^ 1u)) continue;
          if (next[d2] == 0) next_live.push_back(d2);
          if (__builtin_add_overflow(next[d2], cur[d], &next[d2]))
            throw Error(ErrorKind::Internal, "walk count overflow");
        }
      }
      for (auto d : live) cur[d] = 0;
      std::swap(cur, next);
      std::swap(live, next_live);
    }
    for (auto d : live) cur[d] = 0;
  }
  std::vector<SparseIntMatrix> out;
  for (auto& e : entries) out.push_back(SparseIntMatrix::from_entries(n, n, std::move(e)));
  return out;
}

/// Coefficient matrix of pi_Gamma(T) on a graph quotient: the (i, j) block is
/// sum_r T_ij[r] N_r.
inline QuotientOperator assemble_operator(std::shared_ptr<const WeightedQuotient> wq, const hecke::HeckeMatrix& t) {
  const QuotientGraph* g = wq->graph();
  if (!g) throw Error(ErrorKind::DimensionMismatch, "operator assembly needs a graph quotient");
  if (!wq->unit_multiplicities())
    throw Error(ErrorKind::WeightedGraphUnsupported, "graph assembly requires all multiplicities 1");
  if (t.pair().q != g->q) throw Error(ErrorKind::PairMismatch, "graph degree and Hecke pair differ");
  if (!t.is_integral()) throw Error(ErrorKind::NonIntegral, "operator needs integral coefficients");
  const auto counts = nonbacktracking_counts(*g, t.support_radius());
  const std::size_t n = g->vertices;
  std::vector<SparseIntMatrix::Entry> entries;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j)
      for (const auto& [r, c] : t.at(i, j).coefficients()) {
        const std::int64_t coeff = c.get_num().get_si();
        for (const auto& e : counts[r].entries())
          entries.push_back({i * n + e.row, j * n + e.col, coeff * e.value});
      }
  const std::size_t dim = t.size() * n;
  return QuotientOperator{std::move(wq), t.size(), SparseIntMatrix::from_entries(dim, dim, std::move(entries))};
}

inline QuotientOperator assemble_operator(const WeightedQuotient& wq, const hecke::HeckeMatrix& t) {
  return assemble_operator(std::make_shared<const WeightedQuotient>(wq), t);
}

/// Normalised trace functional: sum over all (i, s) of C[(i,s),(i,s)] / m_s,
/// divided by the covolume.
inline BigRational phi(const QuotientOperator& op) {
  BigRational sum(0);
  for (std::size_t a = 0; a < op.dimension(); ++a)
    if (auto v = op.coefficients.at(a, a))
      sum += BigRational(static_cast<long>(v), static_cast<unsigned long>(op.quotient->multiplicities[op.point_of(a)]));
  return sum / op.quotient->covolume;
}

/// As phi, restricted to full-measure points.
inline BigRational phi_e(const QuotientOperator& op) {
  BigRational sum(0);
  for (std::size_t a : op.truncated_indices()) sum += static_cast<long>(op.coefficients.at(a, a));
  return sum / op.quotient->covolume;
}

namespace detail {

/// Sparse vector x_j = C^j e_a, tracked by its support so that the cost
/// follows the ball around a rather than the whole quotient.
template <typename Scalar>
struct SparseWalk {
  std::vector<Scalar> values;
  std::vector<std::uint32_t> support;
};

inline bool add_product(std::int64_t& acc, std::int64_t a, std::int64_t b) {
  std::int64_t p;
  return !__builtin_mul_overflow(a, b, &p) && !__builtin_add_overflow(acc, p, &acc);
}
inline bool add_product(BigInt& acc, const BigInt& a, std::int64_t b) {
  acc += a * static_cast<long>(b);
  return true;
}
inline bool add_product(BigInt& acc, const BigInt& a, const BigInt& b) {
  acc += a * b;
  return true;
}

/// out[k] = sum_a weight[a] * (C^k)[a, a] for k = 0..k_max. For symmetric C
/// only half the powers are formed: (C^k)[a,a] = <C^i e_a, C^j e_a>, i+j = k.
/// Returns nullopt if a 64-bit intermediate overflows.
template <typename Scalar>
std::optional<std::vector<BigRational>> diagonal_moments_impl(const SparseIntMatrix& ct,
                                                              const std::vector<BigRational>& weight, unsigned k_max,
                                                              bool symmetric) {
  const std::size_t n = ct.rows();
  const unsigned steps = symmetric ? (k_max + 1) / 2 : k_max;
  std::vector<BigRational> out(k_max + 1, BigRational(0));
  std::vector<std::vector<Scalar>> powers(steps + 1, std::vector<Scalar>(n, Scalar(0)));
  std::vector<std::vector<std::uint32_t>> support(steps + 1);
  std::vector<char> seen(n, 0);
  std::vector<Scalar> diag(k_max + 1);
  for (std::size_t a = 0; a < n; ++a) {
    powers[0][a] = 1;
    support[0].assign(1, static_cast<std::uint32_t>(a));
    for (unsigned j = 1; j <= steps; ++j) {
      auto& y = powers[j];
      auto& sy = support[j];
      for (auto col : support[j - 1]) {
        const Scalar& xv = powers[j - 1][col];
        if (xv == 0) continue;
        auto [rows, vals] = ct.row(col);
        for (std::size_t e = 0; e < ct.row_size(col); ++e) {
          const auto r = rows[e];
          if (!seen[r]) {
            seen[r] = 1;
            sy.push_back(static_cast<std::uint32_t>(r));
          }
          if (!add_product(y[r], xv, vals[e])) return std::nullopt;
        }
      }
      for (auto r : sy) seen[r] = 0;
    }
    for (unsigned k = 0; k <= k_max; ++k) {
      Scalar d(0);
      if (symmetric) {
        const unsigned i = (k + 1) / 2, j = k / 2;
        for (auto b : support[j])
          if (powers[j][b] != 0 && !add_product(d, powers[i][b], powers[j][b])) return std::nullopt;
      } else {
        d = powers[k][a];
      }
      if (d != 0) out[k] += weight[a] * BigRational(BigInt(d));
    }
    for (unsigned j = 0; j <= steps; ++j) {
      for (auto r : support[j]) powers[j][r] = 0;
      support[j].clear();
    }
  }
  return out;
}

inline std::vector<BigRational> weighted_diagonal_moments(const SparseIntMatrix& c, const std::vector<BigRational>& weight,
                                                          unsigned k_max) {
  std::vector<SparseIntMatrix::Entry> transposed;
  bool symmetric = true;
  for (const auto& e : c.entries()) {
    transposed.push_back({e.col, e.row, e.value});
    if (symmetric && c.at(e.col, e.row) != e.value) symmetric = false;
  }
  const auto ct = SparseIntMatrix::from_entries(c.cols(), c.rows(), std::move(transposed));
  if (auto r = diagonal_moments_impl<std::int64_t>(ct, weight, k_max, symmetric)) return *r;
  return *diagonal_moments_impl<BigInt>(ct, weight, k_max, symmetric);
}

}  // namespace detail

/// phi(T^k) for k = 0..k_max, exactly.
inline std::vector<BigRational> exact_moments_full(const QuotientOperator& op, unsigned k_max) {
  std::vector<BigRational> w(op.dimension());
  for (std::size_t a = 0; a < op.dimension(); ++a)
    w[a] = BigRational(1, static_cast<unsigned long>(op.quotient->multiplicities[op.point_of(a)])) / op.quotient->covolume;
  return detail::weighted_diagonal_moments(op.coefficients, w, k_max);
}

/// phi_e((P T P*)^k) for k = 0..k_max, exactly.
inline std::vector<BigRational> exact_moments_truncated(const QuotientOperator& op, unsigned k_max) {
  const auto keep = op.truncated_indices();
  if (keep.empty()) return std::vector<BigRational>(k_max + 1, BigRational(0));
  const auto sub = op.coefficients.principal_submatrix(keep);
  std::vector<BigRational> w(keep.size(), 1 / op.quotient->covolume);
  return detail::weighted_diagonal_moments(sub, w, k_max);
}

struct SpectralAtom {
  double value = 0.0;
  double mass = 0.0;
  std::size_t multiplicity = 0;
  std::optional<BigRational> exact_mass;
  bool kernel = false;  // the atom at 0 given by the exact nullity
};

struct SpectralMeasure {
  std::vector<SpectralAtom> atoms;         // ascending by value
  std::vector<double> eigenvalues;         // with multiplicity, ascending
  BigRational total_mass;                  // exact
  BigRational zero_mass;                   // exact mass of the atom at 0
  BigRational normalized_nullity;          // dim ker / covolume
  std::size_t nullity = 0;
  std::vector<BigRational> exact_moments;  // k = 0..8
  bool empty_truncation = false;

  double moment(unsigned k) const {
    double s = 0;
    for (const auto& a : atoms) s += a.mass * std::pow(a.value, static_cast<double>(k));
    return s;
  }
  double max_abs_value() const {
    double m = 0;
    for (double v : eigenvalues) m = std::max(m, std::fabs(v));
    return m;
  }
};

inline constexpr unsigned kMomentCheckOrder = 8;
inline constexpr double kMomentTolerance = 1e-9;

namespace detail {

/// Best rational p/q with q <= max_den within tol of x, if any.
inline std::optional<BigRational> recognize_rational(double x, long max_den, double tol) {
  // Continued-fraction convergents.
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(r);
    if (std::fabs(a) > 1e15) break;
    const long ai = static_cast<long>(a);
    const long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::fabs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= tol) return make_rational(h1, k1);
    const double frac = r - a;
    if (frac == 0) break;
    r = 1 / frac;
  }
  return std::nullopt;
}

inline Eigen::MatrixXd dense_symmetrized(const SparseIntMatrix& c, const std::vector<std::int64_t>& m_of_index) {
  const auto n = static_cast<Eigen::Index>(c.rows());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : c.entries())
    s(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) =
        static_cast<double>(e.value) *
        std::sqrt(static_cast<double>(m_of_index[e.col]) / static_cast<double>(m_of_index[e.row]));
  return s;
}

/// Clusters eigenvalues after setting aside exactly `nullity` of the
/// smallest-magnitude ones as the zero atom.
inline void build_atoms(SpectralMeasure& mu, const std::vector<double>& values, const std::vector<double>& masses,
                        bool exact_uniform, const BigRational& unit_mass) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::fabs(values[a]) < std::fabs(values[b]); });
  std::vector<bool> is_zero(values.size(), false);
  for (std::size_t i = 0; i < mu.nullity && i < order.size(); ++i) is_zero[order[i]] = true;

  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!is_zero[i]) rest.push_back(i);
  std::sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::fabs(v));
  const double tol = 1e-9 * scale;

  std::vector<SpectralAtom> atoms;
  if (mu.nullity > 0) {
    SpectralAtom z;
    z.value = 0.0;
    z.multiplicity = mu.nullity;
    z.kernel = true;
    z.exact_mass = mu.zero_mass;
    z.mass = to_double(mu.zero_mass);
    atoms.push_back(z);
  }
  for (std::size_t i = 0; i < rest.size();) {
    std::size_t j = i;
    double sum_v = 0, sum_m = 0;
    while (j < rest.size() && values[rest[j]] - values[rest[i]] <= tol) {
      sum_v += values[rest[j]];
      sum_m += masses[rest[j]];
      ++j;
    }
    SpectralAtom a;
    a.multiplicity = j - i;
    a.value = sum_v / static_cast<double>(a.multiplicity);
    a.mass = sum_m;
    if (exact_uniform) a.exact_mass = unit_mass * BigRational(static_cast<long>(a.multiplicity));
    else a.exact_mass = recognize_rational(a.mass, 1000000, 1e-12);
    atoms.push_back(a);
    i = j;
  }
  std::sort(atoms.begin(), atoms.end(), [](const SpectralAtom& a, const SpectralAtom& b) { return a.value < b.value; });
  mu.atoms = std::move(atoms);
}

inline void check_moments(const SpectralMeasure& mu) {
  for (unsigned k = 0; k < mu.exact_moments.size(); ++k) {
    double float_moment = 0, scale = 1;
    for (const auto& a : mu.atoms) {
      float_moment += a.mass * std::pow(a.value, static_cast<double>(k));
      scale += a.mass * std::pow(std::fabs(a.value), static_cast<double>(k));
    }
    const double exact = to_double(mu.exact_moments[k]);
    if (std::fabs(float_moment - exact) > kMomentTolerance * std::max(1.0, scale))
      throw Error(ErrorKind::EigensolverFailure, "spectral moment " + std::to_string(k) + " disagrees with exact value");
  }
}

/// Exact mass of ker(C) for the weighted inner product: with K a rational
/// kernel basis and M = diag(m), the weighted trace of the orthogonal
/// projection is sum_a (K (K^T M^-1 K)^-1 K^T)[a,a] / m_a^2.
inline BigRational weighted_kernel_mass(const SparseIntMatrix& c, const std::vector<std::int64_t>& m_of_index) {
  const auto basis = exact_kernel_basis(c.to_rational());
  if (basis.empty()) return 0;
  const std::size_t k = basis.size(), n = c.rows();
  RationalMatrix gram(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      BigRational s(0);
      for (std::size_t a = 0; a < n; ++a)
        if (basis[i][a] != 0 && basis[j][a] != 0)
          s += basis[i][a] * basis[j][a] / BigRational(static_cast<long>(m_of_index[a]));
      gram(i, j) = s;
      gram(j, i) = s;
    }
  const RationalMatrix inv = exact_inverse(gram);
  BigRational total(0);
  for (std::size_t a = 0; a < n; ++a) {
    BigRational d(0);
    for (std::size_t i = 0; i < k; ++i) {
      if (basis[i][a] == 0) continue;
      for (std::size_t j = 0; j < k; ++j)
        if (basis[j][a] != 0) d += basis[i][a] * inv(i, j) * basis[j][a];
    }
    const BigRational m(static_cast<long>(m_of_index[a]));
    total += d / (m * m);
  }
  return total;
}

}  // namespace detail

/// Spectral measure of T with respect to phi. Eigenvalues come from the
/// symmetrisation D^(1/2) C D^(-1/2), D = diag(1/m); the atom at 0 and all
/// masses on uniform-weight quotients are exact.
inline SpectralMeasure spectral_measure_full(const QuotientOperator& op) {
  const auto& wq = *op.quotient;
  const std::size_t dim = op.dimension();
  std::vector<std::int64_t> m_of_index(dim);
  for (std::size_t a = 0; a < dim; ++a) m_of_index[a] = wq.multiplicities[op.point_of(a)];
  for (const auto& e : op.coefficients.entries())
    if (e.value * m_of_index[e.col] != op.coefficients.at(e.col, e.row) * m_of_index[e.row])
      throw Error(ErrorKind::NotSelfAdjoint, "operator is not self-adjoint for the weighted inner product");

  const bool uniform = std::all_of(m_of_index.begin(), m_of_index.end(), [&](auto m) { return m == m_of_index[0]; });
  SpectralMeasure mu;
  mu.total_mass = 0;
  for (std::size_t a = 0; a < dim; ++a) mu.total_mass += BigRational(1, static_cast<unsigned long>(m_of_index[a]));
  mu.total_mass /= wq.covolume;
  mu.nullity = integer_nullity(op.coefficients);
  mu.normalized_nullity = BigRational(static_cast<long>(mu.nullity)) / wq.covolume;
  const BigRational unit_mass = BigRational(1, static_cast<unsigned long>(m_of_index[0])) / wq.covolume;
  mu.zero_mass = uniform ? BigRational(unit_mass * static_cast<long>(mu.nullity))
                         : BigRational(detail::weighted_kernel_mass(op.coefficients, m_of_index) / wq.covolume);
  mu.exact_moments = exact_moments_full(op, kMomentCheckOrder);

  Eigen::MatrixXd s = detail::dense_symmetrized(op.coefficients, m_of_index);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, uniform ? Eigen::EigenvaluesOnly : Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::EigensolverFailure, "symmetric eigensolver did not converge");
  std::vector<double> values(dim), masses(dim);
  const double cov = to_double(wq.covolume);
  for (std::size_t j = 0; j < dim; ++j) {
    values[j] = solver.eigenvalues()(static_cast<Eigen::Index>(j));
    if (uniform) {
      masses[j] = to_double(unit_mass);
    } else {
      double w = 0;
      for (std::size_t a = 0; a < dim; ++a) {
        const double v = solver.eigenvectors()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j));
        w += v * v / static_cast<double>(m_of_index[a]);
      }
      masses[j] = w / cov;
    }
  }
  mu.eigenvalues = values;
  std::sort(mu.eigenvalues.begin(), mu.eigenvalues.end());
  detail::build_atoms(mu, values, masses, uniform, unit_mass);
  detail::check_moments(mu);
  return mu;
}

/// Spectral measure of P T P* with respect to phi_e: the restriction of C
/// to full-measure points, every eigenvalue carrying mass 1/covolume.
inline SpectralMeasure spectral_measure_truncated(const QuotientOperator& op) {
  const auto& wq = *op.quotient;
  const auto keep = op.truncated_indices();
  SpectralMeasure mu;
  mu.total_mass = BigRational(static_cast<long>(keep.size())) / wq.covolume;
  if (keep.empty()) {
    mu.empty_truncation = true;
    mu.zero_mass = 0;
    mu.normalized_nullity = 0;
    mu.exact_moments.assign(kMomentCheckOrder + 1, BigRational(0));
    return mu;
  }
  const auto sub = op.coefficients.principal_submatrix(keep);
  for (const auto& e : sub.entries())
    if (sub.at(e.col, e.row) != e.value) throw Error(ErrorKind::NotSelfAdjoint, "truncated operator is not symmetric");
  const BigRational unit_mass = 1 / wq.covolume;
  mu.nullity = integer_nullity(sub);
  mu.normalized_nullity = BigRational(static_cast<long>(mu.nullity)) / wq.covolume;
  mu.zero_mass = mu.normalized_nullity;
  mu.exact_moments = exact_moments_truncated(op, kMomentCheckOrder);

  const std::vector<std::int64_t> ones(sub.rows(), 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::dense_symmetrized(sub, ones), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::EigensolverFailure, "symmetric eigensolver did not converge");
  std::vector<double> values(sub.rows()), masses(sub.rows(), to_double(unit_mass));
  for (std::size_t j = 0; j < sub.rows(); ++j) values[j] = solver.eigenvalues()(static_cast<Eigen::Index>(j));
  mu.eigenvalues = values;
  std::sort(mu.eigenvalues.begin(), mu.eigenvalues.end());
  detail::build_atoms(mu, values, masses, true, unit_mass);
  detail::check_moments(mu);
  return mu;
}

struct KernelDims {
  std::size_t full = 0;
  std::size_t truncated = 0;
  friend bool operator==(const KernelDims&, const KernelDims&) = default;
};

/// Exact nullities of C and of its restriction to full-measure points.
inline KernelDims kernel_dims(const QuotientOperator& op) {
  KernelDims k;
  k.full = integer_nullity(op.coefficients);
  const auto keep = op.truncated_indices();
  if (keep.size() == op.dimension()) k.truncated = k.full;
  else k.truncated = keep.empty() ? 0 : integer_nullity(op.coefficients.principal_submatrix(keep));
  return k;
}

struct GraphBetti {
  std::size_t b0 = 0;
  std::size_t b1 = 0;
  friend bool operator==(const GraphBetti&, const GraphBetti&) = default;
};

inline std::size_t connected_components(const QuotientGraph& g) {
  std::vector<std::size_t> parent(g.vertices);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = g.vertices;
  for (auto [u, v] : g.edges) {
    auto a = find(u), b = find(v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

/// b0 = components, b1 = |E| - |V| + b0.
inline GraphBetti graph_betti(const QuotientGraph& g) {
  check_graph_shape(g);
  GraphBetti b;
  b.b0 = connected_components(g);
  b.b1 = g.edges.size() + b.b0 - g.vertices;
  return b;
}

}  // namespace l2hecke::quotient
