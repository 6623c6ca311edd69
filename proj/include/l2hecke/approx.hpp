#pragma once

// Comparison of finite quotients against the tree: exact moment gaps with
// walk-locality bounds, atoms at zero, the eps-window eigenvalue count, first
// Betti ratios and joint moments of several Hecke elements.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "l2hecke/coxeter.hpp"
#include "l2hecke/error.hpp"
#include "l2hecke/exactmath.hpp"
#include "l2hecke/farber.hpp"
#include "l2hecke/hecke.hpp"
#include "l2hecke/quotient.hpp"

namespace l2hecke::approx {

using quotient::QuotientGraph;

/// Closed k-walks at a vertex of the (q+1)-regular tree, k = 0..k_max, by
/// dynamic programming over the distance from the start.
inline std::vector<BigInt> tree_moments_dp(long q, unsigned k_max) {
  std::vector<BigInt> at(k_max + 2, BigInt(0)), next(k_max + 2);
  at[0] = 1;
  std::vector<BigInt> out{BigInt(1)};
  for (unsigned k = 1; k <= k_max; ++k) {
    for (auto& x : next) x = 0;
    for (unsigned d = 0; d <= k; ++d) {
      if (at[d] == 0) continue;
      if (d == 0) {
        next[1] += at[0] * (q + 1);
      } else {
        next[d - 1] += at[d];
        next[d + 1] += at[d] * q;
      }
    }
    std::swap(at, next);
    out.push_back(at[0]);
  }
  return out;
}

/// max_i sum_j |T_ij|_1: bounds every row sum of |C| for pi(T).
inline BigRational row_norm(const hecke::HeckeMatrix& t) {
  BigRational best(0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    BigRational s(0);
    for (std::size_t j = 0; j < t.size(); ++j) s += hecke::l1_norm(t.at(i, j));
    best = std::max(best, s);
  }
  return best;
}

struct InputGraph {
  QuotientGraph graph;
  std::uint64_t seed = 0;
};

inline std::vector<InputGraph> as_inputs(const std::vector<farber::GeneratedGraph>& gs) {
  std::vector<InputGraph> out;
  for (const auto& g : gs) out.push_back({g.graph, g.seed});
  return out;
}

inline std::vector<InputGraph> as_inputs(const std::vector<QuotientGraph>& gs) {
  std::vector<InputGraph> out;
  for (const auto& g : gs) out.push_back({g, 0});
  return out;
}

struct ConvergenceRow {
  std::size_t size = 0;
  std::uint64_t seed = 0;
  BigRational covolume;
  std::optional<std::size_t> girth;
  std::vector<BigRational> rho;          // rho[r-1] for r = 1..r_max
  std::vector<BigRational> moments;      // phi(T^k), k = 0..k_max
  std::vector<BigRational> gaps;         // |phi(T^k) - tr(T^k)|
  std::vector<BigRational> gap_bounds;   // 2 n w^k rho_{ceil(kR/2)}
  BigRational zero_mass_full;
  BigRational zero_mass_trunc;
  BigRational betti_ratio;
  std::optional<double> max_abs_eigenvalue;
  bool bound_ok = true;
};

struct ConvergenceReport {
  long q = 2;
  unsigned k_max = 0;
  unsigned r_max = 0;
  BigRational norm_bound;                // c = n^2 max |T_ij|_1
  std::vector<BigRational> tree_moments; // tr(T^k)
  BigRational limit_betti_ratio;         // (q-1)/2
  std::vector<ConvergenceRow> rows;      // ordered by (size, seed)
};

struct ConvergenceOptions {
  unsigned k_max = 8;
  unsigned r_max = 3;
  bool spectra = true;  // eigensolve each quotient and check |lambda| <= c
};

inline void check_degree(const QuotientGraph& g, long q) {
  if (g.q != q || !quotient::is_regular(g))
    throw Error(ErrorKind::MixedDegrees, "graph is not " + std::to_string(q + 1) + "-regular");
}

inline BigRational betti_ratio(const QuotientGraph& g) {
  const auto b = quotient::graph_betti(g);
  return make_rational(static_cast<long>(b.b1), static_cast<long>(g.vertices));
}

inline ConvergenceRow convergence_row(const InputGraph& in, const hecke::HeckeMatrix& t, const ConvergenceOptions& opt,
                                      const std::vector<BigRational>& tree, const BigRational& c) {
  const auto& g = in.graph;
  auto wq = std::make_shared<const quotient::WeightedQuotient>(quotient::build_quotient(g));
  const auto op = quotient::assemble_operator(wq, t);
  ConvergenceRow row;
  row.size = g.vertices;
  row.seed = in.seed;
  row.covolume = wq->covolume;
  row.girth = farber::girth(g);

  const unsigned radius = t.support_radius();
  const unsigned needed = std::max<unsigned>(opt.r_max, (opt.k_max * radius + 1) / 2);
  std::vector<BigRational> rho(needed + 1);
  for (unsigned r = 0; r <= needed; ++r)
    rho[r] = make_rational(static_cast<long>(farber::vertices_seeing_cycles(g, r)), static_cast<long>(g.vertices));
  for (unsigned r = 1; r <= opt.r_max; ++r) row.rho.push_back(rho[r]);

  row.moments = quotient::exact_moments_full(op, opt.k_max);
  const BigRational w = row_norm(t);
  const BigRational blocks(static_cast<long>(t.size()));
  for (unsigned k = 0; k <= opt.k_max; ++k) {
    row.gaps.push_back(abs(row.moments[k] - tree[k]));
    row.gap_bounds.push_back(k == 0 ? BigRational(0) : 2 * blocks * pow_rational(w, k) * rho[(k * radius + 1) / 2]);
    if (row.gaps.back() > row.gap_bounds.back()) row.bound_ok = false;
  }

  const auto dims = quotient::kernel_dims(op);
  row.zero_mass_full = BigRational(static_cast<long>(dims.full)) / wq->covolume;
  row.zero_mass_trunc = BigRational(static_cast<long>(dims.truncated)) / wq->covolume;
  row.betti_ratio = betti_ratio(g);

  if (opt.spectra) {
    const auto mu = quotient::spectral_measure_full(op);
    row.max_abs_eigenvalue = mu.max_abs_value();
    if (*row.max_abs_eigenvalue > to_double(c) * (1 + 1e-12))
      throw Error(ErrorKind::BoundViolated, "eigenvalue exceeds the norm bound c");
  }
  return row;
}

inline ConvergenceReport convergence_report(const std::vector<InputGraph>& graphs, const hecke::HeckeMatrix& t,
                                            ConvergenceOptions opt = {}) {
  ConvergenceReport rep;
  rep.q = t.pair().q;
  rep.k_max = opt.k_max;
  rep.r_max = opt.r_max;
  rep.norm_bound = t.norm_bound();
  rep.tree_moments = hecke::moments(t, opt.k_max);
  rep.limit_betti_ratio = make_rational(rep.q - 1, 2);
  for (const auto& in : graphs) check_degree(in.graph, rep.q);
  for (const auto& in : graphs) {
    rep.rows.push_back(convergence_row(in, t, opt, rep.tree_moments, rep.norm_bound));
    const auto& row = rep.rows.back();
    if (!row.bound_ok) {
      for (unsigned k = 0; k <= opt.k_max; ++k)
        if (row.gaps[k] > row.gap_bounds[k])
          throw Error(ErrorKind::GapBoundViolated, "size " + std::to_string(row.size) + ", k = " + std::to_string(k) +
                                                       ": gap " + to_string(row.gaps[k]) + " > bound " +
                                                       to_string(row.gap_bounds[k]));
    }
  }
  std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const ConvergenceRow& a, const ConvergenceRow& b) {
    return std::pair(a.size, a.seed) < std::pair(b.size, b.seed);
  });
  return rep;
}

struct LogBoundRow {
  double epsilon = 0;
  std::size_t delta = 0;  // eigenvalues of P T P* in (-eps, eps) \ {0}
  BigRational lhs;        // delta / covolume
  double rhs = 0;         // log c / |log eps|
  bool ok = true;
};

struct LogBoundReport {
  BigRational norm_bound;
  BigRational covolume;
  std::size_t nullity = 0;
  std::vector<LogBoundRow> rows;
};

/// Counts truncated eigenvalues in the punctured eps-window: the exact
/// nullity of the restricted C removes the zeros first, then the remaining
/// float eigenvalues with |lambda| < eps are counted.
inline LogBoundReport log_bound_check(const quotient::QuotientOperator& op, const BigRational& c,
                                      const std::vector<double>& epsilons) {
  LogBoundReport rep;
  rep.norm_bound = c;
  rep.covolume = op.quotient->covolume;
  const auto mu = quotient::spectral_measure_truncated(op);
  rep.nullity = mu.nullity;
  if (mu.max_abs_value() > to_double(c) * (1 + 1e-12))
    throw Error(ErrorKind::BoundViolated, "eigenvalue exceeds the norm bound c");
  const double log_c = std::log(to_double(c));
  for (double eps : epsilons) {
    if (!(eps > 0 && eps < 1)) throw Error(ErrorKind::DimensionMismatch, "epsilon must lie in (0, 1)");
    LogBoundRow row;
    row.epsilon = eps;
    for (const auto& a : mu.atoms)
      if (!a.kernel && std::fabs(a.value) < eps)
        row.delta += a.multiplicity;
    row.lhs = BigRational(static_cast<long>(row.delta)) / rep.covolume;
    row.rhs = log_c / std::fabs(std::log(eps));
    row.ok = row.delta == 0 || to_double(row.lhs) <= row.rhs * (1 + 1e-12);
    if (!row.ok)
      throw Error(ErrorKind::BoundViolated, "eps = " + std::to_string(eps) + ": delta/covol = " + to_string(row.lhs) +
                                                " exceeds log c/|log eps|");
    rep.rows.push_back(row);
  }
  return rep;
}

struct BettiRow {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t b0 = 0;
  BigRational ratio;           // b1 / covolume, nu(vertex stabiliser) = 1
  BigRational iwahori_ratio;   // ratio / conversion
  BigRational predicted;       // (q-1)/2 + b0/n
  bool exact_formula_ok = false;
};

struct BettiReport {
  long q = 2;
  BigRational target;           // (q-1)/2
  BigRational conversion;       // (q+1)/2
  BigRational iwahori_target;   // (q-1)/(q+1)
  bool normalization_ok = false;  // iwahori_target * conversion == target
  std::vector<BettiRow> rows;
};

inline BettiReport betti_ratio_experiment(const std::vector<QuotientGraph>& graphs, long q) {
  BettiReport rep;
  rep.q = q;
  rep.target = make_rational(q - 1, 2);
  rep.conversion = make_rational(q + 1, 2);
  rep.iwahori_target = make_rational(q - 1, q + 1);
  rep.normalization_ok = rep.iwahori_target * rep.conversion == rep.target;
  for (const auto& g : graphs) {
    check_degree(g, q);
    if (std::any_of(g.multiplicities.begin(), g.multiplicities.end(), [](auto m) { return m != 1; }))
      throw Error(ErrorKind::WeightedGraphUnsupported, "Betti ratios need multiplicities 1");
    const auto b = quotient::graph_betti(g);
    BettiRow row;
    row.vertices = g.vertices;
    row.edges = g.edges.size();
    row.b0 = b.b0;
    row.ratio = make_rational(static_cast<long>(b.b1), static_cast<long>(g.vertices));
    row.iwahori_ratio = row.ratio / rep.conversion;
    row.predicted = rep.target + make_rational(static_cast<long>(b.b0), static_cast<long>(g.vertices));
    row.exact_formula_ok = row.ratio == row.predicted;
    rep.rows.push_back(row);
  }
  return rep;
}

using Word = std::vector<std::size_t>;

struct CepEntry {
  std::size_t size = 0;
  BigRational phi_e;
  BigRational gap;
  BigRational rho;
  BigRational bound;  // 2 c_w rho
  bool ok = true;
};

struct CepWordReport {
  Word word;
  std::string label;
  BigRational tree_trace;
  BigRational c_w;            // product of l1 norms
  unsigned locality_radius = 0;  // ceil(sum of letter radii / 2)
  std::vector<CepEntry> per_graph;
};

namespace detail {

/// sum over a of (M_1 M_2 ... M_m)[a, a] for symmetric integer matrices.
inline BigInt diagonal_sum_of_product(const std::vector<const SparseIntMatrix*>& letters, std::size_t n) {
  BigInt total(0);
  std::vector<BigInt> x(n), y(n);
  std::vector<std::uint32_t> supp, next_supp;
  std::vector<char> seen(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    x[a] = 1;
    supp.assign(1, static_cast<std::uint32_t>(a));
    for (std::size_t li = letters.size(); li-- > 0;) {
      const auto& m = *letters[li];
      next_supp.clear();
      for (auto col : supp) {
        if (x[col] == 0) continue;
        auto [rows, vals] = m.row(col);  // symmetric: row col lists M[r, col]
        for (std::size_t e = 0; e < m.row_size(col); ++e) {
          const auto r = rows[e];
          if (!seen[r]) {
            seen[r] = 1;
            next_supp.push_back(static_cast<std::uint32_t>(r));
          }
          y[r] += x[col] * static_cast<long>(vals[e]);
        }
      }
      for (auto col : supp) x[col] = 0;
      for (auto r : next_supp) {
        seen[r] = 0;
        std::swap(x[r], y[r]);
      }
      std::swap(supp, next_supp);
    }
    total += x[a];
    for (auto r : supp) x[r] = 0;
  }
  return total;
}

}  // namespace detail

/// For each word w in the elements: the tree trace of the product against
/// phi^e of the product of truncated operators on every graph.
inline std::vector<CepWordReport> cep_joint_moments(const std::vector<QuotientGraph>& graphs,
                                                    const std::vector<hecke::HeckeElement>& elements,
                                                    const std::vector<Word>& words) {
  if (elements.empty()) throw Error(ErrorKind::DimensionMismatch, "no elements");
  const auto pair = elements.front().pair();
  for (const auto& e : elements)
    if (!(e.pair() == pair)) throw Error(ErrorKind::PairMismatch, "elements over different Hecke pairs");
  for (const auto& g : graphs) check_degree(g, pair.q);

  std::vector<CepWordReport> out;
  for (const auto& w : words) {
    CepWordReport rep;
    rep.word = w;
    hecke::HeckeElement prod = hecke::HeckeElement::unit(pair);
    rep.c_w = 1;
    unsigned radius_sum = 0;
    for (std::size_t i : w) {
      if (i >= elements.size()) throw Error(ErrorKind::DimensionMismatch, "word letter out of range");
      prod = hecke::tree_mul(prod, elements[i]);
      rep.c_w *= hecke::l1_norm(elements[i]);
      radius_sum += elements[i].support_radius();
      rep.label += (rep.label.empty() ? "" : "*") + ("(" + elements[i].to_string() + ")");
    }
    rep.tree_trace = hecke::trace(prod);
    rep.locality_radius = (radius_sum + 1) / 2;
    out.push_back(std::move(rep));
  }

  for (const auto& g : graphs) {
    auto wq = std::make_shared<const quotient::WeightedQuotient>(quotient::build_quotient(g));
    std::vector<SparseIntMatrix> truncated;
    for (const auto& e : elements) {
      const auto op = quotient::assemble_operator(wq, hecke::HeckeMatrix::scalar(e));
      truncated.push_back(op.coefficients.principal_submatrix(op.truncated_indices()));
    }
    const std::size_t n = wq->full_measure_points.size();
    for (auto& rep : out) {
      std::vector<const SparseIntMatrix*> letters;
      for (std::size_t i : rep.word) letters.push_back(&truncated[i]);
      CepEntry entry;
      entry.size = g.vertices;
      entry.phi_e = BigRational(detail::diagonal_sum_of_product(letters, n)) / wq->covolume;
      entry.gap = abs(entry.phi_e - rep.tree_trace);
      entry.rho = make_rational(static_cast<long>(farber::vertices_seeing_cycles(g, rep.locality_radius)),
                                static_cast<long>(g.vertices));
      entry.bound = 2 * rep.c_w * entry.rho;
      entry.ok = entry.gap <= entry.bound;
      if (!entry.ok)
        throw Error(ErrorKind::GapBoundViolated, "joint moment " + rep.label + " on " + std::to_string(g.vertices) +
                                                     " vertices: gap " + to_string(entry.gap) + " > " + to_string(entry.bound));
      rep.per_graph.push_back(entry);
    }
  }
  return out;
}

/// euler == (-1)^d beta_top exactly.
inline bool euler_poincare_check(const coxeter::ChevalleyReport& r) {
  const BigRational sign = r.datum.rank % 2 == 0 ? 1 : -1;
  return r.euler == sign * r.beta_top;
}

}  // namespace l2hecke::approx
