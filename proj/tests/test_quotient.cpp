#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

#include "l2hecke/quotient.hpp"

using namespace l2hecke;
using namespace l2hecke::quotient;
using hecke::HeckeElement;
using hecke::HeckeMatrix;
using hecke::TreeHeckePair;

namespace {

QuotientGraph complete_graph(std::size_t n) {
  QuotientGraph g{static_cast<long>(n) - 2, n, {}, {}};
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v) g.edges.emplace_back(u, v);
  return g;
}

QuotientGraph cycle(std::size_t n) {
  QuotientGraph g{1, n, {}, {}};
  for (std::uint32_t v = 0; v < n; ++v) g.edges.emplace_back(v, static_cast<std::uint32_t>((v + 1) % n));
  return g;
}

// Two vertices, a loop at each and one edge between them: 3-regular.
QuotientGraph with_loops() { return QuotientGraph{2, 2, {{0, 0}, {1, 1}, {0, 1}}, {}}; }

// Two vertices joined by three parallel edges.
QuotientGraph theta() { return QuotientGraph{2, 2, {{0, 1}, {0, 1}, {0, 1}}, {}}; }

// Non-backtracking walks enumerated by explicit depth-first search over
// (edge, direction) pairs.
std::vector<std::vector<std::int64_t>> brute_force_counts(const QuotientGraph& g, unsigned r) {
  std::vector<std::vector<std::int64_t>> out(g.vertices, std::vector<std::int64_t>(g.vertices, 0));
  struct Step {
    std::size_t edge;
    bool forward;
  };
  std::function<void(std::size_t, std::size_t, unsigned, std::optional<Step>)> walk =
      [&](std::size_t start, std::size_t at, unsigned left, std::optional<Step> last) {
        if (left == 0) {
          ++out[at][start];
          return;
        }
        for (std::size_t e = 0; e < g.edges.size(); ++e)
          for (bool forward : {true, false}) {
            const auto [u, v] = g.edges[e];
            if ((forward ? u : v) != at) continue;
            if (last && last->edge == e && last->forward != forward) continue;
            walk(start, forward ? v : u, left - 1, Step{e, forward});
          }
      };
  for (std::size_t w = 0; w < g.vertices; ++w) walk(w, w, r, std::nullopt);
  return out;
}

std::shared_ptr<const WeightedQuotient> shared(const WeightedQuotient& wq) {
  return std::make_shared<const WeightedQuotient>(wq);
}

QuotientOperator from_explicit(std::size_t blocks, std::vector<std::int64_t> m,
                               const std::vector<std::vector<std::int64_t>>& c) {
  ExplicitOperator input{blocks, std::move(m), SparseIntMatrix::from_dense(c)};
  return explicit_operator(shared(build_quotient(input)));
}

}  // namespace

TEST(QuotientGraph, Validation) {
  EXPECT_NO_THROW(build_quotient(complete_graph(4)));
  QuotientGraph path{1, 3, {{0, 1}, {1, 2}}, {}};
  try {
    build_quotient(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IrregularGraph);
  }
  QuotientGraph bad_edge{1, 2, {{0, 2}}, {}};
  EXPECT_THROW(build_quotient(bad_edge), Error);
  EXPECT_TRUE(is_regular(with_loops()));
  const auto wq = build_quotient(complete_graph(5));
  EXPECT_EQ(wq.covolume, 5);
  EXPECT_TRUE(wq.unit_multiplicities());
}

TEST(NonBacktracking, MatchesBruteForce) {
  for (const auto& g : {complete_graph(4), complete_graph(5), cycle(5), with_loops(), theta()}) {
    const auto counts = nonbacktracking_counts(g, 5);
    for (unsigned r = 0; r <= 5; ++r) {
      const auto expected = brute_force_counts(g, r);
      for (std::size_t v = 0; v < g.vertices; ++v)
        for (std::size_t w = 0; w < g.vertices; ++w)
          EXPECT_EQ(counts[r].at(v, w), expected[v][w]) << "r=" << r << " v=" << v << " w=" << w;
    }
  }
}

TEST(NonBacktracking, TreeRecursion) {
  // N_1 = A, N_2 = A^2 - (q+1) I, N_(r+1) = A N_r - q N_(r-1).
  for (const auto& g : {complete_graph(4), with_loops(), theta(), cycle(7)}) {
    const auto n = nonbacktracking_counts(g, 6);
    const auto& a = n[1];
    const auto id = SparseIntMatrix::identity(g.vertices);
    const auto lhs2 = multiply(a, a);
    for (std::size_t v = 0; v < g.vertices; ++v)
      for (std::size_t w = 0; w < g.vertices; ++w) {
        EXPECT_EQ(n[2].at(v, w), lhs2.at(v, w) - (g.q + 1) * id.at(v, w));
        for (unsigned r = 2; r < 6; ++r)
          EXPECT_EQ(n[r + 1].at(v, w), multiply(a, n[r]).at(v, w) - g.q * n[r - 1].at(v, w));
      }
  }
}

TEST(Assemble, A1OnK4) {
  const auto wq = build_quotient(complete_graph(4));
  const TreeHeckePair p(2);
  const auto op = assemble_operator(wq, HeckeMatrix::scalar(HeckeElement::basis(p, 1)));
  EXPECT_EQ(op.dimension(), 4u);
  EXPECT_EQ(exact_moments_full(op, 6), (std::vector<BigRational>{1, 0, 3, 6, 21, 60, 183}));
  EXPECT_EQ(phi(op), 0);
  const auto mu = spectral_measure_full(op);
  ASSERT_EQ(mu.atoms.size(), 2u);
  EXPECT_NEAR(mu.atoms[0].value, -1, 1e-12);
  EXPECT_EQ(mu.atoms[0].exact_mass, make_rational(3, 4));
  EXPECT_NEAR(mu.atoms[1].value, 3, 1e-12);
  EXPECT_EQ(mu.total_mass, 1);
  EXPECT_EQ(mu.nullity, 0u);
}

TEST(Assemble, Preconditions) {
  const TreeHeckePair p2(2), p3(3);
  const auto wq = build_quotient(complete_graph(4));
  EXPECT_THROW(assemble_operator(wq, HeckeMatrix::scalar(HeckeElement::basis(p3, 1))), Error);
  EXPECT_THROW(assemble_operator(wq, HeckeMatrix::scalar(HeckeElement::basis(p2, 1, make_rational(1, 2)))), Error);
  auto weighted = complete_graph(4);
  weighted.multiplicities = {1, 2, 1, 1};
  try {
    assemble_operator(build_quotient(weighted), HeckeMatrix::scalar(HeckeElement::basis(p2, 1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WeightedGraphUnsupported);
  }
}

TEST(Assemble, BlockMatrixAndPhi) {
  const TreeHeckePair p(2);
  const auto a0 = HeckeElement::unit(p), a1 = HeckeElement::basis(p, 1), zero = HeckeElement(p);
  const auto t = HeckeMatrix::from_rows(p, {{a0, a1}, {a1, zero}});
  const auto op = assemble_operator(build_quotient(complete_graph(4)), t);
  EXPECT_EQ(op.dimension(), 8u);
  EXPECT_EQ(phi(op), 1);
  EXPECT_EQ(phi_e(op), 1);
  // Loops contribute to the diagonal, so phi(A_1) is the loop density.
  const auto loopy = assemble_operator(build_quotient(with_loops()), HeckeMatrix::scalar(a1));
  EXPECT_EQ(phi(loopy), 2);
}

TEST(Spectrum, CyclesMatchCosines) {
  const TreeHeckePair line(1);
  for (std::size_t n : {5, 8, 12}) {
    const auto op = assemble_operator(build_quotient(cycle(n)), HeckeMatrix::scalar(HeckeElement::basis(line, 1)));
    const auto mu = spectral_measure_full(op);
    std::vector<double> expected;
    for (std::size_t j = 0; j < n; ++j) expected.push_back(2 * std::cos(2 * std::numbers::pi * double(j) / double(n)));
    std::sort(expected.begin(), expected.end());
    ASSERT_EQ(mu.eigenvalues.size(), n);
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(mu.eigenvalues[j], expected[j], 1e-12);
    EXPECT_EQ(mu.nullity, n % 4 == 0 ? 2u : 0u);
    EXPECT_EQ(mu.zero_mass, make_rational(n % 4 == 0 ? 2 : 0, static_cast<long>(n)));
    const auto dims = kernel_dims(op);
    EXPECT_EQ(dims.full, mu.nullity);
    EXPECT_EQ(dims.truncated, dims.full);
  }
}

TEST(WeightedQuotient, GoldenTwoPointExample) {
  const auto op = from_explicit(1, {1, 2}, {{0, 1}, {2, 0}});
  EXPECT_EQ(op.quotient->covolume, make_rational(3, 2));
  EXPECT_EQ(op.quotient->full_measure_points, (std::vector<std::size_t>{0}));

  const auto mu = spectral_measure_full(op);
  ASSERT_EQ(mu.atoms.size(), 2u);
  EXPECT_NEAR(mu.atoms[0].value, -std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(mu.atoms[1].value, std::sqrt(2.0), 1e-12);
  EXPECT_EQ(mu.atoms[0].exact_mass, make_rational(1, 2));
  EXPECT_EQ(mu.atoms[1].exact_mass, make_rational(1, 2));
  EXPECT_EQ(mu.total_mass, 1);
  EXPECT_EQ(mu.zero_mass, 0);
  EXPECT_EQ(mu.exact_moments[2], 2);

  const auto mue = spectral_measure_truncated(op);
  ASSERT_EQ(mue.atoms.size(), 1u);
  EXPECT_EQ(mue.atoms[0].value, 0.0);
  EXPECT_EQ(mue.atoms[0].exact_mass, make_rational(2, 3));
  EXPECT_EQ(mue.zero_mass, make_rational(2, 3));
  EXPECT_EQ(mue.total_mass, make_rational(2, 3));

  EXPECT_EQ(kernel_dims(op), (KernelDims{0, 1}));
  EXPECT_EQ(phi(op), 0);
  EXPECT_EQ(phi_e(op), 0);
}

TEST(WeightedQuotient, PhiWeightsByMultiplicity) {
  const auto op = from_explicit(1, {1, 2}, {{1, 1}, {2, 3}});
  EXPECT_EQ(phi(op), make_rational(5, 3));
  EXPECT_EQ(phi_e(op), make_rational(2, 3));
  EXPECT_EQ(exact_moments_full(op, 1)[1], phi(op));
}

TEST(WeightedQuotient, KernelMassIsAProbabilityWhenCIsZero) {
  // The whole space is the kernel, so the zero atom carries the total mass.
  const auto op = from_explicit(1, {1, 2, 3}, {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
  const auto mu = spectral_measure_full(op);
  EXPECT_EQ(mu.zero_mass, 1);
  EXPECT_EQ(mu.total_mass, 1);
  ASSERT_EQ(mu.atoms.size(), 1u);
  EXPECT_TRUE(mu.atoms[0].kernel);
}

TEST(WeightedQuotient, KernelMassOfRankOneOperator) {
  // C = [[1, 1], [2, 2]] with m = (1, 2) has kernel spanned by k = (1, -1),
  // <k, k> = 3/2 and P[a,a] = k_a^2 / (m_a <k, k>) = (2/3, 1/3). Then
  // phi(P) = (2/3 + 1/3 * 1/2) / covol = 5/9.
  const auto op = from_explicit(1, {1, 2}, {{1, 1}, {2, 2}});
  const auto mu = spectral_measure_full(op);
  EXPECT_EQ(mu.zero_mass, make_rational(5, 9));
  EXPECT_EQ(mu.nullity, 1u);
  BigRational total(0);
  for (const auto& a : mu.atoms) {
    ASSERT_TRUE(a.exact_mass.has_value());
    total += *a.exact_mass;
  }
  EXPECT_EQ(total, 1);
}

TEST(WeightedQuotient, EmptyTruncation) {
  const auto op = from_explicit(1, {2, 2}, {{0, 1}, {1, 0}});
  const auto mue = spectral_measure_truncated(op);
  EXPECT_TRUE(mue.empty_truncation);
  EXPECT_EQ(mue.total_mass, 0);
  EXPECT_TRUE(mue.atoms.empty());
  EXPECT_EQ(kernel_dims(op).truncated, 0u);
}

TEST(WeightedQuotient, InputValidation) {
  const auto expect_kind = [](auto&& fn, ErrorKind kind) {
    try {
      fn();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), kind);
    }
  };
  expect_kind([] { from_explicit(1, {1, 2}, {{0, 1}, {1, 0}}); }, ErrorKind::SelfAdjointnessViolated);
  expect_kind([] { from_explicit(1, {1, 0}, {{0, 0}, {0, 0}}); }, ErrorKind::NonpositiveMultiplicity);
  expect_kind([] { from_explicit(2, {1, 1}, {{0, 0}, {0, 0}}); }, ErrorKind::DimensionMismatch);
}

TEST(GraphBetti, Examples) {
  EXPECT_EQ(graph_betti(complete_graph(4)), (GraphBetti{1, 3}));
  EXPECT_EQ(graph_betti(cycle(9)), (GraphBetti{1, 1}));
  EXPECT_EQ(graph_betti(with_loops()), (GraphBetti{1, 2}));
  QuotientGraph two{1, 6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}}, {}};
  EXPECT_EQ(graph_betti(two), (GraphBetti{2, 2}));
}
