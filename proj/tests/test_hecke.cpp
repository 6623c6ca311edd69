#include <gtest/gtest.h>

#include <random>

#include "l2hecke/hecke.hpp"

using namespace l2hecke;
using namespace l2hecke::hecke;

namespace {

HeckeElement random_element(std::mt19937_64& rng, TreeHeckePair pair, unsigned max_radius, bool integral) {
  HeckeElement x(pair);
  std::uniform_int_distribution<long> coef(-4, 4), den(1, 3);
  for (unsigned r = 0; r <= max_radius; ++r) {
    if (rng() % 3 == 0) continue;
    x.add(r, integral ? BigRational(coef(rng)) : make_rational(coef(rng), den(rng)));
  }
  return x;
}

// Inner product <a, b> = sum_r a_r b_r |S_r| of the indicator expansions.
BigRational l2_pairing(const HeckeElement& a, const HeckeElement& b) {
  BigRational s(0);
  for (const auto& [r, c] : a.coefficients()) s += c * b.coefficient(r) * BigRational(sphere_size(a.pair().q, r));
  return s;
}

}  // namespace

TEST(HeckeElement, ParseAndPrint) {
  const TreeHeckePair p(2);
  const auto x = parse_element("A0 + 3*A2 - 1/2*A5", p);
  EXPECT_EQ(x.coefficient(0), 1);
  EXPECT_EQ(x.coefficient(2), 3);
  EXPECT_EQ(x.coefficient(5), make_rational(-1, 2));
  EXPECT_EQ(x.support_radius(), 5u);
  EXPECT_FALSE(x.is_integral());
  EXPECT_EQ(parse_element(x.to_string(), p), x);
  EXPECT_EQ(parse_element("2", p), HeckeElement::basis(p, 0, 2));
  EXPECT_TRUE(parse_element("A1-A1", p).is_zero());
  for (const char* bad : {"", "A", "3*", "A1A2", "B1", "1/0*A1"}) EXPECT_THROW(parse_element(bad, p), Error) << bad;
}

TEST(HeckeElement, PairMustMatch) {
  EXPECT_THROW(tree_mul(HeckeElement::unit(TreeHeckePair(2)), HeckeElement::unit(TreeHeckePair(3))), Error);
  EXPECT_THROW(TreeHeckePair(0), Error);
}

TEST(TreeMul, HandComputedProducts) {
  const TreeHeckePair p(2);
  const auto a = [&](unsigned r) { return HeckeElement::basis(p, r); };
  EXPECT_EQ(tree_mul(a(1), a(1)), a(2) + HeckeElement::basis(p, 0, 3));
  EXPECT_EQ(tree_mul(a(1), a(2)), a(3) + HeckeElement::basis(p, 1, 2));
  EXPECT_EQ(tree_mul(a(2), a(2)), a(4) + a(2) + HeckeElement::basis(p, 0, 6));
  EXPECT_EQ(tree_mul(a(0), a(7)), a(7));
  // q = 1: the tree is a line and A_r A_s = A_(r+s) + A_|r-s| for r != s.
  const TreeHeckePair line(1);
  EXPECT_EQ(tree_mul(HeckeElement::basis(line, 2), HeckeElement::basis(line, 3)),
            HeckeElement::basis(line, 5) + HeckeElement::basis(line, 1));
}

TEST(TreeMul, AgreesWithBallCounting) {
  for (long q : {1, 2, 3}) {
    const TreeHeckePair p(q);
    for (unsigned r = 0; r <= 3; ++r)
      for (unsigned s = 0; s <= 3; ++s) {
        const auto product = tree_mul(HeckeElement::basis(p, r), HeckeElement::basis(p, s));
        const auto counts = structure_constants_oracle(p, r, s, r + s);
        HeckeElement expected(p);
        for (const auto& [u, c] : counts) expected.add(u, BigRational(c));
        EXPECT_EQ(product, expected) << "q=" << q << " r=" << r << " s=" << s;
      }
  }
  EXPECT_THROW(structure_constants_oracle(TreeHeckePair(2), 2, 2, 3), Error);
}

TEST(TreeMul, AlgebraLaws) {
  std::mt19937_64 rng(3);
  for (long q : {1, 2, 3, 5}) {
    const TreeHeckePair p(q);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_element(rng, p, 4, false), b = random_element(rng, p, 4, false),
                 c = random_element(rng, p, 3, false);
      EXPECT_EQ(tree_mul(a, b), tree_mul(b, a));
      EXPECT_EQ(tree_mul(tree_mul(a, b), c), tree_mul(a, tree_mul(b, c)));
      EXPECT_EQ(tree_mul(a, b + c), tree_mul(a, b) + tree_mul(a, c));
      EXPECT_EQ(involution(tree_mul(a, b)), tree_mul(involution(b), involution(a)));
      EXPECT_EQ(trace(tree_mul(a, b)), trace(tree_mul(b, a)));
      EXPECT_EQ(trace(tree_mul(a, b)), l2_pairing(a, b));
      EXPECT_GE(trace(tree_mul(involution(a), a)), 0);
      EXPECT_LE(l1_norm(tree_mul(a, b)), l1_norm(a) * l1_norm(b));
    }
  }
}

TEST(TreeMul, PositiveDefiniteTrace) {
  std::mt19937_64 rng(8);
  const TreeHeckePair p(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_element(rng, p, 5, false);
    if (a.is_zero()) continue;
    EXPECT_GT(trace(tree_mul(involution(a), a)), 0);
  }
}

TEST(HeckeMatrix, MomentsOfA1) {
  const TreeHeckePair p(2);
  const auto t = HeckeMatrix::scalar(HeckeElement::basis(p, 1));
  const auto m = moments(t, 4);
  EXPECT_EQ(m, (std::vector<BigRational>{1, 0, 3, 0, 15}));
  EXPECT_EQ(t.norm_bound(), 3);

  const auto a1 = HeckeElement::basis(p, 1);
  const auto d = HeckeMatrix::from_rows(p, {{a1, HeckeElement(p)}, {HeckeElement(p), a1}});
  EXPECT_EQ(moments(d, 2), (std::vector<BigRational>{2, 0, 6}));
  EXPECT_EQ(d.norm_bound(), 12);
}

TEST(HeckeMatrix, NonSelfAdjointRejected) {
  const TreeHeckePair p(2);
  const auto t = HeckeMatrix::from_rows(p, {{HeckeElement(p), HeckeElement::basis(p, 1)}, {HeckeElement(p), HeckeElement(p)}});
  EXPECT_FALSE(t.is_self_adjoint());
  EXPECT_THROW(moments(t, 2), Error);
}

TEST(BallRepresentation, ReturnValuesMatchMoments) {
  std::mt19937_64 rng(21);
  for (long q : {1, 2, 3}) {
    const TreeHeckePair p(q);
    for (int trial = 0; trial < 4; ++trial) {
      const auto x = random_element(rng, p, 2, true), y = random_element(rng, p, 1, true),
                 z = random_element(rng, p, 2, true);
      const auto t = HeckeMatrix::from_rows(p, {{x, y}, {y, z}});
      const unsigned k_max = 4;
      const auto op = operator_on_ball(t, k_max * std::max(1u, t.support_radius()) + 1);
      auto power = HeckeMatrix::identity(p, 2);
      for (unsigned k = 0; k <= k_max; ++k) {
        for (std::size_t i = 0; i < 2; ++i)
          EXPECT_EQ(BigRational(ball_return_value(op, i, k)), trace(power.at(i, i))) << "q=" << q << " k=" << k;
        power = power * t;
      }
    }
  }
}

TEST(BallRepresentation, Preconditions) {
  const TreeHeckePair p(2);
  const auto half = HeckeMatrix::scalar(HeckeElement::basis(p, 1, make_rational(1, 2)));
  EXPECT_THROW(operator_on_ball(half, 3), Error);
  const auto a3 = HeckeMatrix::scalar(HeckeElement::basis(p, 3));
  EXPECT_THROW(operator_on_ball(a3, 3), Error);
  EXPECT_THROW(operator_on_ball(a3, TreeBall(3, 5)), Error);
}

TEST(TreeBall, SphereSizes) {
  const TreeBall ball(3, 4);
  std::vector<BigInt> counts(5, BigInt(0));
  for (std::size_t v = 0; v < ball.size(); ++v) counts[ball.depth(v)] += 1;
  for (unsigned r = 0; r <= 4; ++r) EXPECT_EQ(counts[r], sphere_size(3, r));
}
