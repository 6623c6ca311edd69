#include <gtest/gtest.h>

#include "l2hecke/coxeter.hpp"

using namespace l2hecke;
using namespace l2hecke::coxeter;

namespace {

// omega_affine(q) evaluated one factor at a time: prod (1 + ... + q^e) / (1 - q^e).
BigRational omega_factorwise(const std::vector<unsigned>& exps, long q) {
  BigRational out(1);
  for (unsigned e : exps) {
    BigRational num(0), qe(1);
    for (unsigned i = 0; i <= e; ++i) {
      num += qe;
      if (i < e) qe *= q;
    }
    out *= num / (1 - qe);
  }
  return out;
}

}  // namespace

TEST(Exponents, TableRows) {
  EXPECT_EQ(exponents(Family::A, 3), (std::vector<unsigned>{1, 2, 3}));
  EXPECT_EQ(exponents(Family::G2, 2), (std::vector<unsigned>{1, 5}));
  EXPECT_EQ(exponents(Family::D, 4), (std::vector<unsigned>{1, 3, 3, 5}));
  EXPECT_EQ(exponents(Family::B, 3), exponents(Family::C, 3));
  EXPECT_EQ(exponents(Family::E8, 8), (std::vector<unsigned>{1, 7, 11, 13, 17, 19, 23, 29}));
  EXPECT_EQ(exponents(Family::F4, 4), (std::vector<unsigned>{1, 5, 7, 11}));
}

TEST(Exponents, RangeChecks) {
  EXPECT_THROW(exponents(Family::A, 0), Error);
  EXPECT_THROW(exponents(Family::B, 1), Error);
  EXPECT_THROW(exponents(Family::D, 2), Error);
  EXPECT_THROW(exponents(Family::E6, 7), Error);
  EXPECT_FALSE(parse_family("Z").has_value());
}

TEST(Exponents, SumIsPositiveRootCount) {
  for (auto [f, r] : supported_types(8)) {
    const auto e = exponents(f, r);
    EXPECT_EQ(e.size(), r);
    unsigned sum = 0;
    for (unsigned x : e) sum += x;
    EXPECT_EQ(sum, positive_root_count(f, r)) << family_name(f) << r;
  }
}

TEST(Poincare, Examples) {
  const IntPolynomial one_plus_t(std::vector<BigInt>{1, 1});
  EXPECT_EQ(poincare_series(make_datum(Family::A, 1, false)), RationalFunction(one_plus_t));
  EXPECT_EQ(poincare_series(make_datum(Family::A, 1, true)),
            RationalFunction(one_plus_t, IntPolynomial(std::vector<BigInt>{1, -1})));
  EXPECT_EQ(poincare_series(make_datum(Family::B, 2, false)),
            RationalFunction(one_plus_t * geometric_sum_poly(3)));
  EXPECT_TRUE(poincare_series(make_datum(Family::E8, 8, false)).is_polynomial());
}

TEST(Poincare, TwoEvaluationOrdersAgree) {
  for (auto [f, r] : supported_types(8))
    for (long q = 2; q <= 16; ++q) {
      const auto d = make_datum(f, r, true);
      EXPECT_EQ(ratfun_eval(poincare_series(d), q), omega_factorwise(d.exponents, q)) << d.name() << " q=" << q;
    }
}

TEST(Chevalley, SpotValues) {
  const auto a1 = chevalley_report(Family::A, 1, 2);
  EXPECT_EQ(a1.beta_top, make_rational(1, 3));
  EXPECT_EQ(a1.covolume, 1);
  EXPECT_EQ(a1.lattice_beta_top, make_rational(1, 3));
  EXPECT_EQ(a1.euler, make_rational(-1, 3));

  const auto a2 = chevalley_report(Family::A, 2, 2);
  EXPECT_EQ(a2.beta_top, make_rational(1, 7));
  EXPECT_EQ(a2.covolume, make_rational(1, 3));
  EXPECT_EQ(a2.lattice_beta_top, make_rational(1, 21));
  EXPECT_EQ(a2.euler, make_rational(1, 7));

  const auto a1q5 = chevalley_report(Family::A, 1, 5);
  EXPECT_EQ(a1q5.lattice_beta_top, make_rational(1, 24));
  EXPECT_EQ(a1q5.lattice_beta_top, a1q5.covolume * a1q5.beta_top);
}

TEST(Chevalley, IdentitiesOverTheGrid) {
  for (auto [f, r] : supported_types(8)) {
    BigRational previous(0);
    for (long q = 2; q <= 16; ++q) {
      const auto rep = chevalley_report(f, r, q);
      EXPECT_TRUE(rep.euler_poincare_ok) << rep.datum.name() << " q=" << q;
      EXPECT_TRUE(rep.lattice_identity_ok) << rep.datum.name() << " q=" << q;
      EXPECT_GT(rep.beta_top, 0);
      EXPECT_LT(rep.beta_top, 1);
      EXPECT_GT(rep.beta_top, previous);
      previous = rep.beta_top;
    }
  }
}

TEST(Chevalley, Flags) {
  EXPECT_TRUE(chevalley_report(Family::D, 3, 2).d3_is_a3);
  EXPECT_FALSE(chevalley_report(Family::D, 4, 2).d3_is_a3);
  EXPECT_FALSE(chevalley_report(Family::A, 1, 6).q_is_prime_power);
  EXPECT_TRUE(chevalley_report(Family::A, 1, 9).q_is_prime_power);
  EXPECT_TRUE(chevalley_report(Family::A, 2, 4).min_covolume_hypotheses_met);
  EXPECT_FALSE(chevalley_report(Family::B, 2, 4).min_covolume_hypotheses_met);
  EXPECT_TRUE(chevalley_report(Family::B, 2, 49).min_covolume_hypotheses_met);
  EXPECT_THROW(chevalley_report(Family::A, 1, 1), Error);
  // The E8 numbers at q = 16 exceed 64 bits by far.
  EXPECT_GT(chevalley_report(Family::E8, 8, 16).borel_order, pow_int(BigInt(2), 400));
}

TEST(Cells, EulerFromCells) {
  const std::vector<CellDatum> point{{0, 1}};
  EXPECT_EQ(euler_from_cells(point), 1);
  const std::vector<CellDatum> tree{{0, 3}, {0, 3}, {1, 1}};
  EXPECT_EQ(euler_from_cells(tree), make_rational(-1, 3));
  EXPECT_EQ(euler_from_cells(tree), chevalley_report(Family::A, 1, 2).euler);
  const std::vector<CellDatum> a2{{0, 21}, {0, 21}, {0, 21}, {1, 3}, {1, 3}, {1, 3}, {2, 1}};
  EXPECT_EQ(euler_from_cells(a2), make_rational(1, 7));
}

TEST(Morse, Beta1Bound) {
  const std::vector<long> one{1}, three{3}, four{1, 1, 1, 1};
  EXPECT_EQ(morse_beta1_bound(1, one), 0);
  EXPECT_EQ(morse_beta1_bound(3, three), make_rational(2, 3));
  EXPECT_EQ(morse_beta1_bound(1, four), 3);
  EXPECT_THROW(morse_beta1_bound(1, std::vector<long>{}), Error);
  for (long q = 2; q <= 16; ++q) {
    const std::vector<long> idx{q + 1};
    EXPECT_GE(morse_beta1_bound(q + 1, idx), chevalley_report(Family::A, 1, q).beta_top);
  }
}

TEST(Morse, PartialSums) {
  const std::vector<CellDatum> tree{{0, 3}, {0, 3}, {1, 1}};
  const std::vector<BigRational> exact{0, make_rational(1, 3)}, zero{0, 0}, too_big{0, 1};
  EXPECT_TRUE(morse_partial_sums(exact, tree, 1));
  EXPECT_TRUE(morse_partial_sums(zero, tree, 1));
  EXPECT_FALSE(morse_partial_sums(too_big, tree, 1));
  EXPECT_THROW(morse_partial_sums(exact, tree, 2), Error);
}
