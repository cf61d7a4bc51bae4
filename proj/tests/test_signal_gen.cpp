#include <gtest/gtest.h>

#include <cmath>

#include "smoothtest/besov.hpp"
#include "smoothtest/errors.hpp"
#include "smoothtest/signal_gen.hpp"
#include "smoothtest/smooth_test.hpp"

using namespace smoothtest;

TEST(GenNull, WorstCaseSaturatesEveryLevel) {
  const TreeShape shape{0, 1, 8};
  const CoefficientTree tree = gen_null(1.5, 2.0, shape, 1.0, 3);
  EXPECT_NEAR(besov_norm(tree, 1.5), 2.0, 1e-9);
  EXPECT_EQ(distance_to_ball(tree, BesovBall{1.5, 2.0}), 0.0);
  for (int l = 0; l <= 8; ++l) {
    EXPECT_NEAR(level_norm(tree, l), 2.0 * std::exp2(-1.5 * l), 1e-9);
  }
}

TEST(GenNull, FillScalesLevelNorms) {
  const TreeShape shape{1, 3, 6};
  for (double fill : {0.1, 0.5, 0.99}) {
    const CoefficientTree tree = gen_null(2.0, 1.0, shape, fill, 11);
    EXPECT_NEAR(besov_norm(tree, 2.0), fill, 1e-9);
    for (int l = 1; l <= 6; ++l) {
      EXPECT_NEAR(level_norm(tree, l), fill * std::exp2(-2.0 * l), 1e-9);
    }
  }
}

TEST(GenNull, DirectionsDependOnSeed) {
  const TreeShape shape{0, 1, 4};
  EXPECT_EQ(gen_null(1.0, 1.0, shape, 1.0, 5), gen_null(1.0, 1.0, shape, 1.0, 5));
  EXPECT_NE(gen_null(1.0, 1.0, shape, 1.0, 5), gen_null(1.0, 1.0, shape, 1.0, 6));
}

TEST(GenNull, RejectsBadFill) {
  const TreeShape shape{0, 1, 2};
  EXPECT_THROW(gen_null(1.0, 1.0, shape, 0.0, 1), DomainError);
  EXPECT_THROW(gen_null(1.0, 1.0, shape, 1.5, 1), DomainError);
  EXPECT_THROW(gen_null(-1.0, 1.0, shape, 1.0, 1), DomainError);
}

TEST(GenAlternative, SingleLevelWithExactNorm) {
  const double n = 1e6;
  const double upsilon = 0.8;
  const int j = compute_j(n, 1.0);
  const CoefficientTree tree = gen_alternative(1.0, 1.0, upsilon, n, TreeShape{0, 1, 3}, 21);
  ASSERT_EQ(tree.max_level(), j);
  for (int l = 0; l < j; ++l) EXPECT_EQ(level_norm(tree, l), 0.0);
  const double a = 1.0 / (std::sqrt(n) * std::exp2(j / 4.0));
  for (std::size_t k = 0; k < tree.level_size(j); ++k) {
    EXPECT_DOUBLE_EQ(std::fabs(tree.at(j, k)), upsilon * a);
  }
  EXPECT_NEAR(level_norm(tree, j), upsilon * std::exp2(j / 4.0) / std::sqrt(n), 1e-15);
  EXPECT_LE(besov_norm(tree, 1.0), upsilon);
  const double expected_distance =
      std::max(0.0, upsilon * std::exp2(j / 4.0) / std::sqrt(n) - std::exp2(-2.0 * j));
  EXPECT_NEAR(distance_to_ball(tree, BesovBall{2.0, 1.0}), expected_distance, 1e-15);
}

TEST(GenAlternative, BesovNormStaysBelowUpsilonAsNGrows) {
  for (double t : {0.3, 0.75, 1.0, 2.0}) {
    for (double n = 16.0; n < 1e12; n *= 2.0) {
      if (compute_j(n, t) > 20) break;
      const CoefficientTree tree = gen_alternative(t, 1.0, 0.9, n, TreeShape{0, 1, 0}, 1);
      EXPECT_LE(besov_norm(tree, t), 0.9 * (1.0 + 1e-12)) << "t=" << t << " n=" << n;
    }
  }
}

TEST(GenAlternative, SignsAreBalanced) {
  const CoefficientTree tree = gen_alternative(0.25, 1.0, 1.0, 1e6, TreeShape{0, 1, 0}, 8);
  const int j = tree.max_level();
  ASSERT_EQ(j, 19);
  double sum = 0.0;
  for (double v : tree.level(j)) sum += v > 0.0 ? 1.0 : -1.0;
  EXPECT_LT(std::fabs(sum), 4.0 * std::sqrt(static_cast<double>(tree.level_size(j))));
}

TEST(GenAlternative, Errors) {
  const TreeShape shape{0, 1, 2};
  EXPECT_THROW(gen_alternative(1.0, 1.0, 0.0, 1e6, shape, 1), DomainError);
  EXPECT_THROW(gen_alternative(1.0, 1.0, 1.2, 1e6, shape, 1), DomainError);
  EXPECT_THROW(gen_alternative(1.0, 0.5, 0.6, 1e6, shape, 1), DomainError);
  EXPECT_THROW(gen_alternative(1.0, 1.0, 0.5, 1e3, TreeShape{5, 1, 5}, 1), ConfigurationError);
}

TEST(GenSeparated, WitnessSatisfiesBothPredicates) {
  const TreeShape shape{0, 1, 10};
  for (double rho : {1e-6, 1e-3, 0.05, 0.1, 0.2}) {
    const CoefficientTree tree = gen_separated(0.5, 1.5, 1.0, rho, shape, 4);
    EXPECT_LE(besov_norm(tree, 0.5), 1.0 + 1e-12);
    EXPECT_GE(distance_to_ball(tree, BesovBall{1.5, 1.0}), rho * (1.0 - 1e-12));
  }
}

TEST(GenSeparated, UsesSmallestFeasibleLevel) {
  const TreeShape shape{0, 1, 10};
  const double rho = 0.2;
  const int l = separation_level(0.5, 1.5, 1.0, rho, shape);
  ASSERT_GT(l, 0);
  const CoefficientTree tree = gen_separated(0.5, 1.5, 1.0, rho, shape, 4);
  for (int m = 0; m <= 10; ++m) {
    if (m == l) {
      EXPECT_NEAR(level_norm(tree, m), rho + std::exp2(-1.5 * l), 1e-12);
    } else {
      EXPECT_EQ(level_norm(tree, m), 0.0);
    }
  }
  EXPECT_LT(std::exp2(-0.5 * (l - 1)), rho + std::exp2(-1.5 * (l - 1)));
}

TEST(GenSeparated, InfeasibleRhoReportsCap) {
  const TreeShape shape{0, 1, 10};
  const double cap = separation_cap(1.0, 2.0, 1.0, shape);
  EXPECT_NEAR(cap, 0.25, 1e-15);
  try {
    gen_separated(1.0, 2.0, 1.0, 0.3, shape, 1);
    FAIL() << "expected FeasibilityError";
  } catch (const FeasibilityError& e) {
    EXPECT_EQ(e.cap(), cap);
  }
  EXPECT_NO_THROW(gen_separated(1.0, 2.0, 1.0, 0.25, shape, 1));
}

TEST(GenSeparated, EqualSmoothnessIsInfeasible) {
  EXPECT_THROW(gen_separated(1.0, 1.0, 1.0, 1e-9, TreeShape{0, 1, 10}, 1), FeasibilityError);
}

TEST(MinNForSeparation, MatchesHighPrecisionReference) {
  const TestParams params{1e6, 1.0, 2.0, 1.0, 0.1, 0, 1};
  // (C / 0.25)^{5/2} with C = 1617.269831438434, evaluated at 30 digits.
  EXPECT_NEAR(min_n_for_separation(params, 10) / 3365938615.8892320, 1.0, 1e-12);
  TestParams at_threshold = params;
  at_threshold.n = min_n_for_separation(params, 10) * (1.0 + 1e-9);
  EXPECT_LE(rho_upper(at_threshold), separation_cap(1.0, 2.0, 1.0, TreeShape{0, 1, 10}));
}

TEST(Generate, DispatchesOnKind) {
  SignalSpec spec;
  spec.kind = SignalKind::null_worst_case;
  spec.shape = TreeShape{0, 1, 4};
  spec.seed = 9;
  EXPECT_EQ(generate(spec), gen_null(spec.s, spec.B, spec.shape, 1.0, 9));
  spec.kind = SignalKind::separated_alt;
  spec.t = 0.5;
  spec.s = 1.5;
  spec.rho = 0.1;
  EXPECT_EQ(generate(spec), gen_separated(0.5, 1.5, 1.0, 0.1, spec.shape, 9));
  spec.kind = SignalKind::explicit_tree;
  EXPECT_THROW(generate(spec), DomainError);
  spec.tree = CoefficientTree(0, 1, {{0.5}});
  EXPECT_EQ(generate(spec), *spec.tree);
}

TEST(SignalKind, StringRoundTrip) {
  for (SignalKind kind : {SignalKind::null_worst_case, SignalKind::null_random,
                          SignalKind::rademacher_alt, SignalKind::separated_alt,
                          SignalKind::explicit_tree}) {
    EXPECT_EQ(signal_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(signal_kind_from_string("bogus"), DomainError);
}
