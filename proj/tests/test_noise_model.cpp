#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "smoothtest/errors.hpp"
#include "smoothtest/noise_model.hpp"
#include "smoothtest/rng.hpp"
#include "test_support.hpp"

using namespace smoothtest;
using smoothtest::testing::moments;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<double> standardized_noise(const Observation& obs, const CoefficientTree& signal) {
  std::vector<double> out;
  const auto a = signal.values();
  const auto a_hat = obs.tree.values();
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back((a_hat[i] - a[i]) * std::sqrt(obs.n));
  return out;
}

double ks_statistic(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace

TEST(Observe, ReproducibleForFixedSeed) {
  const CoefficientTree signal(TreeShape{0, 1, 6});
  const Observation a = observe(signal, 100.0, 42);
  const Observation b = observe(signal, 100.0, 42);
  const Observation c = observe(signal, 100.0, 43);
  EXPECT_EQ(a.tree, b.tree);
  EXPECT_NE(a.tree, c.tree);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_EQ(a.split, 0);
}

TEST(Observe, RejectsNonPositiveN) {
  const CoefficientTree signal(TreeShape{0, 1, 2});
  EXPECT_THROW(observe(signal, 0.0, 1), DomainError);
  EXPECT_THROW(observe(signal, -5.0, 1), DomainError);
  EXPECT_THROW(observe_split(signal, 0.0, 1), DomainError);
}

TEST(Observe, CoordinateMomentsMatchModel) {
  CoefficientTree signal(TreeShape{0, 1, 1});
  signal.set(0, 0, 0.7);
  signal.set(1, 1, -0.2);
  const double n = 400.0;
  std::vector<double> first;
  std::vector<double> last;
  for (std::uint64_t rep = 0; rep < 10000; ++rep) {
    const Observation obs = observe(signal, n, derive_seed(5, {rep}));
    first.push_back(obs.tree.at(0, 0));
    last.push_back(obs.tree.at(1, 1));
  }
  const auto m0 = moments(first);
  const auto m1 = moments(last);
  const double mean_tol = 3.0 / std::sqrt(n * 1e4);
  EXPECT_NEAR(m0.mean, 0.7, mean_tol);
  EXPECT_NEAR(m1.mean, -0.2, mean_tol);
  EXPECT_NEAR(m0.variance * n, 1.0, 0.05);
  EXPECT_NEAR(m1.variance * n, 1.0, 0.05);
}

TEST(Observe, StandardizedNoisePassesKolmogorovSmirnov) {
  const CoefficientTree signal(TreeShape{0, 1, 14});
  const Observation obs = observe(signal, 1e6, 2024);
  const auto xs = standardized_noise(obs, signal);
  const double critical = 1.6276 / std::sqrt(static_cast<double>(xs.size()));
  EXPECT_LT(ks_statistic(xs), critical);
}

TEST(Observe, NoiseIsUncorrelatedAcrossCoordinates) {
  const CoefficientTree signal(TreeShape{0, 1, 14});
  const auto xs = standardized_noise(observe(signal, 50.0, 7), signal);
  double lag = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) lag += xs[i] * xs[i - 1];
  lag /= static_cast<double>(xs.size() - 1);
  EXPECT_LT(std::fabs(lag), 4.0 / std::sqrt(static_cast<double>(xs.size())));
}

TEST(ObserveSplit, HalvesHaveDoubleVarianceAndAreIndependent) {
  const CoefficientTree signal(TreeShape{0, 1, 0});
  const double n = 1000.0;
  std::vector<double> h1, h2, prod;
  for (std::uint64_t rep = 0; rep < 10000; ++rep) {
    const auto [a, b] = observe_split(signal, n, derive_seed(9, {rep}));
    EXPECT_EQ(a.n, n / 2.0);
    EXPECT_EQ(a.split, 1);
    EXPECT_EQ(b.split, 2);
    h1.push_back(a.tree.at(0, 0));
    h2.push_back(b.tree.at(0, 0));
    prod.push_back(a.tree.at(0, 0) * b.tree.at(0, 0) * n / 2.0);
  }
  EXPECT_NEAR(moments(h1).variance * n / 2.0, 1.0, 0.05);
  EXPECT_NEAR(moments(h2).variance * n / 2.0, 1.0, 0.05);
  EXPECT_NEAR(moments(h1).mean, 0.0, 3.0 * moments(h1).standard_error);
  EXPECT_NEAR(moments(h2).mean, 0.0, 3.0 * moments(h2).standard_error);
  const auto cross = moments(prod);
  EXPECT_NEAR(cross.mean, 0.0, 3.0 * cross.standard_error);
}

TEST(ObserveSplit, HalvesUseDerivedStreams) {
  CoefficientTree signal(TreeShape{0, 1, 3});
  signal.set(2, 1, 0.5);
  const auto [a, b] = observe_split(signal, 64.0, 77);
  EXPECT_EQ(a.tree, observe(signal, 32.0, derive_seed(77, {1})).tree);
  EXPECT_EQ(b.tree, observe(signal, 32.0, derive_seed(77, {2})).tree);
}

TEST(ObserveHetero, UnitProfileReproducesHomoscedasticDraws) {
  std::mt19937_64 rng(3);
  const CoefficientTree signal = smoothtest::testing::random_tree(rng, 0, 1, 5);
  CoefficientTree ones(signal.shape());
  for (int l = 0; l <= 5; ++l) {
    for (std::size_t k = 0; k < ones.level_size(l); ++k) ones.set(l, k, 1.0);
  }
  EXPECT_EQ(observe_hetero(signal, 10.0, ones, 99).tree, observe(signal, 10.0, 99).tree);
}

TEST(ObserveHetero, VarianceFollowsProfile) {
  const CoefficientTree signal(TreeShape{0, 1, 1});
  CoefficientTree profile(signal.shape());
  profile.set(0, 0, 1.0);
  profile.set(1, 0, 4.0);
  profile.set(1, 1, 0.25);
  const double n = 50.0;
  std::vector<std::vector<double>> draws(3);
  for (std::uint64_t rep = 0; rep < 10000; ++rep) {
    const Observation obs = observe_hetero(signal, n, profile, derive_seed(4, {rep}));
    draws[0].push_back(obs.tree.at(0, 0));
    draws[1].push_back(obs.tree.at(1, 0));
    draws[2].push_back(obs.tree.at(1, 1));
  }
  const double expected[] = {1.0, 4.0, 0.25};
  for (int i = 0; i < 3; ++i) {
    // Sample variance of N normals has standard error sigma^2 sqrt(2 / (N - 1)).
    const double target = expected[i] / n;
    const double se = target * std::sqrt(2.0 / 9999.0);
    EXPECT_NEAR(moments(draws[i]).variance, target, 3.0 * se);
  }
}

TEST(ObserveHetero, ProfileFourDoublesStandardDeviation) {
  const CoefficientTree signal(TreeShape{0, 1, 0});
  CoefficientTree unit(signal.shape(), {1.0});
  CoefficientTree four(signal.shape(), {4.0});
  std::vector<double> a, b;
  for (std::uint64_t rep = 0; rep < 10000; ++rep) {
    a.push_back(observe_hetero(signal, 1.0, unit, derive_seed(6, {rep})).tree.at(0, 0));
    b.push_back(observe_hetero(signal, 1.0, four, derive_seed(8, {rep})).tree.at(0, 0));
  }
  EXPECT_NEAR(std::sqrt(moments(b).variance / moments(a).variance), 2.0, 0.1);
}

TEST(ObserveHetero, ValidatesProfile) {
  const CoefficientTree signal(TreeShape{0, 1, 2});
  CoefficientTree zero_profile(signal.shape());
  EXPECT_THROW(observe_hetero(signal, 1.0, zero_profile, 1), DomainError);
  const CoefficientTree wrong_shape(TreeShape{0, 1, 1});
  EXPECT_THROW(observe_hetero(signal, 1.0, wrong_shape, 1), StructuralError);
}

TEST(DeriveSeed, DistinctPathsGiveDistinctSeeds) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    seeds.push_back(derive_seed(1, {i}));
    seeds.push_back(derive_seed(1, {i, 1}));
    seeds.push_back(derive_seed(2, {i}));
  }
  std::sort(seeds.begin(), seeds.end());
  EXPECT_EQ(std::adjacent_find(seeds.begin(), seeds.end()), seeds.end());
  EXPECT_EQ(derive_seed(1, {5, 6}), derive_seed(1, {5, 6}));
}
