#pragma once

#include <cstdint>
#include <utility>

#include "smoothtest/coefficient_tree.hpp"

namespace smoothtest {

/// Empirical coefficients a_hat = a + g / sqrt(n).
struct Observation {
  CoefficientTree tree;
  /// Effective noise parameter: each coefficient has variance 1/n.
  double n = 1.0;
  std::uint64_t seed = 0;
  /// 0 for a full-sample observation, 1 or 2 for a split half.
  int split = 0;
};

/// Gaussian sequence observation of `signal` at noise level 1/n. Noise is
/// drawn in level-major order from a stream seeded by `seed`.
Observation observe(const CoefficientTree& signal, double n, std::uint64_t seed);

/// Two independent half-sample observations, each with variance 2/n. Half h
/// draws from the stream derive_seed(seed, {h}).
std::pair<Observation, Observation> observe_split(const CoefficientTree& signal,
                                                  double n, std::uint64_t seed);

/// Heteroscedastic observation: coefficient (l,k) gets variance
/// profile_{l,k} / n. `variance_profile` must have the signal's shape and be
/// strictly positive. A unit profile reproduces observe() draw for draw.
Observation observe_hetero(const CoefficientTree& signal, double n,
                           const CoefficientTree& variance_profile,
                           std::uint64_t seed);

}  // namespace smoothtest
