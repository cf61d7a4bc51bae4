#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace smoothtest {

/// Derives an independent stream seed from a master seed and a path of
/// indices (trial, half, ...). Each step folds one index through the
/// SplitMix64 finaliser, so distinct paths give decorrelated seeds.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path);

/// Standard-normal variates from a 64-bit Mersenne Twister. Normals come
/// from std::normal_distribution, which in libstdc++ is Marsaglia's polar
/// method; output is bit-reproducible for a given seed within one build.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double operator()() { return normal_(engine_); }

  /// Uniform on [0, 1).
  double uniform() { return std::generate_canonical<double, 64>(engine_); }

  /// +1 or -1 with equal probability.
  int sign() { return (engine_() >> 63) != 0 ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace smoothtest
