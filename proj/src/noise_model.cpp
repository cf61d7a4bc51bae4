#include "smoothtest/noise_model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "smoothtest/errors.hpp"
#include "smoothtest/rng.hpp"

namespace smoothtest {

namespace {

void require_noise_level(double n) {
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DomainError("noise parameter n must be positive and finite, got " +
                      std::to_string(n));
  }
}

Observation draw(const CoefficientTree& signal, double n, std::uint64_t seed,
                 const CoefficientTree* profile) {
  signal.validate();
  const double scale = 1.0 / std::sqrt(n);
  NormalStream noise(seed);
  const auto clean = signal.values();
  std::vector<double> values(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double sd = profile ? std::sqrt(profile->values()[i]) * scale : scale;
    values[i] = clean[i] + sd * noise();
  }
  return Observation{CoefficientTree(signal.shape(), std::move(values)), n, seed, 0};
}

}  // namespace

Observation observe(const CoefficientTree& signal, double n, std::uint64_t seed) {
  require_noise_level(n);
  return draw(signal, n, seed, nullptr);
}

std::pair<Observation, Observation> observe_split(const CoefficientTree& signal,
                                                  double n, std::uint64_t seed) {
  require_noise_level(n);
  Observation first = draw(signal, n / 2.0, derive_seed(seed, {1}), nullptr);
  Observation second = draw(signal, n / 2.0, derive_seed(seed, {2}), nullptr);
  first.seed = seed;
  first.split = 1;
  second.seed = seed;
  second.split = 2;
  return {std::move(first), std::move(second)};
}

Observation observe_hetero(const CoefficientTree& signal, double n,
                           const CoefficientTree& variance_profile,
                           std::uint64_t seed) {
  require_noise_level(n);
  if (!(variance_profile.shape() == signal.shape())) {
    throw StructuralError("variance profile shape differs from signal shape");
  }
  for (double v : variance_profile.values()) {
    if (!(v > 0.0)) {
      throw DomainError("variance profile entries must be positive, got " +
                        std::to_string(v));
    }
  }
  return draw(signal, n, seed, &variance_profile);
}

}  // namespace smoothtest
