#include "smoothtest/lb_oracle.hpp"

#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "smoothtest/detail/summation.hpp"
#include "smoothtest/errors.hpp"
#include "smoothtest/rng.hpp"
#include "smoothtest/smooth_test.hpp"

namespace smoothtest {

namespace {

constexpr std::size_t kMaxEnumerationWidth = 12;

double log_cosh(double x) {
  const double ax = std::fabs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

}  // namespace

LowerBoundInstance LowerBoundInstance::for_rate(double upsilon, double n, double t) {
  LowerBoundInstance inst{upsilon, n, compute_j(n, t)};
  inst.validate();
  return inst;
}

LowerBoundInstance LowerBoundInstance::at_level(double upsilon, int j, double n) {
  LowerBoundInstance inst{upsilon, n, j};
  inst.validate();
  return inst;
}

double LowerBoundInstance::magnitude() const {
  return 1.0 / (std::sqrt(n) * std::exp2(static_cast<double>(j) / 4.0));
}

std::size_t LowerBoundInstance::width() const { return std::size_t{1} << j; }

double LowerBoundInstance::coupling() const {
  return upsilon * upsilon * std::exp2(-static_cast<double>(j) / 2.0);
}

void LowerBoundInstance::validate() const {
  if (!(upsilon >= 0.0 && upsilon <= 1.0)) {
    throw DomainError(fmt::format("upsilon must lie in [0, 1], got {}", upsilon));
  }
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("n must be positive");
  if (j < 0 || j > 30) throw DomainError(fmt::format("level j = {} out of range", j));
}

double chi2_closed_form(const LowerBoundInstance& inst) {
  inst.validate();
  const double x = inst.coupling();
  // cosh(x) - 1 = 2 sinh^2(x/2), so log cosh(x) = log1p(2 sinh^2(x/2)).
  const double half = std::sinh(x / 2.0);
  const double log_cosh_x = std::log1p(2.0 * half * half);
  return std::expm1(static_cast<double>(inst.width()) * log_cosh_x);
}

double chi2_enumeration(const LowerBoundInstance& inst) {
  inst.validate();
  const std::size_t m = inst.width();
  if (m > kMaxEnumerationWidth) {
    throw CostError(fmt::format("enumeration over I x I needs 4^{} terms; width is "
                                "capped at {}",
                                m, kMaxEnumerationWidth));
  }
  // Each pair contributes prod_k [e^{-x} 1{alpha_k = alpha'_k} + e^{x} 1{alpha_k != alpha'_k}]
  // = exp(x (#disagree - #agree)); subtract 1 per pair before summing so the
  // small result is not lost to cancellation.
  const double x = inst.coupling();
  const std::uint64_t patterns = std::uint64_t{1} << m;
  detail::CompensatedSum sum;
  for (std::uint64_t alpha = 0; alpha < patterns; ++alpha) {
    for (std::uint64_t beta = 0; beta < patterns; ++beta) {
      const int disagree = std::popcount(alpha ^ beta);
      const int agree = static_cast<int>(m) - disagree;
      sum.add(std::expm1(x * static_cast<double>(disagree - agree)));
    }
  }
  return sum.value() / (static_cast<double>(patterns) * static_cast<double>(patterns));
}

Chi2Estimate chi2_monte_carlo(const LowerBoundInstance& inst, std::size_t trials,
                              std::uint64_t seed) {
  inst.validate();
  if (trials < 1000) throw DomainError("chi2_monte_carlo needs at least 1000 trials");
  Chi2Estimate out;
  out.trials = trials;
  if (inst.upsilon == 0.0) return out;

  const double sd = 1.0 / std::sqrt(inst.n);
  const double ua = inst.upsilon * inst.magnitude();
  const double drift = inst.n * ua * ua / 2.0;
  const std::size_t m = inst.width();
  NormalStream rng(seed);
  detail::CompensatedSum sq_sum, sq_sum2, abs_sum, abs_sum2;
  for (std::size_t i = 0; i < trials; ++i) {
    double log_z = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double x = sd * rng();
      log_z += log_cosh(inst.n * x * ua) - drift;
    }
    const double centered = std::expm1(log_z);
    const double sq = centered * centered;
    sq_sum.add(sq);
    sq_sum2.add(sq * sq);
    abs_sum.add(std::fabs(centered));
    abs_sum2.add(sq);
  }
  const double count = static_cast<double>(trials);
  const auto stats = [count](double s1, double s2) {
    const double mean = s1 / count;
    const double var = std::max(0.0, (s2 - count * mean * mean) / (count - 1.0));
    return std::pair{mean, std::sqrt(var / count)};
  };
  std::tie(out.estimate, out.standard_error) = stats(sq_sum.value(), sq_sum2.value());
  std::tie(out.abs_estimate, out.abs_standard_error) = stats(abs_sum.value(), abs_sum2.value());
  return out;
}

double min_error_bound(double upsilon) {
  if (!(upsilon >= 0.0 && upsilon < 1.0)) {
    throw DomainError(fmt::format("upsilon must lie in [0, 1), got {}", upsilon));
  }
  const double u2 = upsilon * upsilon;
  return 1.0 - 2.0 * u2 * u2;
}

double upsilon_for_level(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in [0, 1)");
  return std::pow((1.0 - alpha) / 2.0, 0.25);
}

}  // namespace smoothtest
