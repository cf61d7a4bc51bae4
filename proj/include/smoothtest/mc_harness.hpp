#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "smoothtest/signal_gen.hpp"
#include "smoothtest/smooth_test.hpp"

namespace smoothtest {

/// Whether rejections count as errors (level) or successes (power).
enum class ErrorMode { level, power };

struct ExperimentSpec {
  TestParams params;
  SignalSpec signal;
  std::size_t trials = 2000;
  std::uint64_t master_seed = 1;
  ErrorMode mode = ErrorMode::level;
  /// Use the split-sample statistic instead of the plug-in one.
  bool split = false;
  SplitCalibration calibration;
  /// Worker threads; results do not depend on it.
  unsigned jobs = 1;

  void validate() const;
};

struct MCResult {
  std::size_t trials = 0;
  std::size_t rejections = 0;
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;

  /// Rejection rate for level runs, 1 - rate for power runs.
  double error_rate(ErrorMode mode) const {
    return mode == ErrorMode::level ? rate : 1.0 - rate;
  }
  /// Binomial standard error of the rate.
  double standard_error() const;
};

/// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t rejections, std::size_t trials,
                                          double confidence = 0.95);

/// Runs `trials` independent tests of the signal described by the spec.
/// Trial i observes with the stream derive_seed(master_seed, {i}).
MCResult estimate_error(const ExperimentSpec& spec);

/// Same, for a signal that has already been generated.
MCResult estimate_error(const ExperimentSpec& spec, const CoefficientTree& signal);

struct SweepSpec {
  /// n is taken from the grid; the rest is shared by every point.
  TestParams params;
  std::vector<double> n_grid;
  std::size_t trials_per_probe = 500;
  int max_steps = 20;
  double target_power = 0.5;
  /// Lower end of the bisection bracket relative to the feasibility cap.
  double bracket_ratio = 1e-6;
  std::uint64_t master_seed = 1;
  unsigned jobs = 1;

  void validate() const;
};

struct BisectionProbe {
  double rho = 0.0;
  MCResult result;
};

struct SweepPoint {
  double n = 0.0;
  int j = 0;
  /// Smallest probed rho whose power reached the target.
  double boundary = 0.0;
  /// Largest probed rho with power significantly below target and smallest
  /// with power significantly above it (Wilson 95%).
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double lower_reference = 0.0;  ///< D(alpha) n^{-t/(2t+1/2)} / 2
  double upper_reference = 0.0;  ///< C(alpha) n^{-t/(2t+1/2)}
  std::vector<BisectionProbe> trace;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
  double expected_slope = 0.0;
};

/// Empirical 50%-power detection boundary for each n (bisection over the
/// amplitude of gen_separated in log scale) and the least-squares slope of
/// log boundary against log n.
SweepResult rate_sweep(const SweepSpec& spec);

/// Ordinary least squares y = intercept + slope x.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace smoothtest
