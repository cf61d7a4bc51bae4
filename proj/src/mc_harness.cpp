#include "smoothtest/mc_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "smoothtest/errors.hpp"
#include "smoothtest/noise_model.hpp"
#include "smoothtest/rng.hpp"

namespace smoothtest {

void ExperimentSpec::validate() const {
  params.validate();
  if (trials < 100) throw DomainError("an experiment needs at least 100 trials");
}

double MCResult::standard_error() const {
  if (trials == 0) return 0.0;
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

std::pair<double, double> wilson_interval(std::size_t rejections, std::size_t trials,
                                          double confidence) {
  if (trials == 0 || rejections > trials) {
    throw DomainError("wilson_interval needs 0 <= rejections <= trials, trials > 0");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw DomainError("confidence must lie in (0, 1)");
  }
  const double z =
      boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + confidence / 2.0);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(rejections) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  // The interval touches 0 (or 1) exactly when no (or every) trial rejected.
  const double lo = rejections == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = rejections == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

MCResult estimate_error(const ExperimentSpec& spec) {
  spec.validate();
  return estimate_error(spec, generate(spec.signal));
}

MCResult estimate_error(const ExperimentSpec& spec, const CoefficientTree& signal) {
  spec.validate();
  const auto started = std::chrono::steady_clock::now();
  const TestParams& params = spec.params;
  const int j = params.cutoff();
  if (signal.base_level() != params.J0 || signal.base_size() != params.z0) {
    throw StructuralError("signal layout does not match the test's (J0, z0)");
  }
  if (signal.max_level() < j) {
    throw CoverageError(fmt::format("signal stops at level {} but the test needs j = {}",
                                    signal.max_level(), j));
  }
  // Levels above j never enter the decision, so they are not simulated.
  const CoefficientTree truncated = signal.truncated(j);
  std::vector<double> split_cutoffs;
  if (spec.split) split_cutoffs = split_thresholds(params, spec.calibration);

  const auto rejects = [&](std::size_t trial) {
    const std::uint64_t seed = derive_seed(spec.master_seed, {trial});
    if (spec.split) {
      const auto [first, second] = observe_split(truncated, params.n, seed);
      return run_split_test(first, second, params, spec.calibration, split_cutoffs)
                 .decision == 1;
    }
    return run_test(observe(truncated, params.n, seed), params).decision == 1;
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(spec.trials)));
  std::vector<std::size_t> counts(jobs, 0);
  {
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      const std::size_t begin = spec.trials * w / jobs;
      const std::size_t end = spec.trials * (w + 1) / jobs;
      workers.emplace_back([&, w, begin, end] {
        std::size_t local = 0;
        for (std::size_t i = begin; i < end; ++i) local += rejects(i) ? 1 : 0;
        counts[w] = local;
      });
    }
  }

  MCResult result;
  result.trials = spec.trials;
  for (std::size_t c : counts) result.rejections += c;
  result.rate = static_cast<double>(result.rejections) / static_cast<double>(result.trials);
  std::tie(result.ci_lo, result.ci_hi) = wilson_interval(result.rejections, result.trials);
  result.seed = spec.master_seed;
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

void SweepSpec::validate() const {
  if (n_grid.size() < 2) throw DomainError("a sweep needs at least two grid points");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (!(n_grid[i] > n_grid[i - 1])) {
      throw DomainError("sweep grid must be strictly increasing");
    }
  }
  if (!(n_grid.front() > 1.0) || n_grid.back() / n_grid.front() < 1e3) {
    throw DomainError("sweep grid must start above 1 and span at least three decades");
  }
  if (max_steps < 1 || max_steps > 20) throw DomainError("max_steps must lie in [1, 20]");
  if (!(target_power > 0.0 && target_power < 1.0)) {
    throw DomainError("target power must lie in (0, 1)");
  }
  if (!(bracket_ratio > 0.0 && bracket_ratio < 1.0)) {
    throw DomainError("bracket ratio must lie in (0, 1)");
  }
  if (trials_per_probe < 100) throw DomainError("probes need at least 100 trials");
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line needs >= 2 points");
  const double count = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("fit_line needs distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

namespace {

std::string format_trace(const std::vector<BisectionProbe>& trace) {
  std::string out;
  for (const auto& p : trace) {
    out += fmt::format("\n  rho={:.6g} power={:.4f} ci=[{:.4f}, {:.4f}]", p.rho,
                       p.result.rate, p.result.ci_lo, p.result.ci_hi);
  }
  return out;
}

SweepPoint sweep_point(const SweepSpec& spec, std::size_t index) {
  SweepPoint point;
  TestParams params = spec.params;
  params.n = spec.n_grid[index];
  params.validate();
  point.n = params.n;
  point.j = params.cutoff();
  point.lower_reference = rho_lower(params) / 2.0;
  point.upper_reference = rho_upper(params);

  const TreeShape shape{params.J0, params.z0, point.j};
  const double cap = separation_cap(params.t, params.s, params.B, shape);
  if (!(cap > 0.0)) {
    throw FeasibilityError("no separated alternative exists for this sweep point", cap);
  }

  ExperimentSpec experiment;
  experiment.params = params;
  experiment.trials = spec.trials_per_probe;
  experiment.mode = ErrorMode::power;
  experiment.jobs = spec.jobs;
  // Every probe at this n shares its noise streams and witness direction.
  experiment.master_seed = derive_seed(spec.master_seed, {index, 1});
  const std::uint64_t direction_seed = derive_seed(spec.master_seed, {index, 0});

  const auto probe = [&](double rho) {
    const CoefficientTree signal =
        gen_separated(params.t, params.s, params.B, rho, shape, direction_seed);
    point.trace.push_back({rho, estimate_error(experiment, signal)});
    return point.trace.back().result.rate >= spec.target_power;
  };

  double hi = cap * (1.0 - 1e-12);
  double lo = hi * spec.bracket_ratio;
  if (!probe(hi)) {
    throw ConvergenceError(fmt::format("power at the feasibility cap rho = {:.6g} stays "
                                       "below {} at n = {:.6g}; bracket trace:{}",
                                       hi, spec.target_power, params.n,
                                       format_trace(point.trace)));
  }
  if (probe(lo)) {
    throw ConvergenceError(fmt::format("power at rho = {:.6g} already reaches {} at n = "
                                       "{:.6g}; bracket trace:{}",
                                       lo, spec.target_power, params.n,
                                       format_trace(point.trace)));
  }
  for (int step = 0; step < spec.max_steps; ++step) {
    const double mid = std::sqrt(lo * hi);
    if (probe(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  point.boundary = hi;

  double below = 0.0;
  double above = INFINITY;
  for (const auto& p : point.trace) {
    if (p.result.ci_hi < spec.target_power) below = std::max(below, p.rho);
    if (p.result.ci_lo > spec.target_power) above = std::min(above, p.rho);
  }
  if (below > above) {
    throw ConvergenceError(fmt::format("power is non-monotone in rho beyond Monte Carlo "
                                       "noise at n = {:.6g}; trace:{}",
                                       params.n, format_trace(point.trace)));
  }
  point.ci_lo = below;
  point.ci_hi = above;
  return point;
}

}  // namespace

SweepResult rate_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.expected_slope = -rate_exponent(spec.params.t);
  std::vector<double> log_n, log_b;
  for (std::size_t i = 0; i < spec.n_grid.size(); ++i) {
    result.points.push_back(sweep_point(spec, i));
    log_n.push_back(std::log(result.points.back().n));
    log_b.push_back(std::log(result.points.back().boundary));
  }
  std::tie(result.slope, result.intercept) = fit_line(log_n, log_b);
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    result.residuals.push_back(log_b[i] - (result.intercept + result.slope * log_n[i]));
  }
  return result;
}

}  // namespace smoothtest
