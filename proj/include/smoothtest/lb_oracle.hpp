#pragma once

#include <cstddef>
#include <cstdint>

namespace smoothtest {

/// Two-point-mixture lower-bound problem: f = 0 against the uniform mixture of
/// sign patterns upsilon * a * alpha at level j, a = 1 / (sqrt(n) 2^{j/4}).
struct LowerBoundInstance {
  double upsilon = 0.0;
  double n = 1.0;
  int j = 0;

  /// Instance whose level comes from compute_j(n, t).
  static LowerBoundInstance for_rate(double upsilon, double n, double t);
  /// Instance at an explicitly chosen level.
  static LowerBoundInstance at_level(double upsilon, int j, double n = 1e6);

  double magnitude() const;  ///< a
  std::size_t width() const;  ///< 2^j
  /// n upsilon^2 a^2, which equals upsilon^2 2^{-j/2}.
  double coupling() const;
  void validate() const;
};

/// E_0 (Z - 1)^2 = cosh(upsilon^2 2^{-j/2})^{2^j} - 1, evaluated without
/// cancellation.
double chi2_closed_form(const LowerBoundInstance& inst);

/// Same quantity by exhaustive enumeration of all sign-pattern pairs
/// (alpha, alpha') in I x I. Throws CostError when 2^j > 12.
double chi2_enumeration(const LowerBoundInstance& inst);

struct Chi2Estimate {
  double estimate = 0.0;        ///< mean of (Z - 1)^2
  double standard_error = 0.0;
  double abs_estimate = 0.0;    ///< mean of |Z - 1|
  double abs_standard_error = 0.0;
  std::size_t trials = 0;
};

/// Simulates data under f = 0 and averages (Z - 1)^2, with log Z accumulated
/// through log-cosh.
Chi2Estimate chi2_monte_carlo(const LowerBoundInstance& inst, std::size_t trials,
                              std::uint64_t seed);

/// Lower bound 1 - 2 upsilon^4 on type-I + worst-case type-II error of any test.
double min_error_bound(double upsilon);

/// Amplitude at which min_error_bound equals alpha: ((1 - alpha)/2)^{1/4}.
double upsilon_for_level(double alpha);

}  // namespace smoothtest
