#pragma once

#include <string>
#include <vector>

#include "smoothtest/coefficient_tree.hpp"
#include "smoothtest/smooth_test.hpp"

namespace smoothtest {

enum class SampleKind { regression, density };

/// Sampled data on [0, 1]. Regression sets pair each design point with a
/// response; density sets carry points only.
struct SampleSet {
  SampleKind kind = SampleKind::regression;
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const noexcept { return x.size(); }
  /// Checks x in [0,1], matching sizes and, for regression, the equispaced
  /// midpoint design x_i = (i - 1/2) / n to 1e-9.
  void validate() const;
};

/// Haar system on [0, 1] laid out as a coefficient tree: level 0 holds the
/// scaling function and the mother wavelet (J0 = 0, z0 = 2); level l >= 1
/// holds psi_{l,k}(x) = 2^{l/2} psi(2^l x - k), k < 2^l.
TreeShape haar_shape(int max_level);

/// Value at x of the basis function stored at (level, k) in the Haar layout.
double haar_basis(int level, std::size_t k, double x);

/// Evaluates sum a_{l,k} psi_{l,k}(x) at every x.
std::vector<double> haar_synthesize(const CoefficientTree& tree, const std::vector<double>& x);

struct CoefficientEstimate {
  CoefficientTree tree;
  double effective_n = 0.0;
};

/// a_hat_{l,k} = (1/n) sum_i Y_i psi_{l,k}(X_i) for regression and
/// (1/n) sum_i psi_{l,k}(X_i) for density samples, up to level max_level.
/// Needs 2^{max_level + 1} <= n_samples so the finest wavelets are resolved.
CoefficientEstimate estimate_coefficients(const SampleSet& samples, int max_level);

enum class IngestMode { plugin, split };

/// Estimates coefficients to the cutoff level and runs the plug-in or
/// split-sample test. J0, z0 and n in `params` are replaced by the Haar
/// layout (0, 2) and the effective sample size. Requires s, t < 1.
TestReport test_from_samples(const SampleSet& samples, const TestParams& params,
                             IngestMode mode,
                             const SplitCalibration& calibration = {});

/// Reads a CSV with a header row naming columns x and, optionally, y.
SampleSet read_samples_csv(const std::string& path, SampleKind kind);

}  // namespace smoothtest
