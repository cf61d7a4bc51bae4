#include "smoothtest/ingest.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "smoothtest/errors.hpp"

namespace smoothtest {

namespace {

constexpr double kDesignTolerance = 1e-9;

struct HaarCell {
  std::size_t k;
  double sign;
};

// Dyadic cell of x at `level` and the sign of the mother wavelet there.
// The right end point x = 1 belongs to the last cell.
HaarCell locate(int level, double x) {
  const double cells = std::exp2(static_cast<double>(level));
  const double scaled = x * cells;
  const auto last = static_cast<std::size_t>(cells) - 1;
  const auto k = std::min(static_cast<std::size_t>(std::floor(scaled)), last);
  const double u = scaled - static_cast<double>(k);
  return {k, u < 0.5 ? 1.0 : -1.0};
}

void check_resolution(std::size_t count, int max_level) {
  if (max_level < 0) throw ResolutionError("max level must be >= 0");
  if (max_level > 30 ||
      (std::size_t{1} << (max_level + 1)) > count) {
    throw ResolutionError(fmt::format("{} samples cannot resolve Haar level {}: need at "
                                      "least 2^{} = {}",
                                      count, max_level, max_level + 1,
                                      max_level > 30 ? 0.0 : std::exp2(max_level + 1)));
  }
}

CoefficientTree estimate_raw(SampleKind kind, const std::vector<double>& x,
                             const std::vector<double>& y, int max_level) {
  const TreeShape shape = haar_shape(max_level);
  std::vector<double> sums(shape.total_size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double weight = kind == SampleKind::regression ? y[i] : 1.0;
    sums[0] += weight;
    sums[1] += weight * locate(0, x[i]).sign;
    std::size_t offset = 2;
    for (int l = 1; l <= max_level; ++l) {
      const HaarCell cell = locate(l, x[i]);
      sums[offset + cell.k] += weight * cell.sign * std::exp2(static_cast<double>(l) / 2.0);
      offset += std::size_t{1} << l;
    }
  }
  const double count = static_cast<double>(x.size());
  for (double& v : sums) v /= count;
  return CoefficientTree(shape, std::move(sums));
}

}  // namespace

void SampleSet::validate() const {
  if (x.empty()) throw DesignError("sample set is empty");
  if (kind == SampleKind::regression && y.size() != x.size()) {
    throw DesignError("regression samples need one response per design point");
  }
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DesignError(fmt::format("sample point {} lies outside [0, 1]", v));
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw DesignError("non-finite response value");
  }
  if (kind == SampleKind::regression) {
    const double count = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double expected = (static_cast<double>(i) + 0.5) / count;
      if (std::fabs(x[i] - expected) > kDesignTolerance) {
        throw DesignError(fmt::format(
            "regression design must be the equispaced grid (i - 1/2)/n; point {} is {} "
            "instead of {} (random designs are not supported)",
            i + 1, x[i], expected));
      }
    }
  }
}

TreeShape haar_shape(int max_level) { return TreeShape{0, 2, max_level}; }

double haar_basis(int level, std::size_t k, double x) {
  if (!(x >= 0.0 && x <= 1.0)) return 0.0;
  if (level == 0) {
    if (k == 0) return 1.0;
    if (k == 1) return locate(0, x).sign;
    throw RangeError("Haar level 0 holds two functions");
  }
  if (level < 0 || level > 30 || k >= (std::size_t{1} << level)) {
    throw RangeError(fmt::format("no Haar function at ({}, {})", level, k));
  }
  const HaarCell cell = locate(level, x);
  if (cell.k != k) return 0.0;
  return cell.sign * std::exp2(static_cast<double>(level) / 2.0);
}

std::vector<double> haar_synthesize(const CoefficientTree& tree, const std::vector<double>& x) {
  if (tree.base_level() != 0 || tree.base_size() != 2) {
    throw StructuralError("Haar synthesis needs the (J0 = 0, z0 = 2) layout");
  }
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] <= 1.0)) continue;
    double value = tree.at(0, 0) + tree.at(0, 1) * locate(0, x[i]).sign;
    for (int l = 1; l <= tree.max_level(); ++l) {
      const HaarCell cell = locate(l, x[i]);
      value += tree.at(l, cell.k) * cell.sign * std::exp2(static_cast<double>(l) / 2.0);
    }
    out[i] = value;
  }
  return out;
}

CoefficientEstimate estimate_coefficients(const SampleSet& samples, int max_level) {
  samples.validate();
  check_resolution(samples.size(), max_level);
  return {estimate_raw(samples.kind, samples.x, samples.y, max_level),
          static_cast<double>(samples.size())};
}

TestReport test_from_samples(const SampleSet& samples, const TestParams& params,
                             IngestMode mode, const SplitCalibration& calibration) {
  samples.validate();
  if (!(params.s < 1.0 && params.t < 1.0)) {
    throw DomainError("the Haar basis only supports smoothness below 1 (s, t < 1)");
  }
  TestParams haar = params;
  haar.J0 = 0;
  haar.z0 = 2;
  haar.n = static_cast<double>(samples.size());
  haar.validate();
  const int j = haar.cutoff();

  TestReport report;
  if (mode == IngestMode::plugin) {
    check_resolution(samples.size(), j);
    const CoefficientTree tree = estimate_raw(samples.kind, samples.x, samples.y, j);
    report = run_test(Observation{tree, haar.n, 0, 0}, haar);
  } else {
    std::vector<double> x1, y1, x2, y2;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      auto& xs = i % 2 == 0 ? x1 : x2;
      xs.push_back(samples.x[i]);
      if (samples.kind == SampleKind::regression) {
        (i % 2 == 0 ? y1 : y2).push_back(samples.y[i]);
      }
    }
    check_resolution(x2.size(), j);
    const Observation first{estimate_raw(samples.kind, x1, y1, j),
                            static_cast<double>(x1.size()), 0, 1};
    const Observation second{estimate_raw(samples.kind, x2, y2, j),
                             static_cast<double>(x2.size()), 0, 2};
    report = run_split_test(first, second, haar, calibration);
  }
  report.approximate_calibration = true;
  return report;
}

SampleSet read_samples_csv(const std::string& path, SampleKind kind) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open sample file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DesignError("sample file '" + path + "' is empty");

  int x_col = -1, y_col = -1, columns = 0;
  {
    std::stringstream header(line);
    std::string name;
    while (std::getline(header, name, ',')) {
      name.erase(0, name.find_first_not_of(" \t\r"));
      name.erase(name.find_last_not_of(" \t\r") + 1);
      if (name == "x") x_col = columns;
      if (name == "y") y_col = columns;
      ++columns;
    }
  }
  if (x_col < 0) throw DesignError("sample file header has no 'x' column");
  if (kind == SampleKind::regression && y_col < 0) {
    throw DesignError("regression sample file header has no 'y' column");
  }

  SampleSet samples;
  samples.kind = kind;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream row(line);
    std::string cell;
    int col = 0;
    double x = NAN, y = NAN;
    while (std::getline(row, cell, ',')) {
      try {
        if (col == x_col) x = std::stod(cell);
        if (col == y_col) y = std::stod(cell);
      } catch (const std::exception&) {
        throw DesignError(fmt::format("{}:{}: column {} is not a number", path, line_no,
                                      col + 1));
      }
      ++col;
    }
    if (col != columns) {
      throw DesignError(fmt::format("{}:{}: expected {} columns, found {}", path, line_no,
                                    columns, col));
    }
    samples.x.push_back(x);
    if (kind == SampleKind::regression) samples.y.push_back(y);
  }
  return samples;
}

}  // namespace smoothtest
