#include "smoothtest/coefficient_tree.hpp"

#include <cmath>
#include <string>

#include "smoothtest/errors.hpp"

namespace smoothtest {

namespace {

constexpr int kMaxSupportedLevel = 30;

void require_finite(double value, int level, std::size_t k) {
  if (!std::isfinite(value)) {
    throw StructuralError("non-finite coefficient at level " +
                          std::to_string(level) + ", index " +
                          std::to_string(k));
  }
}

}  // namespace

std::size_t TreeShape::level_size(int level) const {
  if (level < base_level || level > max_level) {
    throw RangeError("level " + std::to_string(level) + " outside [" +
                     std::to_string(base_level) + ", " +
                     std::to_string(max_level) + "]");
  }
  if (level == base_level) return static_cast<std::size_t>(base_size);
  return std::size_t{1} << level;
}

std::size_t TreeShape::total_size() const {
  std::size_t total = static_cast<std::size_t>(base_size);
  for (int l = base_level + 1; l <= max_level; ++l) total += std::size_t{1} << l;
  return total;
}

void TreeShape::validate() const {
  if (base_level < 0) throw StructuralError("base level J0 must be >= 0");
  if (base_size < 1) throw StructuralError("base size z0 must be >= 1");
  if (max_level < base_level) {
    throw StructuralError("max level " + std::to_string(max_level) +
                          " below base level " + std::to_string(base_level));
  }
  if (max_level > kMaxSupportedLevel) {
    throw StructuralError("max level " + std::to_string(max_level) +
                          " exceeds supported depth " +
                          std::to_string(kMaxSupportedLevel));
  }
}

CoefficientTree::CoefficientTree(const TreeShape& shape) : shape_(shape) {
  shape_.validate();
  values_.assign(shape_.total_size(), 0.0);
}

CoefficientTree::CoefficientTree(int base_level, int base_size,
                                 const std::vector<std::vector<double>>& levels) {
  if (levels.empty()) throw StructuralError("tree must hold at least one level");
  shape_ = TreeShape{base_level, base_size,
                     base_level + static_cast<int>(levels.size()) - 1};
  shape_.validate();
  values_.reserve(shape_.total_size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const int l = base_level + static_cast<int>(i);
    if (levels[i].size() != shape_.level_size(l)) {
      throw StructuralError("level " + std::to_string(l) + " has " +
                            std::to_string(levels[i].size()) +
                            " coefficients, expected " +
                            std::to_string(shape_.level_size(l)));
    }
    for (std::size_t k = 0; k < levels[i].size(); ++k) {
      require_finite(levels[i][k], l, k);
      values_.push_back(levels[i][k]);
    }
  }
}

CoefficientTree::CoefficientTree(const TreeShape& shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  shape_.validate();
  if (values_.size() != shape_.total_size()) {
    throw StructuralError("flat value count " + std::to_string(values_.size()) +
                          " does not match shape size " +
                          std::to_string(shape_.total_size()));
  }
  validate();
}

std::size_t CoefficientTree::level_size(int level) const {
  return shape_.level_size(level);
}

std::size_t CoefficientTree::offset(int level) const {
  if (level == shape_.base_level) return 0;
  // Levels J0+1..level-1 contribute 2^(J0+1) + ... + 2^(level-1).
  const std::size_t finer = (std::size_t{1} << level) -
                            (std::size_t{1} << (shape_.base_level + 1));
  return static_cast<std::size_t>(shape_.base_size) + finer;
}

std::span<const double> CoefficientTree::level(int level) const {
  const std::size_t size = shape_.level_size(level);
  return std::span<const double>(values_).subspan(offset(level), size);
}

double CoefficientTree::at(int level, std::size_t k) const {
  const auto coeffs = this->level(level);
  if (k >= coeffs.size()) {
    throw RangeError("index " + std::to_string(k) + " outside level " +
                     std::to_string(level));
  }
  return coeffs[k];
}

void CoefficientTree::set(int level, std::size_t k, double value) {
  const std::size_t size = shape_.level_size(level);
  if (k >= size) {
    throw RangeError("index " + std::to_string(k) + " outside level " +
                     std::to_string(level));
  }
  require_finite(value, level, k);
  values_[offset(level) + k] = value;
}

void CoefficientTree::set_level(int level, std::span<const double> coefficients) {
  const std::size_t size = shape_.level_size(level);
  if (coefficients.size() != size) {
    throw StructuralError("level " + std::to_string(level) + " expects " +
                          std::to_string(size) + " coefficients, got " +
                          std::to_string(coefficients.size()));
  }
  const std::size_t base = offset(level);
  for (std::size_t k = 0; k < size; ++k) {
    require_finite(coefficients[k], level, k);
    values_[base + k] = coefficients[k];
  }
}

CoefficientTree CoefficientTree::truncated(int level) const {
  if (level < shape_.base_level || level > shape_.max_level) {
    throw RangeError("truncation level " + std::to_string(level) +
                     " outside tree");
  }
  TreeShape shape = shape_;
  shape.max_level = level;
  std::vector<double> values(values_.begin(),
                             values_.begin() + static_cast<std::ptrdiff_t>(shape.total_size()));
  return CoefficientTree(shape, std::move(values));
}

CoefficientTree CoefficientTree::scaled(double factor) const {
  std::vector<double> values(values_);
  for (double& v : values) v *= factor;
  return CoefficientTree(shape_, std::move(values));
}

void CoefficientTree::validate() const {
  shape_.validate();
  if (values_.size() != shape_.total_size()) {
    throw StructuralError("coefficient storage does not match shape");
  }
  for (int l = shape_.base_level; l <= shape_.max_level; ++l) {
    const auto coeffs = level(l);
    for (std::size_t k = 0; k < coeffs.size(); ++k) require_finite(coeffs[k], l, k);
  }
}

}  // namespace smoothtest
