#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smoothtest {

/// Level layout of a wavelet system: the base level J0 holds z0 coefficients,
/// every finer level l > J0 holds 2^l.
struct TreeShape {
  int base_level = 0;
  int base_size = 1;
  int max_level = 0;

  std::size_t level_size(int level) const;
  std::size_t total_size() const;
  void validate() const;

  friend bool operator==(const TreeShape&, const TreeShape&) = default;
};

/// Multi-level array of real wavelet coefficients a_{l,k}, stored flat in
/// level-major order. Every level from J0 to max_level is present and every
/// value is finite; the constructors and setters enforce this.
class CoefficientTree {
 public:
  /// All-zero tree with the given shape.
  explicit CoefficientTree(const TreeShape& shape);

  /// Levels listed from J0 upward; sizes are checked against the shape rule.
  CoefficientTree(int base_level, int base_size,
                  const std::vector<std::vector<double>>& levels);

  /// Flat constructor; `values` must have shape.total_size() entries.
  CoefficientTree(const TreeShape& shape, std::vector<double> values);

  const TreeShape& shape() const noexcept { return shape_; }
  int base_level() const noexcept { return shape_.base_level; }
  int base_size() const noexcept { return shape_.base_size; }
  int max_level() const noexcept { return shape_.max_level; }
  bool has_level(int level) const noexcept {
    return level >= shape_.base_level && level <= shape_.max_level;
  }
  std::size_t level_size(int level) const;

  std::span<const double> level(int level) const;
  std::span<const double> values() const noexcept { return values_; }

  double at(int level, std::size_t k) const;
  void set(int level, std::size_t k, double value);
  /// Replaces a whole level; size and finiteness are checked.
  void set_level(int level, std::span<const double> coefficients);

  /// Copy keeping only levels base_level..level.
  CoefficientTree truncated(int level) const;
  /// Copy with every coefficient multiplied by `factor`.
  CoefficientTree scaled(double factor) const;

  /// Re-checks the invariants; throws StructuralError on violation.
  void validate() const;

  friend bool operator==(const CoefficientTree&, const CoefficientTree&) = default;

 private:
  std::size_t offset(int level) const;

  TreeShape shape_;
  std::vector<double> values_;
};

}  // namespace smoothtest
