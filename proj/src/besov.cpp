#include "smoothtest/besov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smoothtest/detail/summation.hpp"
#include "smoothtest/errors.hpp"

namespace smoothtest {

void BesovBall::validate() const {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("ball smoothness must be positive, got " + std::to_string(r));
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("ball radius must be positive, got " + std::to_string(radius));
  }
}

double BesovBall::level_bound(int level) const {
  return radius * std::exp2(-static_cast<double>(level) * r);
}

double level_norm(const CoefficientTree& tree, int level) {
  detail::CompensatedSum sum;
  for (double a : tree.level(level)) sum.add(a * a);
  return std::sqrt(sum.value());
}

double besov_norm(const CoefficientTree& tree, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw DomainError("smoothness exponent must be >= 0");
  }
  tree.validate();
  double norm = 0.0;
  for (int l = tree.base_level(); l <= tree.max_level(); ++l) {
    norm = std::max(norm, std::exp2(static_cast<double>(l) * r) * level_norm(tree, l));
  }
  return norm;
}

double l2_norm(const CoefficientTree& tree) {
  tree.validate();
  detail::CompensatedSum sum;
  for (double a : tree.values()) sum.add(a * a);
  return std::sqrt(sum.value());
}

CoefficientTree project_V(const CoefficientTree& tree, int level) {
  if (!tree.has_level(level)) {
    throw RangeError("projection level " + std::to_string(level) +
                     " outside [" + std::to_string(tree.base_level()) + ", " +
                     std::to_string(tree.max_level()) + "]");
  }
  CoefficientTree out(tree.shape());
  for (int l = tree.base_level(); l <= level; ++l) out.set_level(l, tree.level(l));
  return out;
}

CoefficientTree project_W(const CoefficientTree& tree, int level) {
  if (!tree.has_level(level)) {
    throw RangeError("projection level " + std::to_string(level) +
                     " outside [" + std::to_string(tree.base_level()) + ", " +
                     std::to_string(tree.max_level()) + "]");
  }
  CoefficientTree out(tree.shape());
  out.set_level(level, tree.level(level));
  return out;
}

double distance_to_ball(const CoefficientTree& tree, const BesovBall& ball) {
  ball.validate();
  tree.validate();
  detail::CompensatedSum sum;
  for (int l = tree.base_level(); l <= tree.max_level(); ++l) {
    const double excess = std::max(0.0, level_norm(tree, l) - ball.level_bound(l));
    sum.add(excess * excess);
  }
  return std::sqrt(sum.value());
}

double tail_bound(double t, double radius, int j) {
  if (!(t > 0.0)) throw DomainError("tail bound needs t > 0");
  return radius * std::exp2(-static_cast<double>(j) * t) /
         std::sqrt(-std::expm1(-2.0 * t * std::log(2.0)));
}

}  // namespace smoothtest
