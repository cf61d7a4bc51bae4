#pragma once

#include "smoothtest/coefficient_tree.hpp"

namespace smoothtest {

/// The Besov (r,2,inf) ball of radius B: every level satisfies
/// 2^{lr} * ||a_l|| <= B.
struct BesovBall {
  double r = 1.0;
  double radius = 1.0;

  void validate() const;
  /// Largest admissible level norm, B * 2^{-l r}.
  double level_bound(int level) const;
};

/// Euclidean norm of the coefficients at one level.
double level_norm(const CoefficientTree& tree, int level);

/// sup over stored levels of 2^{l r} ||a_l||.
double besov_norm(const CoefficientTree& tree, double r);

double l2_norm(const CoefficientTree& tree);

/// Zeroes every level above `level`.
CoefficientTree project_V(const CoefficientTree& tree, int level);

/// Keeps only `level`.
CoefficientTree project_W(const CoefficientTree& tree, int level);

/// Exact L2 distance from the tree to the ball. The ball constraint acts level
/// by level, so the nearest point is the per-level radial shrink and
/// dist^2 = sum_l max(0, ||a_l|| - B 2^{-l r})^2.
double distance_to_ball(const CoefficientTree& tree, const BesovBall& ball);

/// Upper bound on ||f - Pi_{V_j} f||_2 for f in the (t,2,inf) ball of radius B:
/// B 2^{-j t} / sqrt(1 - 2^{-2t}).
double tail_bound(double t, double radius, int j);

}  // namespace smoothtest
