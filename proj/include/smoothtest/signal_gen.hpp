#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "smoothtest/coefficient_tree.hpp"

namespace smoothtest {

struct TestParams;

enum class SignalKind {
  null_worst_case,
  null_random,
  rademacher_alt,
  separated_alt,
  explicit_tree,
};

std::string to_string(SignalKind kind);
SignalKind signal_kind_from_string(const std::string& name);

/// Declarative description of a signal. Only the fields the kind uses are
/// read: null kinds use (s, B, fill, shape); rademacher_alt uses
/// (t, B, upsilon, n, shape); separated_alt uses (t, s, B, rho, shape);
/// explicit_tree uses `tree`.
struct SignalSpec {
  SignalKind kind = SignalKind::null_worst_case;
  double s = 2.0;
  double t = 1.0;
  double B = 1.0;
  double fill = 1.0;
  double upsilon = 0.5;
  double n = 1e6;
  double rho = 0.0;
  TreeShape shape{0, 1, 0};
  std::uint64_t seed = 0;
  std::optional<CoefficientTree> tree;
};

/// Member of the (s,2,inf) ball of radius B: level l gets norm
/// fill * B * 2^{-l s} in a uniformly random direction. fill = 1 saturates
/// every level constraint.
CoefficientTree gen_null(double s, double radius, const TreeShape& shape, double fill,
                         std::uint64_t seed);

/// Rademacher alternative: level j = compute_j(n, t, J0) carries
/// upsilon * a * alpha_k with a = 1 / (sqrt(n) 2^{j/4}) and random signs
/// alpha_k. The tree extends to max(shape.max_level, j).
CoefficientTree gen_alternative(double t, double radius, double upsilon, double n,
                                const TreeShape& shape, std::uint64_t seed);

/// Largest separation a single-level witness can reach inside the t-ball:
/// max over levels of B (2^{-l t} - 2^{-l s}).
double separation_cap(double t, double s, double radius, const TreeShape& shape);

/// Lowest level l in the shape with B 2^{-l t} >= rho + B 2^{-l s}, or -1.
int separation_level(double t, double s, double radius, double rho, const TreeShape& shape);

/// Member of the t-ball at distance >= rho from the s-ball: the smallest
/// feasible level gets norm rho + B 2^{-l s}. Throws FeasibilityError naming
/// the cap when no level works.
CoefficientTree gen_separated(double t, double s, double radius, double rho,
                              const TreeShape& shape, std::uint64_t seed);

/// Smallest n with rho_upper(n) <= separation_cap over J0..max_level, i.e. the
/// first n at which the alternative set at separation rho_upper(n) is non-empty for
/// single-level witnesses.
double min_n_for_separation(const TestParams& params, int max_level);

CoefficientTree generate(const SignalSpec& spec);

}  // namespace smoothtest
