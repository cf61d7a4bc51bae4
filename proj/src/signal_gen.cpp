#include "smoothtest/signal_gen.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "smoothtest/besov.hpp"
#include "smoothtest/errors.hpp"
#include "smoothtest/rng.hpp"
#include "smoothtest/smooth_test.hpp"

namespace smoothtest {

namespace {

// Uniform direction on the unit sphere of R^size, scaled to `norm`.
std::vector<double> random_direction(std::size_t size, double norm, NormalStream& rng) {
  std::vector<double> v(size);
  double sq = 0.0;
  do {
    sq = 0.0;
    for (double& x : v) {
      x = rng();
      sq += x * x;
    }
  } while (sq == 0.0);
  const double scale = norm / std::sqrt(sq);
  for (double& x : v) x *= scale;
  return v;
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(fmt::format("{} must be positive and finite, got {}", name, value));
  }
}

}  // namespace

std::string to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::null_worst_case: return "null_worst_case";
    case SignalKind::null_random: return "null_random";
    case SignalKind::rademacher_alt: return "rademacher_alt";
    case SignalKind::separated_alt: return "separated_alt";
    case SignalKind::explicit_tree: return "explicit";
  }
  return "unknown";
}

SignalKind signal_kind_from_string(const std::string& name) {
  if (name == "null_worst_case") return SignalKind::null_worst_case;
  if (name == "null_random") return SignalKind::null_random;
  if (name == "rademacher_alt") return SignalKind::rademacher_alt;
  if (name == "separated_alt") return SignalKind::separated_alt;
  if (name == "explicit") return SignalKind::explicit_tree;
  throw DomainError("unknown signal kind '" + name + "'");
}

CoefficientTree gen_null(double s, double radius, const TreeShape& shape, double fill,
                         std::uint64_t seed) {
  require_positive(s, "s");
  require_positive(radius, "B");
  if (!(fill > 0.0 && fill <= 1.0)) {
    throw DomainError(fmt::format("fill must lie in (0, 1], got {}", fill));
  }
  CoefficientTree tree(shape);
  NormalStream rng(seed);
  const BesovBall ball{s, radius};
  for (int l = shape.base_level; l <= shape.max_level; ++l) {
    std::vector<double> level = random_direction(shape.level_size(l), fill * ball.level_bound(l), rng);
    tree.set_level(l, level);
    // Rounding can leave a saturated level an ulp outside the ball.
    while (level_norm(tree, l) > ball.level_bound(l) ||
           std::exp2(static_cast<double>(l) * s) * level_norm(tree, l) > radius) {
      for (double& x : level) x *= 1.0 - 0x1p-52;
      tree.set_level(l, level);
    }
  }
  return tree;
}

CoefficientTree gen_alternative(double t, double radius, double upsilon, double n,
                                const TreeShape& shape, std::uint64_t seed) {
  require_positive(t, "t");
  require_positive(radius, "B");
  if (!(upsilon > 0.0 && upsilon <= std::min(1.0, radius))) {
    throw DomainError(fmt::format("upsilon must lie in (0, min(1, B)] = (0, {}], got {}",
                                  std::min(1.0, radius), upsilon));
  }
  shape.validate();
  const int j = compute_j(n, t, shape.base_level);
  TreeShape full = shape;
  full.max_level = std::max(shape.max_level, j);
  CoefficientTree tree(full);
  const double a = 1.0 / (std::sqrt(n) * std::exp2(static_cast<double>(j) / 4.0));
  NormalStream rng(seed);
  std::vector<double> level(full.level_size(j));
  for (double& x : level) x = upsilon * a * rng.sign();
  tree.set_level(j, level);
  return tree;
}

double separation_cap(double t, double s, double radius, const TreeShape& shape) {
  shape.validate();
  double cap = -INFINITY;
  for (int l = shape.base_level; l <= shape.max_level; ++l) {
    const double lt = static_cast<double>(l);
    cap = std::max(cap, radius * (std::exp2(-lt * t) - std::exp2(-lt * s)));
  }
  return cap;
}

int separation_level(double t, double s, double radius, double rho, const TreeShape& shape) {
  for (int l = shape.base_level; l <= shape.max_level; ++l) {
    const double lt = static_cast<double>(l);
    if (radius * std::exp2(-lt * t) >= rho + radius * std::exp2(-lt * s)) return l;
  }
  return -1;
}

CoefficientTree gen_separated(double t, double s, double radius, double rho,
                              const TreeShape& shape, std::uint64_t seed) {
  require_positive(t, "t");
  require_positive(s, "s");
  require_positive(radius, "B");
  require_positive(rho, "rho");
  shape.validate();
  const int l = separation_level(t, s, radius, rho, shape);
  if (l < 0) {
    const double cap = separation_cap(t, s, radius, shape);
    throw FeasibilityError(
        fmt::format("no level in [{}, {}] separates by rho = {:.17g}: the largest "
                    "achievable single-level separation is {:.17g}",
                    shape.base_level, shape.max_level, rho, cap),
        cap);
  }
  CoefficientTree tree(shape);
  NormalStream rng(seed);
  const double norm = rho + radius * std::exp2(-static_cast<double>(l) * s);
  tree.set_level(l, random_direction(shape.level_size(l), norm, rng));

  const double dist = distance_to_ball(tree, BesovBall{s, radius});
  const double t_norm = besov_norm(tree, t);
  if (dist < rho * (1.0 - 1e-9) || t_norm > radius * (1.0 + 1e-9)) {
    throw Error(fmt::format("separated witness failed its self-check (distance {}, "
                            "t-norm {})",
                            dist, t_norm));
  }
  return tree;
}

double min_n_for_separation(const TestParams& params, int max_level) {
  const double cap =
      separation_cap(params.t, params.s, params.B, TreeShape{params.J0, params.z0, max_level});
  if (!(cap > 0.0)) return INFINITY;
  return std::pow(upper_constant(params) / cap, 1.0 / rate_exponent(params.t));
}

CoefficientTree generate(const SignalSpec& spec) {
  switch (spec.kind) {
    case SignalKind::null_worst_case:
      return gen_null(spec.s, spec.B, spec.shape, 1.0, spec.seed);
    case SignalKind::null_random:
      return gen_null(spec.s, spec.B, spec.shape, spec.fill, spec.seed);
    case SignalKind::rademacher_alt:
      return gen_alternative(spec.t, spec.B, spec.upsilon, spec.n, spec.shape, spec.seed);
    case SignalKind::separated_alt:
      return gen_separated(spec.t, spec.s, spec.B, spec.rho, spec.shape, spec.seed);
    case SignalKind::explicit_tree:
      if (!spec.tree) throw DomainError("explicit signal spec carries no tree");
      spec.tree->validate();
      return *spec.tree;
  }
  throw DomainError("unhandled signal kind");
}

}  // namespace smoothtest
