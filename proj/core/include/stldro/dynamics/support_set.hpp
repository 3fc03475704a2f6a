#pragma once

#include <vector>

#include <Eigen/Core>

#include "stldro/util/errors.hpp"
#include "stldro/util/rng.hpp"

namespace stldro::dyn {

/// Compact support set, either an axis-aligned box or a 2-norm ball.
/// Restricting to these two shapes keeps projections closed-form, which the
/// inner robust optimizations rely on.
class SupportSet {
 public:
  enum class Kind { Box, Ball };

  /// Empty zero-dimensional box; assign a real set before use.
  SupportSet() = default;

  static SupportSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static SupportSet ball(Eigen::VectorXd center, double radius);
  /// The degenerate set {0} in `dim` dimensions.
  static SupportSet point(int dim);

  Kind kind() const { return kind_; }
  int dim() const;

  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;

  /// Geometric center (box midpoint or ball center).
  Eigen::VectorXd center() const;

  /// Deterministic extreme points used as multistart candidates: per-axis
  /// extremes for boxes, +/- radius along each axis for balls.
  std::vector<Eigen::VectorXd> extreme_points() const;

  /// Random point on the boundary (box corner / sphere point).
  Eigen::VectorXd sample_boundary(util::SplitMix64& rng) const;

  /// Random interior point.
  Eigen::VectorXd sample_interior(util::SplitMix64& rng) const;

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  double radius() const { return radius_; }

 private:
  Kind kind_ = Kind::Box;
  Eigen::VectorXd lower_, upper_;   // box
  Eigen::VectorXd center_;          // ball
  double radius_ = 0.0;
};

}  // namespace stldro::dyn
