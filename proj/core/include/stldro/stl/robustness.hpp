#pragma once

#include <span>
#include <vector>

#include "stldro/stl/formula.hpp"

namespace stldro::stl {

class HorizonError : public Error {
 public:
  using Error::Error;
};

class NonPnfError : public Error {
 public:
  using Error::Error;
};

struct RobustnessOptions {
  /// Finite stand-in for rho(true) = +infinity, so smoothing stays finite.
  double top = 1e9;
};

/// Exact quantitative semantics at time k. Requires k + horizon(f) <= N.
double robustness(const StlFormula& f, const Trajectory& xi, int k,
                  const RobustnessOptions& opts = {});

/// Boolean semantics at time k (test oracle for soundness).
bool boolean_sat(const StlFormula& f, const Trajectory& xi, int k);

/// Smooth under-approximations of min and max:
///   smooth_min(a) = -(1/c) log(sum_i exp(-c a_i))
///   smooth_max(a) = sum_i a_i exp(c a_i) / sum_i exp(c a_i)
/// Arguments are shifted by their extremum before exponentiation; both
/// formulas are exactly shift-invariant, so this only prevents overflow.
double smooth_min(std::span<const double> values, double sharpness);
double smooth_max(std::span<const double> values, double sharpness);

/// Robustness with min/max replaced by their smooth under-approximations.
/// Requires a positive-normal-form formula and sharpness > 0.
double smooth_robustness(const StlFormula& f, const Trajectory& xi, int k,
                         double sharpness, const RobustnessOptions& opts = {});

struct SmoothGradient {
  double value = 0.0;
  /// d(value)/d(z_j) for j = 0..N.
  std::vector<Eigen::VectorXd> state_gradients;
};

/// Smooth robustness together with its gradient w.r.t. every state.
SmoothGradient smooth_robustness_gradient(const StlFormula& f, const Trajectory& xi,
                                          int k, double sharpness,
                                          const RobustnessOptions& opts = {});

}  // namespace stldro::stl
