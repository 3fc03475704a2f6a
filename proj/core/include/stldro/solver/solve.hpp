#pragma once

#include "stldro/dro/inner.hpp"
#include "stldro/solver/problem.hpp"

namespace stldro::solver {

/// Homotopy over the smoothing sharpness: each stage is solved to tolerance
/// and warm-starts the next; feasibility is certified with exact robustness
/// after the last stage.
std::vector<double> smoothing_schedule(const SolverConfig& cfg);

/// Gradient of the inner infimum w.r.t. the outer decisions via the envelope
/// theorem at the inner argmin: d/du = d(smooth rho)/du at (w*, theta*),
/// d/dlambda = |w* - w^i|.
struct EnvelopeGradient {
  Eigen::VectorXd du;
  double dlambda = 0.0;
  /// Argmin touches the support boundary; the envelope derivative may be
  /// one-sided there.
  bool boundary_active = false;
  bool used_finite_difference = false;
};

EnvelopeGradient envelope_gradient(const dyn::AugmentedSystem& aug,
                                   const stl::StlFormula& pnf,
                                   const Eigen::VectorXd& u_flat, double lambda,
                                   const Eigen::VectorXd& w_sample,
                                   const dro::InnerResult& inner, double sharpness,
                                   const stl::RobustnessOptions& opts = {});

/// Same, but re-solves the perturbed inner problems with central finite
/// differences when the argmin is pinned to the support boundary (the
/// envelope derivative can be one-sided across an active-set change there).
EnvelopeGradient envelope_gradient_with_fd(const dyn::AugmentedSystem& aug,
                                           const stl::StlFormula& pnf,
                                           const Eigen::VectorXd& u_flat, double lambda,
                                           const Eigen::VectorXd& w_sample,
                                           const dro::InnerResult& inner,
                                           const dro::InnerOptions& inner_opts);

/// Solves the synthesis problem with a sequential quadratic penalty method
/// (shifted quadratic penalty with multiplier estimates, projected descent
/// subproblems, feasibility restoration). Deterministic for a fixed seed.
SolveResult solve(const RobustSynthesisProblem& problem, const SolverConfig& cfg = {});

}  // namespace stldro::solver
