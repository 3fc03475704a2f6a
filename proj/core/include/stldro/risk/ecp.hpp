#pragma once

#include <vector>

#include "stldro/dynamics/rollout.hpp"
#include "stldro/risk/concentration.hpp"
#include "stldro/risk/cvar.hpp"
#include "stldro/stl/robustness.hpp"

namespace stldro::risk {

/// How rho_0 is evaluated inside the constraint expressions: the exact
/// semantics for oracles and certification, the smooth under-approximation
/// while solving.
struct RobustnessEval {
  bool smooth = false;
  double sharpness = 20.0;
  stl::RobustnessOptions options;
};

/// rho_0(u, w^i, theta) for every disturbance sample.
std::vector<double> sample_robustness(const dyn::AugmentedSystem& aug,
                                      const stl::StlFormula& formula,
                                      const Eigen::VectorXd& u_flat,
                                      const std::vector<Eigen::VectorXd>& w_samples,
                                      const Eigen::VectorXd& theta_flat,
                                      const RobustnessEval& eval = {});

/// Sample-average CoM constraint slack at a fixed theta:
///   (1/M) sum_i rho_0(u, w^i, theta) - L_phi h^{-1}(eps) - r0.
/// Satisfied iff the slack is >= 0. The robust (all-theta) version minimizes
/// this over the tube via the inner machinery; see the solver.
double ecp_com_constraint(const dyn::AugmentedSystem& aug, const stl::StlFormula& formula,
                          const Eigen::VectorXd& u_flat,
                          const Eigen::VectorXd& theta_flat,
                          const std::vector<Eigen::VectorXd>& w_samples, double eps,
                          double lipschitz, double r0,
                          const DistributionProfile& profile,
                          const RobustnessEval& eval = {});

/// Sample-average CVaR constraint slack at a fixed theta:
///   max_eta [ eta + 1/(eps M) sum_i (rho_i - eta)_- ] - r0,
/// computed exactly by the sorted characterization.
double ecp_cvar_constraint(const dyn::AugmentedSystem& aug, const stl::StlFormula& formula,
                           const Eigen::VectorXd& u_flat,
                           const Eigen::VectorXd& theta_flat,
                           const std::vector<Eigen::VectorXd>& w_samples, double eps,
                           double r0, const RobustnessEval& eval = {});

}  // namespace stldro::risk
