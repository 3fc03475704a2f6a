#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stldro/dynamics/rollout.hpp"
#include "stldro/risk/cvar.hpp"
#include "stldro/stl/robustness.hpp"

namespace stldro::dro {

struct InnerOptions {
  /// Start points per problem; 0 picks the default 1 + 2*(N*n_x).
  int multistart = 0;
  int max_iterations = 200;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  double sharpness = 20.0;
  stl::RobustnessOptions robustness;
  /// Warm start from a previous argmin (typically the last outer iterate).
  std::optional<Eigen::VectorXd> warm_w;
  std::optional<Eigen::VectorXd> warm_theta;
};

struct InnerResult {
  /// Reported inf: min(smooth objective, exact objective at the argmin),
  /// which preserves the under-approximation direction.
  double value = 0.0;
  double smooth_value = 0.0;
  Eigen::VectorXd w_star;      // stacked N*n_x
  Eigen::VectorXd theta_star;  // stacked agent-major
  double transport = 0.0;      // |w* - w^i|
  /// False when no start converged within budget; the best found value then
  /// overstates the inf and must be treated as non-certified.
  bool certified = false;
};

/// inf over w in W^N, theta in T of
///   smooth_rho_0(u, w, theta) + lambda |w - w_sample|
/// by seeded multi-start projected descent. Deterministic for a fixed seed.
InnerResult inner_inf_com(const dyn::AugmentedSystem& aug, const stl::StlFormula& pnf,
                          const Eigen::VectorXd& u_flat, double lambda,
                          const Eigen::VectorXd& w_sample, const InnerOptions& opts = {});

/// Aggregation used when minimizing over theta for the sample-average ECPs.
enum class ThetaAggregate { Mean, LowerCvar };

struct ThetaWorstCase {
  double value = 0.0;  // aggregate at theta*
  Eigen::VectorXd theta_star;
  std::vector<double> sample_values;  // smooth rho at theta* per sample
  /// d(aggregate)/d(u_flat) at theta* (envelope over theta).
  Eigen::VectorXd grad_u;
  /// Threshold of the lower-CVaR aggregate at theta* (0 for the mean).
  double eta = 0.0;
  bool certified = false;
};

/// Worst-case theta for the sample-average constraint: minimizes either the
/// sample mean or the eps-lower CVaR of smooth robustness over the tube.
ThetaWorstCase theta_worst_case(const dyn::AugmentedSystem& aug, const stl::StlFormula& pnf,
                                const Eigen::VectorXd& u_flat,
                                const std::vector<Eigen::VectorXd>& w_samples,
                                ThetaAggregate aggregate, double eps,
                                const InnerOptions& opts = {});

/// Stacked-domain helpers shared with the solver.
Eigen::VectorXd project_w(const dyn::AugmentedSystem& aug, const Eigen::VectorXd& w_flat);
Eigen::VectorXd project_theta(const dyn::AugmentedSystem& aug,
                              const Eigen::VectorXd& theta_flat);
int theta_dim(const dyn::AugmentedSystem& aug);

}  // namespace stldro::dro
