#pragma once

#include <vector>

#include "stldro/dro/ambiguity.hpp"
#include "stldro/dro/empirical.hpp"
#include "stldro/dro/inner.hpp"
#include "stldro/risk/concentration.hpp"

namespace stldro::dro {

/// Dual variables of the data-driven robust programs: lambda >= 0, one y
/// per sample, and eta on the CVaR route (where y_i + eta <= 0 must hold).
struct DualVariables {
  double lambda = 0.0;
  std::vector<double> y;
  double eta = 0.0;

  void validate(bool cvar_route) const;
};

struct DrpSlacks {
  /// inner_i - y_i per sample (feasible when all >= 0).
  std::vector<double> inner;
  /// -y_i - eta per sample (CVaR route only).
  std::vector<double> cap;
  /// CoM: (1/M) sum y_i - lambda r - L h^{-1}(eps) - r0.
  /// CVaR: (1/M) sum y_i - lambda r + (1-eps) eta - eps r0.
  double aggregate = 0.0;
  std::vector<InnerResult> inner_results;
};

/// Slacks of the CoM-route data-driven robust program at given duals.
DrpSlacks drp_com_slack(const dyn::AugmentedSystem& aug, const stl::StlFormula& pnf,
                        const Eigen::VectorXd& u_flat, const DualVariables& dual,
                        const EmpiricalDistribution& emp, double radius, double eps,
                        double lipschitz, double r0,
                        const risk::DistributionProfile& profile,
                        const InnerOptions& opts = {});

/// Slacks of the CVaR-route data-driven robust program at given duals.
DrpSlacks drp_cvar_slack(const dyn::AugmentedSystem& aug, const stl::StlFormula& pnf,
                         const Eigen::VectorXd& u_flat, const DualVariables& dual,
                         const EmpiricalDistribution& emp, double radius, double eps,
                         double r0, const InnerOptions& opts = {});

}  // namespace stldro::dro
