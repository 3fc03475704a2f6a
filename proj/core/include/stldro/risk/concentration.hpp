#pragma once

#include <functional>
#include <string>

#include "stldro/util/errors.hpp"

namespace stldro::risk {

/// h(t) = min{2 exp(-2 t^2 / pi^2), 1} for the standard multivariate
/// Gaussian; inverse is 0 for eps >= 1, else pi sqrt(ln(2/eps)/2).
double h_gaussian_general(double t);
double h_gaussian_general_inverse(double eps);

/// Tight Gaussian form h(t) = min{exp(-t^2/2), 1}, h^{-1}(eps) =
/// sqrt(2 log(1/eps)).
double h_gaussian_tight(double t);
double h_gaussian_tight_inverse(double eps);

enum class HFamily { GaussianGeneral, GaussianTight, Custom };

/// Light-tail profile of the disturbance distribution: tail constants of
/// Assumption-1 type plus the concentration function h with an analytic
/// inverse. `scale` handles sigma-scaled base distributions: w = scale * v
/// with v matching the base family, so h^{-1} is multiplied by scale.
struct DistributionProfile {
  HFamily family = HFamily::GaussianTight;
  double tail_exponent = 2.0;  // a > 1
  double tail_constant = 1.0;  // C
  double scale = 1.0;
  std::function<double(double)> custom_h;
  std::function<double(double)> custom_h_inverse;

  double h(double t) const;
  double h_inverse(double eps) const;
};

/// Constraint tightening of the CoM route: margin = L_phi * h^{-1}(eps).
/// The ECP constraint is then E[rho_0] - margin >= r0 for every theta.
double com_margin(double eps, double lipschitz, const DistributionProfile& profile);

}  // namespace stldro::risk
