#pragma once

#include <functional>
#include <optional>
#include <span>

namespace stldro::dro {

/// Closed-form feasibility thresholds for the scalar warm-up problem
///   min |u + w|  s.t.  P{u + w <= 0} >= 1 - eps,  w ~ N(0,1):
/// each bound is the largest feasible u.

/// Exact chance constraint: u <= -sqrt(2) erfinv(1 - 2 eps).
double scalar_ccp_bound(double eps);

/// CoM tightening with the tight Gaussian h: u <= -mean_w - sqrt(2 ln(1/eps)).
double scalar_com_bound(double eps, double mean_w = 0.0);

/// CVaR tightening: u <= -CVaR_{1-eps}(w) (standard normal closed form).
double scalar_cvar_bound(double eps);

/// Data-driven robust CoM: u <= -r - mean_w - sqrt(2 ln(1/eps)).
double scalar_drp_com_bound(double radius, double eps, double mean_w = 0.0);

/// Data-driven robust CVaR with the exact-mean (M -> infinity) oracle:
/// u <= -r/eps - CVaR_{1-eps}(w).
double scalar_drp_cvar_bound(double radius, double eps);

/// Same bound from finite samples: u <= -r/eps - empirical CVaR_{1-eps}.
double scalar_drp_cvar_bound_samples(double radius, double eps,
                                     std::span<const double> w_samples);

/// Root of f on [lo, hi] by bisection; empty when f does not change sign.
std::optional<double> find_crossover(double lo, double hi,
                                     const std::function<double(double)>& f,
                                     double tol = 1e-10);

/// eps at which the DRP-CoM and DRP-CVaR bounds coincide for a fixed radius
/// (searched on (lo, hi) excluding the trivial eps = 1 root).
std::optional<double> drp_crossover_in_eps(double radius, double lo = 0.05,
                                           double hi = 0.99);

/// radius at which the two bounds coincide for a fixed eps.
std::optional<double> drp_crossover_in_radius(double eps, double lo = 0.0,
                                              double hi = 5.0);

}  // namespace stldro::dro
