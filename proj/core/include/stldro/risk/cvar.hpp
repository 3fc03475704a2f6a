#pragma once

#include <span>
#include <vector>

#include "stldro/util/errors.hpp"

namespace stldro::risk {

/// Observed losses (larger is worse) with a tolerance eps in (0,1).
struct LossSample {
  std::vector<double> values;
  double eps = 0.0;

  void validate() const;
};

struct CvarResult {
  double value = 0.0;
  double eta = 0.0;  // minimizing threshold (the ceil(eps*M)-th largest loss)
};

/// CVaR_{1-eps} via the Rockafellar-Uryasev program
///   min_eta eta + 1/(eps M) sum_i (l_i - eta)_+,
/// solved exactly by the sorted-sample characterization: the optimum is
/// attained at eta = the ceil(eps*M)-th largest loss.
CvarResult cvar_empirical(const LossSample& sample);

/// Closed forms for a standard normal loss (test oracles):
///   VaR_{1-eps} = sqrt(2) erfinv(1 - 2 eps),  CVaR_{1-eps} = pdf(VaR)/eps.
double var_gaussian(double eps);
double cvar_gaussian(double eps);

/// Lower tail average of rewards: the largest m with
///   m + 1/(eps M) sum_i (r_i - m)_- >= m' for all m', i.e. the mean of the
/// worst ceil(eps*M) rewards (adjusted for the fractional tail). Equals
/// -CVaR_{1-eps}(-r).
struct LowerCvarResult {
  double value = 0.0;
  double eta = 0.0;  // maximizing threshold
  /// d(value)/d(r_i): 1/(eps M) on the tail, fractional weight at eta.
  std::vector<double> weights;
};
LowerCvarResult lower_cvar(std::span<const double> rewards, double eps);

}  // namespace stldro::risk
