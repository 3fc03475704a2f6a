#include "stldro/dro/scalar_oracles.hpp"

#include <cmath>
#include <vector>

#include "stldro/risk/concentration.hpp"
#include "stldro/risk/cvar.hpp"
#include "stldro/util/errors.hpp"

namespace stldro::dro {

double scalar_ccp_bound(double eps) { return -risk::var_gaussian(eps); }

double scalar_com_bound(double eps, double mean_w) {
  return -mean_w - risk::h_gaussian_tight_inverse(eps);
}

double scalar_cvar_bound(double eps) { return -risk::cvar_gaussian(eps); }

double scalar_drp_com_bound(double radius, double eps, double mean_w) {
  if (radius < 0.0) throw InvalidArgumentError("radius must be >= 0");
  return -radius + scalar_com_bound(eps, mean_w);
}

double scalar_drp_cvar_bound(double radius, double eps) {
  if (radius < 0.0) throw InvalidArgumentError("radius must be >= 0");
  return -radius / eps + scalar_cvar_bound(eps);
}

double scalar_drp_cvar_bound_samples(double radius, double eps,
                                     std::span<const double> w_samples) {
  if (radius < 0.0) throw InvalidArgumentError("radius must be >= 0");
  risk::LossSample sample;
  sample.values.assign(w_samples.begin(), w_samples.end());
  sample.eps = eps;
  return -radius / eps - risk::cvar_empirical(sample).value;
}

std::optional<double> find_crossover(double lo, double hi,
                                     const std::function<double(double)>& f,
                                     double tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) return std::nullopt;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if (flo * fmid < 0.0) {
      hi = mid;
      fhi = fmid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

std::optional<double> drp_crossover_in_eps(double radius, double lo, double hi) {
  return find_crossover(lo, hi, [radius](double eps) {
    return scalar_drp_com_bound(radius, eps) - scalar_drp_cvar_bound(radius, eps);
  });
}

std::optional<double> drp_crossover_in_radius(double eps, double lo, double hi) {
  return find_crossover(lo, hi, [eps](double r) {
    return scalar_drp_com_bound(r, eps) - scalar_drp_cvar_bound(r, eps);
  });
}

}  // namespace stldro::dro
