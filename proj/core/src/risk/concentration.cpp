#include "stldro/risk/concentration.hpp"

#include <cmath>

namespace stldro::risk {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_t(double t) {
  if (!(t >= 0.0)) throw InvalidArgumentError("h(t) requires t >= 0");
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw InvalidArgumentError("h inverse requires eps in (0,1]");
  }
}
}  // namespace

double h_gaussian_general(double t) {
  check_t(t);
  return std::min(2.0 * std::exp(-2.0 * t * t / (kPi * kPi)), 1.0);
}

double h_gaussian_general_inverse(double eps) {
  check_eps(eps);
  if (eps >= 1.0) return 0.0;
  return kPi * std::sqrt(std::log(2.0 / eps) / 2.0);
}

double h_gaussian_tight(double t) {
  check_t(t);
  return std::min(std::exp(-0.5 * t * t), 1.0);
}

double h_gaussian_tight_inverse(double eps) {
  check_eps(eps);
  if (eps >= 1.0) return 0.0;
  return std::sqrt(2.0 * std::log(1.0 / eps));
}

double DistributionProfile::h(double t) const {
  const double ts = scale > 0.0 ? t / scale : t;
  switch (family) {
    case HFamily::GaussianGeneral:
      return h_gaussian_general(ts);
    case HFamily::GaussianTight:
      return h_gaussian_tight(ts);
    case HFamily::Custom:
      if (!custom_h) throw InvalidArgumentError("custom profile lacks h");
      return std::min(std::max(custom_h(ts), 0.0), 1.0);
  }
  return 1.0;
}

double DistributionProfile::h_inverse(double eps) const {
  double base = 0.0;
  switch (family) {
    case HFamily::GaussianGeneral:
      base = h_gaussian_general_inverse(eps);
      break;
    case HFamily::GaussianTight:
      base = h_gaussian_tight_inverse(eps);
      break;
    case HFamily::Custom:
      if (!custom_h_inverse) throw InvalidArgumentError("custom profile lacks h inverse");
      check_eps(eps);
      base = std::max(custom_h_inverse(eps), 0.0);
      break;
  }
  return scale * base;
}

double com_margin(double eps, double lipschitz, const DistributionProfile& profile) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgumentError("com_margin: eps must be in (0,1)");
  if (!(lipschitz >= 0.0)) throw InvalidArgumentError("com_margin: L must be >= 0");
  if (lipschitz == 0.0) return 0.0;
  return lipschitz * profile.h_inverse(eps);
}

}  // namespace stldro::risk
