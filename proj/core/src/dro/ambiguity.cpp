#include "stldro/dro/ambiguity.hpp"

#include <algorithm>
#include <cmath>

namespace stldro::dro {

void AmbiguityConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw InvalidArgumentError("ambiguity: beta must lie in (0,1)");
  }
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    throw InvalidArgumentError("ambiguity: c1 and c2 must be positive");
  }
  if (mode == RadiusMode::Fixed && !(fixed_radius >= 0.0)) {
    throw InvalidArgumentError("ambiguity: fixed radius must be >= 0");
  }
  if (!(tail_exponent > 1.0)) {
    throw InvalidArgumentError("ambiguity: tail exponent a must exceed 1");
  }
}

double wasserstein_radius(const AmbiguityConfig& cfg, int sample_count) {
  cfg.validate();
  if (sample_count < 1) throw InvalidArgumentError("wasserstein_radius: M >= 1");
  if (cfg.mode == RadiusMode::Fixed) return cfg.fixed_radius;
  const double log_term = std::log(cfg.c1 / cfg.beta);
  const double threshold = log_term / cfg.c2;
  const double base = log_term / (cfg.c2 * static_cast<double>(sample_count));
  const double exponent = static_cast<double>(sample_count) >= threshold
                              ? 1.0 / std::max(cfg.dimension, 2)
                              : 1.0 / cfg.tail_exponent;
  return std::pow(base, exponent);
}

}  // namespace stldro::dro
