#pragma once

#include "stldro/util/errors.hpp"

namespace stldro::dro {

enum class RadiusMode { Auto, Fixed };

/// Wasserstein ball configuration. In Auto mode the radius follows the
/// finite-sample containment rule
///   r = (log(c1/beta) / (c2 M))^(1/max(N n_x, 2))   if M >= log(c1/beta)/c2
///   r = (log(c1/beta) / (c2 M))^(1/a)               otherwise,
/// taking equality in the published lower bound. c1, c2 default to 1 and are
/// not derived from data; prefer Fixed for reproducing reported results.
struct AmbiguityConfig {
  double beta = 0.05;
  RadiusMode mode = RadiusMode::Fixed;
  double fixed_radius = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double tail_exponent = 2.0;  // a from the light-tail assumption
  int dimension = 2;           // N * n_x

  void validate() const;
};

double wasserstein_radius(const AmbiguityConfig& cfg, int sample_count);

}  // namespace stldro::dro
