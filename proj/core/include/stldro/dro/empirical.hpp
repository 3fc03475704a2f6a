#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stldro/dynamics/system.hpp"

namespace stldro::dro {

/// Observed disturbance sequences w^1..w^M, each stacked to length N*n_x,
/// plus the seed they were drawn with (empty provenance for external data).
struct EmpiricalDistribution {
  std::vector<Eigen::VectorXd> samples;
  std::uint64_t seed = 0;
  std::string provenance;

  int count() const { return static_cast<int>(samples.size()); }
  int dimension() const { return samples.empty() ? 0 : static_cast<int>(samples[0].size()); }
  Eigen::VectorXd mean() const;

  void validate() const;
};

/// Draws M i.i.d. sequences w_k = scale * v_k with v_k standard normal,
/// projected onto the declared support (a >= 6-sigma box makes the
/// projection a no-op in practice).
EmpiricalDistribution draw_gaussian_sequences(const dyn::AugmentedSystem& aug, int count,
                                              double scale, std::uint64_t seed);

}  // namespace stldro::dro
