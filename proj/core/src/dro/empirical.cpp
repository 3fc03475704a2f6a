#include "stldro/dro/empirical.hpp"

#include "stldro/util/rng.hpp"

namespace stldro::dro {

Eigen::VectorXd EmpiricalDistribution::mean() const {
  validate();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dimension());
  for (const auto& w : samples) m += w;
  return m / static_cast<double>(count());
}

void EmpiricalDistribution::validate() const {
  if (samples.empty()) throw InvalidArgumentError("empirical distribution needs M >= 1");
  for (const auto& w : samples) {
    if (w.size() != samples[0].size()) {
      throw InvalidArgumentError("empirical samples must share one dimension");
    }
  }
}

EmpiricalDistribution draw_gaussian_sequences(const dyn::AugmentedSystem& aug, int count,
                                              double scale, std::uint64_t seed) {
  if (count < 1) throw InvalidArgumentError("draw_gaussian_sequences: count >= 1");
  EmpiricalDistribution emp;
  emp.seed = seed;
  emp.provenance = "gaussian";
  const int n_steps = aug.horizon;
  for (int i = 0; i < count; ++i) {
    util::SplitMix64 rng(util::SplitMix64::derive(seed, static_cast<std::uint64_t>(i)));
    Eigen::VectorXd w(n_steps * aug.nx);
    for (int k = 0; k < n_steps; ++k) {
      const Eigen::VectorXd step =
          aug.disturbance.project(scale * rng.gaussian_vector(aug.nx));
      w.segment(k * aug.nx, aug.nx) = step;
    }
    emp.samples.push_back(std::move(w));
  }
  return emp;
}

}  // namespace stldro::dro
