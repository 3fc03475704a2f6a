#include "stldro/util/rng.hpp"

#include <cmath>

#include "stldro/util/special.hpp"

namespace stldro::util {

namespace {
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t SplitMix64::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix(state_);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_gaussian() {
  // (k + 0.5) * 2^-53 is strictly inside (0,1) for k in [0, 2^53).
  const double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  return normal_quantile(u);
}

double SplitMix64::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

Eigen::VectorXd SplitMix64::gaussian_vector(int dim) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = next_gaussian();
  return v;
}

Eigen::VectorXd SplitMix64::unit_sphere(int dim) {
  Eigen::VectorXd v = gaussian_vector(dim);
  const double n = v.norm();
  if (n == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / n;
}

std::uint64_t SplitMix64::derive(std::uint64_t seed, std::uint64_t stream) {
  return mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL));
}

}  // namespace stldro::util
