#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace stldro::util {

// SplitMix64 (Steele/Lea/Vigna): each output is a hash of an advancing
// 64-bit counter, so streams are bit-identical on every platform and can
// be split deterministically with derive(). Used for every stochastic
// step in the library; std:: distributions are avoided on purpose.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0,1).
  double next_unit();

  /// Standard normal via the inverse-CDF transform (deterministic).
  double next_gaussian();

  /// Uniform in [lo, hi).
  double next_uniform(double lo, double hi);

  /// Vector of i.i.d. standard normals.
  Eigen::VectorXd gaussian_vector(int dim);

  /// Uniform point on the unit sphere in `dim` dimensions.
  Eigen::VectorXd unit_sphere(int dim);

  /// Derive an independent stream seed from (seed, stream index).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t state_;
};

}  // namespace stldro::util
