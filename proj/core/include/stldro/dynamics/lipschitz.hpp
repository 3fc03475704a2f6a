#pragma once

#include <vector>

#include "stldro/dynamics/system.hpp"
#include "stldro/stl/formula.hpp"

namespace stldro::dyn {

/// Induced 2-norm (largest singular value). Dense SVD for dimension <= 64,
/// power iteration on M'M with a deterministic start vector above that
/// (tolerance 1e-10).
double induced_two_norm(const Eigen::MatrixXd& m);

enum class LipschitzVariant {
  /// L2 = sqrt(sum_i |Abar^i|^2): conservative reading of the trajectory
  /// bound, using the full augmented matrix.
  FullMatrix,
  /// Same sum with |Abar^i S_w| where S_w injects the disturbance into the
  /// controlled agent's rows; tighter, exposed behind this switch.
  InjectedSubmatrix,
};

/// L2: Lipschitz constant of the state trajectory w.r.t. the stacked
/// disturbance sequence, over horizons 1..N.
double trajectory_lipschitz(const AugmentedSystem& aug, int n_steps,
                            LipschitzVariant variant = LipschitzVariant::FullMatrix);

/// |Abar^i| for i = 0..N-1 (diagnostic output of the lipschitz command).
std::vector<double> power_norms(const AugmentedSystem& aug, int n_steps,
                                LipschitzVariant variant = LipschitzVariant::FullMatrix);

/// L_phi = L1 * L2 with L1 the maximum predicate Lipschitz constant.
double robustness_lipschitz(const stl::StlFormula& f, const AugmentedSystem& aug,
                            int n_steps,
                            LipschitzVariant variant = LipschitzVariant::FullMatrix);

}  // namespace stldro::dyn
