#pragma once

#include <vector>

#include "stldro/dynamics/system.hpp"
#include "stldro/stl/formula.hpp"

namespace stldro::dyn {

/// Input, disturbance, and per-agent uncertainty sequences over N steps.
struct SequenceBundle {
  std::vector<Eigen::VectorXd> u;                   // N x n_u
  std::vector<Eigen::VectorXd> w;                   // N x n_x
  std::vector<std::vector<Eigen::VectorXd>> theta;  // per agent, N x n_i

  static SequenceBundle zeros(const AugmentedSystem& aug);

  /// True when every w_k lies in W and every theta_k^i in T_i.
  bool admissible(const AugmentedSystem& aug, double tol = 1e-9) const;
};

/// z_{k+1} = Abar z_k + [C' 0']' u_k + [w_k' theta_k'']'. The recursion is
/// the production path; the explicit convolution form is kept in the test
/// suite as an independent oracle.
stl::Trajectory rollout(const AugmentedSystem& aug, const Eigen::VectorXd& z0,
                        const SequenceBundle& seqs);

/// Flattened disturbance stack [w_0' ... w_{N-1}']' of length N*n_x.
Eigen::VectorXd stack_w(const SequenceBundle& seqs);
/// Flattened uncertainty stack theta^{1:n}_{0:N} (agent-major).
Eigen::VectorXd stack_theta(const SequenceBundle& seqs);

void unstack_w(const Eigen::VectorXd& w_flat, int nx, SequenceBundle& seqs);
void unstack_theta(const Eigen::VectorXd& theta_flat, const AugmentedSystem& aug,
                   SequenceBundle& seqs);

/// Rollout taking flattened sequences (u: N*n_u, w: N*n_x, theta agent-major).
stl::Trajectory rollout_flat(const AugmentedSystem& aug, const Eigen::VectorXd& u_flat,
                             const Eigen::VectorXd& w_flat,
                             const Eigen::VectorXd& theta_flat);

/// Gradients of a scalar function of the trajectory pulled back through the
/// linear dynamics. `state_gradients[k]` is d(value)/d(z_k).
struct SequenceGradient {
  Eigen::VectorXd u;      // length N*n_u
  Eigen::VectorXd w;      // length N*n_x
  Eigen::VectorXd theta;  // length sum_i N*n_i (agent-major)
};
SequenceGradient pullback_gradient(const AugmentedSystem& aug,
                                   const std::vector<Eigen::VectorXd>& state_gradients);

}  // namespace stldro::dyn
