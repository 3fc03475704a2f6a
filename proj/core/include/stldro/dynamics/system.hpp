#pragma once

#include <vector>

#include <Eigen/Core>

#include "stldro/dynamics/support_set.hpp"

namespace stldro::dyn {

/// One uncontrollable agent:
///   y^i_{k+1} = D_i x_k + sum_j E_{i,j} y^j_k + theta^i_k,  theta^i_k in tube.
struct UncontrollableAgent {
  Eigen::MatrixXd b;                    // n_x x n_i, influence on the controlled agent
  Eigen::MatrixXd d;                    // n_i x n_x
  std::vector<Eigen::MatrixXd> e_row;   // E_{i,j} for j = 1..n, each n_i x n_j
  Eigen::VectorXd y0;                   // n_i
  SupportSet tube;                      // T_i, compact
};

/// Controlled agent
///   x_{k+1} = A x_k + sum_i B_i y^i_k + C u_k + w_k,  w_k in disturbance support,
/// together with n >= 0 uncontrollable agents. n = 0 degenerates to the
/// single-agent case.
struct LinearMultiAgentSystem {
  Eigen::MatrixXd a;           // n_x x n_x
  Eigen::MatrixXd c;           // n_x x n_u
  Eigen::VectorXd x0;          // n_x
  SupportSet disturbance;      // W, compact (over-approximation is fine)
  std::vector<UncontrollableAgent> agents;
  int horizon = 0;             // N

  int state_dim() const { return static_cast<int>(a.rows()); }
  int input_dim() const { return static_cast<int>(c.cols()); }
  int augmented_dim() const;

  /// Throws InvalidArgumentError on any dimension inconsistency.
  void validate() const;
};

/// Augmented single-system view of all agents:
///   z_{k+1} = Abar z_k + [C' 0']' u_k + [w_k' theta^1_k' ... theta^n_k']'.
struct AugmentedSystem {
  Eigen::MatrixXd a_bar;      // n_z x n_z
  Eigen::MatrixXd input_map;  // n_z x n_u, equals [C' 0']'
  Eigen::VectorXd z0;         // stacked [x0' y0^1' ... y0^n']'
  int nx = 0;
  int nu = 0;
  int nz = 0;
  std::vector<int> agent_dims;      // n_i
  std::vector<int> agent_offsets;   // row offset of agent i inside z
  SupportSet disturbance;           // per step
  std::vector<SupportSet> tubes;    // per agent, per step
  int horizon = 0;

  int noise_dim() const { return nz; }  // stacked [w; theta] per step
};

/// Assembles Abar exactly as the block layout above: A top-left, B_i across
/// the top row-block, D_i down the first column-block, E_{i,j} elsewhere.
AugmentedSystem build_augmented(const LinearMultiAgentSystem& sys);

/// Reads the constituent blocks back out of Abar (test support).
struct AugmentedBlocks {
  Eigen::MatrixXd a;
  std::vector<Eigen::MatrixXd> b;
  std::vector<Eigen::MatrixXd> d;
  std::vector<std::vector<Eigen::MatrixXd>> e;
};
AugmentedBlocks extract_blocks(const AugmentedSystem& aug);

}  // namespace stldro::dyn
