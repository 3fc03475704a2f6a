#include "stldro/dynamics/rollout.hpp"

namespace stldro::dyn {

SequenceBundle SequenceBundle::zeros(const AugmentedSystem& aug) {
  SequenceBundle s;
  const std::size_t n_steps = static_cast<std::size_t>(aug.horizon);
  s.u.assign(n_steps, Eigen::VectorXd::Zero(aug.nu));
  s.w.assign(n_steps, Eigen::VectorXd::Zero(aug.nx));
  s.theta.resize(aug.agent_dims.size());
  for (std::size_t i = 0; i < aug.agent_dims.size(); ++i) {
    s.theta[i].assign(n_steps, Eigen::VectorXd::Zero(aug.agent_dims[i]));
  }
  return s;
}

bool SequenceBundle::admissible(const AugmentedSystem& aug, double tol) const {
  for (const auto& wk : w) {
    if (!aug.disturbance.contains(wk, tol)) return false;
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    for (const auto& tk : theta[i]) {
      if (!aug.tubes[i].contains(tk, tol)) return false;
    }
  }
  return true;
}

stl::Trajectory rollout(const AugmentedSystem& aug, const Eigen::VectorXd& z0,
                        const SequenceBundle& seqs) {
  const int n_steps = static_cast<int>(seqs.u.size());
  if (static_cast<int>(seqs.w.size()) != n_steps) {
    throw InvalidArgumentError("rollout: u and w must have the same length");
  }
  if (z0.size() != aug.nz) throw InvalidArgumentError("rollout: z0 dimension mismatch");
  if (static_cast<int>(seqs.theta.size()) != static_cast<int>(aug.agent_dims.size())) {
    throw InvalidArgumentError("rollout: theta must cover every agent");
  }

  std::vector<Eigen::VectorXd> states;
  states.reserve(static_cast<std::size_t>(n_steps) + 1);
  states.push_back(z0);
  Eigen::VectorXd z = z0;
  Eigen::VectorXd noise(aug.nz);
  for (int k = 0; k < n_steps; ++k) {
    noise.setZero();
    noise.head(aug.nx) = seqs.w[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < aug.agent_dims.size(); ++i) {
      noise.segment(aug.agent_offsets[i], aug.agent_dims[i]) =
          seqs.theta[i][static_cast<std::size_t>(k)];
    }
    z = aug.a_bar * z + aug.input_map * seqs.u[static_cast<std::size_t>(k)] + noise;
    states.push_back(z);
  }
  return stl::Trajectory(std::move(states));
}

Eigen::VectorXd stack_w(const SequenceBundle& seqs) {
  const int n_steps = static_cast<int>(seqs.w.size());
  const int nx = n_steps > 0 ? static_cast<int>(seqs.w[0].size()) : 0;
  Eigen::VectorXd out(n_steps * nx);
  for (int k = 0; k < n_steps; ++k) out.segment(k * nx, nx) = seqs.w[static_cast<std::size_t>(k)];
  return out;
}

Eigen::VectorXd stack_theta(const SequenceBundle& seqs) {
  int total = 0;
  for (const auto& agent : seqs.theta) {
    for (const auto& tk : agent) total += static_cast<int>(tk.size());
  }
  Eigen::VectorXd out(total);
  int at = 0;
  for (const auto& agent : seqs.theta) {
    for (const auto& tk : agent) {
      out.segment(at, tk.size()) = tk;
      at += static_cast<int>(tk.size());
    }
  }
  return out;
}

void unstack_w(const Eigen::VectorXd& w_flat, int nx, SequenceBundle& seqs) {
  const int n_steps = static_cast<int>(seqs.w.size());
  if (w_flat.size() != n_steps * nx) {
    throw InvalidArgumentError("unstack_w: length mismatch");
  }
  for (int k = 0; k < n_steps; ++k) {
    seqs.w[static_cast<std::size_t>(k)] = w_flat.segment(k * nx, nx);
  }
}

void unstack_theta(const Eigen::VectorXd& theta_flat, const AugmentedSystem& aug,
                   SequenceBundle& seqs) {
  int at = 0;
  for (std::size_t i = 0; i < aug.agent_dims.size(); ++i) {
    const int ni = aug.agent_dims[i];
    for (auto& tk : seqs.theta[i]) {
      tk = theta_flat.segment(at, ni);
      at += ni;
    }
  }
  if (at != theta_flat.size()) throw InvalidArgumentError("unstack_theta: length mismatch");
}

stl::Trajectory rollout_flat(const AugmentedSystem& aug, const Eigen::VectorXd& u_flat,
                             const Eigen::VectorXd& w_flat,
                             const Eigen::VectorXd& theta_flat) {
  SequenceBundle seqs = SequenceBundle::zeros(aug);
  const int n_steps = aug.horizon;
  if (u_flat.size() != n_steps * aug.nu) {
    throw InvalidArgumentError("rollout_flat: u length mismatch");
  }
  for (int k = 0; k < n_steps; ++k) {
    seqs.u[static_cast<std::size_t>(k)] = u_flat.segment(k * aug.nu, aug.nu);
  }
  unstack_w(w_flat, aug.nx, seqs);
  unstack_theta(theta_flat, aug, seqs);
  return rollout(aug, aug.z0, seqs);
}

SequenceGradient pullback_gradient(const AugmentedSystem& aug,
                                   const std::vector<Eigen::VectorXd>& state_gradients) {
  const int n_steps = static_cast<int>(state_gradients.size()) - 1;
  SequenceGradient out;
  out.u = Eigen::VectorXd::Zero(n_steps * aug.nu);
  out.w = Eigen::VectorXd::Zero(n_steps * aug.nx);
  int theta_total = 0;
  for (int ni : aug.agent_dims) theta_total += n_steps * ni;
  out.theta = Eigen::VectorXd::Zero(theta_total);

  // p_k = g_k + Abar' p_{k+1}; the additive noise at step l sees p_{l+1}.
  Eigen::VectorXd p = state_gradients[static_cast<std::size_t>(n_steps)];
  for (int l = n_steps - 1; l >= 0; --l) {
    out.u.segment(l * aug.nu, aug.nu) = aug.input_map.transpose() * p;
    out.w.segment(l * aug.nx, aug.nx) = p.head(aug.nx);
    int theta_at = 0;
    for (std::size_t i = 0; i < aug.agent_dims.size(); ++i) {
      const int ni = aug.agent_dims[i];
      out.theta.segment(theta_at + l * ni, ni) = p.segment(aug.agent_offsets[i], ni);
      theta_at += n_steps * ni;
    }
    p = state_gradients[static_cast<std::size_t>(l)] + aug.a_bar.transpose() * p;
  }
  return out;
}

}  // namespace stldro::dyn
