#include "stldro/dro/inner.hpp"

#include <cmath>

#include "stldro/opt/projected_descent.hpp"
#include "stldro/util/rng.hpp"

namespace stldro::dro {

namespace {

// Transport term |w - w^i|: exact value, hyperbolically smoothed direction
// so the gradient is defined at w = w^i.
double transport_cost(const Eigen::VectorXd& d) { return d.norm(); }

Eigen::VectorXd transport_gradient(const Eigen::VectorXd& d) {
  const double n = std::sqrt(d.squaredNorm() + 1e-24);
  return d / n;
}

Eigen::VectorXd theta_center(const dyn::AugmentedSystem& aug) {
  Eigen::VectorXd t(theta_dim(aug));
  int at = 0;
  for (std::size_t i = 0; i < aug.tubes.size(); ++i) {
    const Eigen::VectorXd c = aug.tubes[i].center();
    for (int k = 0; k < aug.horizon; ++k) {
      t.segment(at, c.size()) = c;
      at += static_cast<int>(c.size());
    }
  }
  return t;
}

Eigen::VectorXd random_theta(const dyn::AugmentedSystem& aug, util::SplitMix64& rng,
                             bool boundary) {
  Eigen::VectorXd t(theta_dim(aug));
  int at = 0;
  for (std::size_t i = 0; i < aug.tubes.size(); ++i) {
    const int ni = aug.tubes[i].dim();
    for (int k = 0; k < aug.horizon; ++k) {
      t.segment(at, ni) =
          boundary ? aug.tubes[i].sample_boundary(rng) : aug.tubes[i].sample_interior(rng);
      at += ni;
    }
  }
  return t;
}

Eigen::VectorXd random_w(const dyn::AugmentedSystem& aug, util::SplitMix64& rng,
                         bool boundary) {
  Eigen::VectorXd w(aug.horizon * aug.nx);
  for (int k = 0; k < aug.horizon; ++k) {
    w.segment(k * aug.nx, aug.nx) = boundary ? aug.disturbance.sample_boundary(rng)
                                             : aug.disturbance.sample_interior(rng);
  }
  return w;
}

int default_starts(const dyn::AugmentedSystem& aug) { return 1 + 2 * aug.horizon * aug.nx; }

}  // namespace

Eigen::VectorXd project_w(const dyn::AugmentedSystem& aug, const Eigen::VectorXd& w_flat) {
  Eigen::VectorXd out(w_flat.size());
  for (int k = 0; k < aug.horizon; ++k) {
    out.segment(k * aug.nx, aug.nx) =
        aug.disturbance.project(w_flat.segment(k * aug.nx, aug.nx));
  }
  return out;
}

Eigen::VectorXd project_theta(const dyn::AugmentedSystem& aug,
                              const Eigen::VectorXd& theta_flat) {
  Eigen::VectorXd out(theta_flat.size());
  int at = 0;
  for (std::size_t i = 0; i < aug.tubes.size(); ++i) {
    const int ni = aug.tubes[i].dim();
    for (int k = 0; k < aug.horizon; ++k) {
      out.segment(at, ni) = aug.tubes[i].project(theta_flat.segment(at, ni));
      at += ni;
    }
  }
  return out;
}

int theta_dim(const dyn::AugmentedSystem& aug) {
  int total = 0;
  for (const int ni : aug.agent_dims) total += ni * aug.horizon;
  return total;
}

InnerResult inner_inf_com(const dyn::AugmentedSystem& aug, const stl::StlFormula& pnf,
                          const Eigen::VectorXd& u_flat, double lambda,
                          const Eigen::VectorXd& w_sample, const InnerOptions& opts) {
  if (lambda < 0.0) throw InvalidArgumentError("inner_inf_com: lambda must be >= 0");
  const int dim_w = aug.horizon * aug.nx;
  const int dim_t = theta_dim(aug);
  if (w_sample.size() != dim_w) {
    throw InvalidArgumentError("inner_inf_com: sample dimension mismatch");
  }

  auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    const Eigen::VectorXd w = x.head(dim_w);
    const Eigen::VectorXd th = x.tail(dim_t);
    const stl::Trajectory xi = dyn::rollout_flat(aug, u_flat, w, th);
    const stl::SmoothGradient sg =
        stl::smooth_robustness_gradient(pnf, xi, 0, opts.sharpness, opts.robustness);
    const dyn::SequenceGradient seq = dyn::pullback_gradient(aug, sg.state_gradients);
    const Eigen::VectorXd d = w - w_sample;
    grad.resize(dim_w + dim_t);
    grad.head(dim_w) = seq.w + lambda * transport_gradient(d);
    grad.tail(dim_t) = seq.theta;
    return sg.value + lambda * transport_cost(d);
  };
  auto objective_value = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd w = x.head(dim_w);
    const stl::Trajectory xi = dyn::rollout_flat(aug, u_flat, w, x.tail(dim_t));
    return stl::smooth_robustness(pnf, xi, 0, opts.sharpness, opts.robustness) +
           lambda * (w - w_sample).norm();
  };
  auto project = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd out(x.size());
    out.head(dim_w) = project_w(aug, x.head(dim_w));
    out.tail(dim_t) = project_theta(aug, x.tail(dim_t));
    return out;
  };

  // Start list: the sample itself, the warm start, then support extremes and
  // random interior points up to the budget.
  const int budget = opts.multistart > 0 ? opts.multistart : default_starts(aug);
  std::vector<Eigen::VectorXd> starts;
  {
    Eigen::VectorXd x0(dim_w + dim_t);
    x0.head(dim_w) = w_sample;
    x0.tail(dim_t) = opts.warm_theta && opts.warm_theta->size() == dim_t
                         ? *opts.warm_theta
                         : theta_center(aug);
    starts.push_back(x0);
  }
  if (opts.warm_w && opts.warm_w->size() == dim_w) {
    Eigen::VectorXd x0(dim_w + dim_t);
    x0.head(dim_w) = *opts.warm_w;
    x0.tail(dim_t) = opts.warm_theta && opts.warm_theta->size() == dim_t
                         ? *opts.warm_theta
                         : theta_center(aug);
    starts.push_back(x0);
  }
  util::SplitMix64 rng(util::SplitMix64::derive(opts.seed, 0x1a2b3c4dULL));
  int extreme_index = 0;
  const std::vector<Eigen::VectorXd> w_extremes = aug.disturbance.extreme_points();
  while (static_cast<int>(starts.size()) < budget) {
    Eigen::VectorXd x0(dim_w + dim_t);
    const bool use_extreme = (extreme_index % 2 == 0) && !w_extremes.empty();
    if (use_extreme) {
      // per-step extreme point, rotating over the axis extremes
      const auto& pt = w_extremes[static_cast<std::size_t>((extreme_index / 2) %
                                                           w_extremes.size())];
      for (int k = 0; k < aug.horizon; ++k) x0.segment(k * aug.nx, aug.nx) = pt;
    } else {
      x0.head(dim_w) = random_w(aug, rng, (extreme_index % 4) == 1);
    }
    x0.tail(dim_t) = dim_t > 0 ? random_theta(aug, rng, (extreme_index % 2) == 0)
                               : Eigen::VectorXd(0);
    starts.push_back(x0);
    ++extreme_index;
  }

  opt::DescentOptions dopts;
  dopts.max_iterations = opts.max_iterations;
  dopts.tol = opts.tol;

  InnerResult best;
  bool have_best = false;
  for (const auto& x0 : starts) {
    const opt::DescentResult run =
        opt::projected_descent(objective, project, x0, dopts, objective_value);
    const double val = objective_value(run.x);
    if (!have_best || val < best.smooth_value) {
      have_best = true;
      best.smooth_value = val;
      best.w_star = run.x.head(dim_w);
      best.theta_star = run.x.tail(dim_t);
      best.certified = run.converged;
    }
  }

  best.transport = (best.w_star - w_sample).norm();
  const stl::Trajectory xi = dyn::rollout_flat(aug, u_flat, best.w_star, best.theta_star);
  const double exact_at_argmin =
      stl::robustness(pnf, xi, 0, opts.robustness) + lambda * best.transport;
  best.value = std::min(best.smooth_value, exact_at_argmin);
  return best;
}

ThetaWorstCase theta_worst_case(const dyn::AugmentedSystem& aug, const stl::StlFormula& pnf,
                                const Eigen::VectorXd& u_flat,
                                const std::vector<Eigen::VectorXd>& w_samples,
                                ThetaAggregate aggregate, double eps,
                                const InnerOptions& opts) {
  const int dim_t = theta_dim(aug);
  const int m = static_cast<int>(w_samples.size());
  if (m < 1) throw InvalidArgumentError("theta_worst_case: M >= 1 required");

  // Deviation of the trajectory caused by each disturbance sample alone;
  // the rollout is linear, so states split as base(u, theta) + deviation_i.
  std::vector<std::vector<Eigen::VectorXd>> deviations(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    std::vector<Eigen::VectorXd>& dev = deviations[static_cast<std::size_t>(i)];
    dev.assign(static_cast<std::size_t>(aug.horizon) + 1, Eigen::VectorXd::Zero(aug.nz));
    for (int k = 0; k < aug.horizon; ++k) {
      Eigen::VectorXd noise = Eigen::VectorXd::Zero(aug.nz);
      noise.head(aug.nx) = w_samples[static_cast<std::size_t>(i)].segment(k * aug.nx, aug.nx);
      dev[static_cast<std::size_t>(k) + 1] = aug.a_bar * dev[static_cast<std::size_t>(k)] + noise;
    }
  }
  const Eigen::VectorXd w_zero = Eigen::VectorXd::Zero(aug.horizon * aug.nx);

  std::vector<double> values(static_cast<std::size_t>(m));
  Eigen::VectorXd last_grad_u;
  double last_eta = 0.0;
  auto objective = [&](const Eigen::VectorXd& th, Eigen::VectorXd& grad) {
    const stl::Trajectory base = dyn::rollout_flat(aug, u_flat, w_zero, th);
    std::vector<Eigen::VectorXd> mean_state_grad(
        static_cast<std::size_t>(aug.horizon) + 1, Eigen::VectorXd::Zero(aug.nz));
    std::vector<std::vector<Eigen::VectorXd>> grads(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      std::vector<Eigen::VectorXd> states = base.states();
      for (std::size_t k = 0; k < states.size(); ++k) {
        states[k] += deviations[static_cast<std::size_t>(i)][k];
      }
      const stl::Trajectory xi(std::move(states));
      const stl::SmoothGradient sg =
          stl::smooth_robustness_gradient(pnf, xi, 0, opts.sharpness, opts.robustness);
      values[static_cast<std::size_t>(i)] = sg.value;
      grads[static_cast<std::size_t>(i)] = sg.state_gradients;
    }
    double value = 0.0;
    if (aggregate == ThetaAggregate::Mean) {
      for (int i = 0; i < m; ++i) {
        value += values[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < mean_state_grad.size(); ++k) {
          mean_state_grad[k] += grads[static_cast<std::size_t>(i)][k];
        }
      }
      value /= m;
      for (auto& g : mean_state_grad) g /= static_cast<double>(m);
      last_eta = 0.0;
    } else {
      const risk::LowerCvarResult lc = risk::lower_cvar(values, eps);
      value = lc.value;
      last_eta = lc.eta;
      for (int i = 0; i < m; ++i) {
        const double wgt = lc.weights[static_cast<std::size_t>(i)];
        if (wgt == 0.0) continue;
        for (std::size_t k = 0; k < mean_state_grad.size(); ++k) {
          mean_state_grad[k] += wgt * grads[static_cast<std::size_t>(i)][k];
        }
      }
    }
    const dyn::SequenceGradient pulled = dyn::pullback_gradient(aug, mean_state_grad);
    last_grad_u = pulled.u;
    grad = pulled.theta;
    return value;
  };
  auto objective_value = [&](const Eigen::VectorXd& th) {
    const stl::Trajectory base = dyn::rollout_flat(aug, u_flat, w_zero, th);
    for (int i = 0; i < m; ++i) {
      std::vector<Eigen::VectorXd> states = base.states();
      for (std::size_t k = 0; k < states.size(); ++k) {
        states[k] += deviations[static_cast<std::size_t>(i)][k];
      }
      const stl::Trajectory xi(std::move(states));
      values[static_cast<std::size_t>(i)] =
          stl::smooth_robustness(pnf, xi, 0, opts.sharpness, opts.robustness);
    }
    if (aggregate == ThetaAggregate::Mean) {
      double mean = 0.0;
      for (const double v : values) mean += v;
      return mean / m;
    }
    return risk::lower_cvar(values, eps).value;
  };
  auto project = [&](const Eigen::VectorXd& th) { return project_theta(aug, th); };

  ThetaWorstCase out;
  if (dim_t == 0) {
    Eigen::VectorXd g;
    out.theta_star = Eigen::VectorXd(0);
    out.value = objective(out.theta_star, g);
    out.sample_values = values;
    out.grad_u = last_grad_u;
    out.eta = last_eta;
    out.certified = true;
    return out;
  }

  const int budget = opts.multistart > 0 ? opts.multistart : 1 + 2 * dim_t;
  std::vector<Eigen::VectorXd> starts;
  if (opts.warm_theta && opts.warm_theta->size() == dim_t) {
    starts.push_back(*opts.warm_theta);
  }
  starts.push_back(theta_center(aug));
  util::SplitMix64 rng(util::SplitMix64::derive(opts.seed, 0x7e57c0deULL));
  while (static_cast<int>(starts.size()) < budget) {
    starts.push_back(random_theta(aug, rng, starts.size() % 2 == 0));
  }

  opt::DescentOptions dopts;
  dopts.max_iterations = opts.max_iterations;
  dopts.tol = opts.tol;

  bool have_best = false;
  double best_val = 0.0;
  Eigen::VectorXd best_theta;
  bool best_certified = false;
  for (const auto& th0 : starts) {
    const opt::DescentResult run =
        opt::projected_descent(objective, project, th0, dopts, objective_value);
    const double val = objective_value(run.x);
    if (!have_best || val < best_val) {
      have_best = true;
      best_val = val;
      best_theta = run.x;
      best_certified = run.converged;
    }
  }
  Eigen::VectorXd dummy;
  out.value = objective(best_theta, dummy);  // refresh captures at theta*
  out.theta_star = best_theta;
  out.sample_values = values;
  out.grad_u = last_grad_u;
  out.eta = last_eta;
  out.certified = best_certified;
  return out;
}

}  // namespace stldro::dro
