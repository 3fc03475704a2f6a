#include "stldro/solver/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "stldro/dro/slacks.hpp"
#include "stldro/opt/projected_descent.hpp"
#include "stldro/risk/ecp.hpp"
#include "stldro/util/parallel.hpp"

namespace stldro::solver {

std::string method_name(Method m) {
  switch (m) {
    case Method::EcpCom: return "ecp-com";
    case Method::EcpCvar: return "ecp-cvar";
    case Method::DrpCom: return "drp-com";
    case Method::DrpCvar: return "drp-cvar";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "ecp-com") return Method::EcpCom;
  if (name == "ecp-cvar") return Method::EcpCvar;
  if (name == "drp-com") return Method::DrpCom;
  if (name == "drp-cvar") return Method::DrpCvar;
  throw InvalidArgumentError("unknown method '" + name +
                             "' (expected ecp-com, ecp-cvar, drp-com, drp-cvar)");
}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::FeasibleNotConverged: return "feasible-not-converged";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::BudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

void RobustSynthesisProblem::validate() const {
  system.validate();
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgumentError("problem: eps must be in (0,1)");
  if (!(r0 >= 0.0)) throw InvalidArgumentError("problem: r0 must be >= 0");
  if (formula.horizon() > system.horizon) {
    throw InvalidArgumentError("problem: formula horizon exceeds system horizon");
  }
  samples.validate();
  if (samples.dimension() != system.horizon * system.state_dim()) {
    throw InvalidArgumentError("problem: sample dimension must equal N*n_x");
  }
}

double SolveResult::min_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (const double s : slacks) m = std::min(m, s);
  return m;
}

std::vector<double> smoothing_schedule(const SolverConfig& cfg) {
  if (!cfg.cs_schedule.empty()) {
    for (const double c : cfg.cs_schedule) {
      if (!(c > 0.0)) throw InvalidArgumentError("smoothing sharpness must be > 0");
    }
    return cfg.cs_schedule;
  }
  return {5.0, 20.0, 80.0};
}

EnvelopeGradient envelope_gradient(const dyn::AugmentedSystem& aug,
                                   const stl::StlFormula& pnf,
                                   const Eigen::VectorXd& u_flat, double lambda,
                                   const Eigen::VectorXd& w_sample,
                                   const dro::InnerResult& inner, double sharpness,
                                   const stl::RobustnessOptions& opts) {
  const stl::Trajectory xi = dyn::rollout_flat(aug, u_flat, inner.w_star, inner.theta_star);
  const stl::SmoothGradient sg =
      stl::smooth_robustness_gradient(pnf, xi, 0, sharpness, opts);
  EnvelopeGradient out;
  out.du = dyn::pullback_gradient(aug, sg.state_gradients).u;
  out.dlambda = inner.transport;
  (void)lambda;
  (void)w_sample;
  // boundary contact <=> the block is no longer strictly inside the support
  out.boundary_active = false;
  for (int k = 0; k < aug.horizon; ++k) {
    const Eigen::VectorXd block = inner.w_star.segment(k * aug.nx, aug.nx);
    if (!aug.disturbance.contains(block, -1e-9)) {
      out.boundary_active = true;
      break;
    }
  }
  return out;
}

EnvelopeGradient envelope_gradient_with_fd(const dyn::AugmentedSystem& aug,
                                           const stl::StlFormula& pnf,
                                           const Eigen::VectorXd& u_flat, double lambda,
                                           const Eigen::VectorXd& w_sample,
                                           const dro::InnerResult& inner,
                                           const dro::InnerOptions& inner_opts) {
  EnvelopeGradient out = envelope_gradient(aug, pnf, u_flat, lambda, w_sample, inner,
                                           inner_opts.sharpness, inner_opts.robustness);
  if (!out.boundary_active) return out;
  // Central differences through re-solved inner problems, warm-started at
  // the unperturbed argmin.
  dro::InnerOptions opts = inner_opts;
  opts.warm_w = inner.w_star;
  opts.warm_theta = inner.theta_star;
  opts.multistart = 1;
  const double h = 1e-5;
  for (int j = 0; j < u_flat.size(); ++j) {
    Eigen::VectorXd up = u_flat;
    up[j] += h;
    Eigen::VectorXd dn = u_flat;
    dn[j] -= h;
    const double fp = dro::inner_inf_com(aug, pnf, up, lambda, w_sample, opts).smooth_value;
    const double fm = dro::inner_inf_com(aug, pnf, dn, lambda, w_sample, opts).smooth_value;
    out.du[j] = (fp - fm) / (2.0 * h);
  }
  const double lp =
      dro::inner_inf_com(aug, pnf, u_flat, lambda + h, w_sample, opts).smooth_value;
  const double lm =
      dro::inner_inf_com(aug, pnf, u_flat, std::max(0.0, lambda - h), w_sample, opts)
          .smooth_value;
  out.dlambda = (lp - lm) / (lambda - h >= 0.0 ? 2.0 * h : h);
  out.used_finite_difference = true;
  return out;
}

namespace {

struct ModelContext {
  const dyn::AugmentedSystem* aug = nullptr;
  stl::StlFormula pnf = stl::StlFormula::truth();
  const RobustSynthesisProblem* problem = nullptr;
  const SolverConfig* cfg = nullptr;
  double lipschitz = 0.0;
  double margin = 0.0;
  double radius = 0.0;
  double sharpness = 20.0;
};

/// One constraint family g(u) >= 0 over the flattened input sequence.
/// Auxiliary duals (lambda, y, eta) are eliminated inside the model: y and
/// eta analytically, lambda by exact one-dimensional concave maximization
/// (update_duals), so the outer iteration never walks into their kinks.
class ConstraintModel {
 public:
  explicit ConstraintModel(ModelContext ctx) : ctx_(std::move(ctx)) {}
  virtual ~ConstraintModel() = default;

  virtual double slack(const Eigen::VectorXd& u, Eigen::VectorXd* grad) = 0;
  /// Re-optimizes eliminated duals at the current iterate (no-op for ECP).
  virtual void update_duals(const Eigen::VectorXd& u) { (void)u; }
  /// Full-budget re-optimization of the inner problems (stage changes and
  /// certification); refreshes warm starts.
  virtual void refresh(const Eigen::VectorXd& x) = 0;
  /// Exact-semantics slacks and dual reporting at the final point.
  virtual void certify(const Eigen::VectorXd& x, SolveResult& out) = 0;

  void set_sharpness(double c) { ctx_.sharpness = c; }

 protected:
  dro::InnerOptions inner_options(bool full_budget) {
    dro::InnerOptions opts;
    opts.sharpness = ctx_.sharpness;
    opts.robustness = ctx_.cfg->robustness;
    // warm-started hot evaluations rarely need more than a few refinement
    // steps; the full budget is spent at stage changes and certification
    opts.max_iterations = full_budget ? ctx_.cfg->inner_max_iterations
                                      : std::min(ctx_.cfg->inner_max_iterations, 30);
    opts.multistart = full_budget ? ctx_.cfg->inner_multistart_final
                                  : ctx_.cfg->inner_multistart_hot;
    opts.seed = util::SplitMix64::derive(ctx_.cfg->seed, ++seed_counter_);
    return opts;
  }

  ModelContext ctx_;
  std::uint64_t seed_counter_ = 0;
};

// ---------------------------------------------------------------- ECP

// Sample-average ECP constraint with the tube realization theta held fixed
// during each penalty subproblem; update_duals re-minimizes over the tube.
class EcpModel : public ConstraintModel {
 public:
  EcpModel(ModelContext ctx, dro::ThetaAggregate aggregate)
      : ConstraintModel(std::move(ctx)), aggregate_(aggregate) {
    const auto& samples = ctx_.problem->samples.samples;
    const dyn::AugmentedSystem& aug = *ctx_.aug;
    deviations_.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      auto& dev = deviations_[i];
      dev.assign(static_cast<std::size_t>(aug.horizon) + 1, Eigen::VectorXd::Zero(aug.nz));
      for (int k = 0; k < aug.horizon; ++k) {
        Eigen::VectorXd noise = Eigen::VectorXd::Zero(aug.nz);
        noise.head(aug.nx) = samples[i].segment(k * aug.nx, aug.nx);
        dev[static_cast<std::size_t>(k) + 1] =
            aug.a_bar * dev[static_cast<std::size_t>(k)] + noise;
      }
    }
    theta_ = Eigen::VectorXd::Zero(dro::theta_dim(aug));
    w_zero_ = Eigen::VectorXd::Zero(aug.horizon * aug.nx);
  }

  double slack(const Eigen::VectorXd& u, Eigen::VectorXd* grad) override {
    const dyn::AugmentedSystem& aug = *ctx_.aug;
    const int m = static_cast<int>(deviations_.size());
    const stl::Trajectory base = dyn::rollout_flat(aug, u, w_zero_, theta_);
    std::vector<double> values(static_cast<std::size_t>(m));
    std::vector<std::vector<Eigen::VectorXd>> grads;
    if (grad) grads.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      std::vector<Eigen::VectorXd> states = base.states();
      for (std::size_t k = 0; k < states.size(); ++k) states[k] += deviations_[static_cast<std::size_t>(i)][k];
      const stl::Trajectory xi(std::move(states));
      if (grad) {
        const stl::SmoothGradient sg = stl::smooth_robustness_gradient(
            ctx_.pnf, xi, 0, ctx_.sharpness, ctx_.cfg->robustness);
        values[static_cast<std::size_t>(i)] = sg.value;
        grads[static_cast<std::size_t>(i)] = sg.state_gradients;
      } else {
        values[static_cast<std::size_t>(i)] = stl::smooth_robustness(
            ctx_.pnf, xi, 0, ctx_.sharpness, ctx_.cfg->robustness);
      }
    }
    double aggregate = 0.0;
    std::vector<double> weights(static_cast<std::size_t>(m), 1.0 / m);
    if (aggregate_ == dro::ThetaAggregate::Mean) {
      for (const double v : values) aggregate += v;
      aggregate /= m;
      last_eta_ = 0.0;
    } else {
      const risk::LowerCvarResult lc = risk::lower_cvar(values, ctx_.problem->eps);
      aggregate = lc.value;
      weights = lc.weights;
      last_eta_ = lc.eta;
    }
    if (grad) {
      std::vector<Eigen::VectorXd> mixed(static_cast<std::size_t>(aug.horizon) + 1,
                                         Eigen::VectorXd::Zero(aug.nz));
      for (int i = 0; i < m; ++i) {
        const double wgt = weights[static_cast<std::size_t>(i)];
        if (wgt == 0.0) continue;
        for (std::size_t k = 0; k < mixed.size(); ++k) {
          mixed[k] += wgt * grads[static_cast<std::size_t>(i)][k];
        }
      }
      *grad = dyn::pullback_gradient(aug, mixed).u;
    }
    return aggregate - offset();
  }

  void update_duals(const Eigen::VectorXd& u) override {
    const dro::ThetaWorstCase tw = run_theta(u, false);
    theta_ = tw.theta_star;
  }

  void refresh(const Eigen::VectorXd& x) override {
    const dro::ThetaWorstCase tw = run_theta(x, true);
    theta_ = tw.theta_star;
  }

  void certify(const Eigen::VectorXd& x, SolveResult& out) override {
    const dro::ThetaWorstCase tw = run_theta(x, true);
    out.theta_worst = tw.theta_star;
    out.eta = tw.eta;
    const risk::RobustnessEval exact;  // exact semantics
    double value = 0.0;
    if (aggregate_ == dro::ThetaAggregate::Mean) {
      value = risk::ecp_com_constraint(*ctx_.aug, ctx_.pnf, x, tw.theta_star,
                                       ctx_.problem->samples.samples, ctx_.problem->eps,
                                       ctx_.lipschitz, ctx_.problem->r0,
                                       ctx_.problem->profile, exact);
      out.slack_names.push_back("ecp_com_aggregate");
    } else {
      value = risk::ecp_cvar_constraint(*ctx_.aug, ctx_.pnf, x, tw.theta_star,
                                        ctx_.problem->samples.samples, ctx_.problem->eps,
                                        ctx_.problem->r0, exact);
      out.slack_names.push_back("ecp_cvar_aggregate");
    }
    out.slacks.push_back(value);
  }

 private:
  double offset() const {
    return aggregate_ == dro::ThetaAggregate::Mean ? ctx_.margin + ctx_.problem->r0
                                                   : ctx_.problem->r0;
  }

  dro::ThetaWorstCase run_theta(const Eigen::VectorXd& u, bool full) {
    dro::InnerOptions opts = inner_options(full);
    if (theta_.size() > 0) opts.warm_theta = theta_;
    return dro::theta_worst_case(*ctx_.aug, ctx_.pnf, u, ctx_.problem->samples.samples,
                                 aggregate_, ctx_.problem->eps, opts);
  }

  dro::ThetaAggregate aggregate_;
  std::vector<std::vector<Eigen::VectorXd>> deviations_;
  Eigen::VectorXd theta_;
  Eigen::VectorXd w_zero_;
  double last_eta_ = 0.0;
};

// ---------------------------------------------------------------- DRP

// Data-driven robust constraint with per-sample inner argmins (w*, theta*)
// and the transport multiplier lambda held fixed during each penalty
// subproblem. update_duals re-solves the inner infima (warm-started) and
// re-maximizes lambda by golden section; the aggregate is concave in lambda
// because every inner infimum is a pointwise minimum of functions affine in
// lambda.
class DrpModel : public ConstraintModel {
 public:
  DrpModel(ModelContext ctx, bool cvar_route)
      : ConstraintModel(std::move(ctx)), cvar_(cvar_route) {
    const int m = ctx_.problem->samples.count();
    warm_w_.resize(static_cast<std::size_t>(m));
    warm_theta_.resize(static_cast<std::size_t>(m));
    w_star_.assign(static_cast<std::size_t>(m), Eigen::VectorXd());
    theta_star_.assign(static_cast<std::size_t>(m), Eigen::VectorXd());
    transport_.assign(static_cast<std::size_t>(m), 0.0);
    lambda_ = std::clamp(ctx_.cfg->lambda_init >= 0.0 ? ctx_.cfg->lambda_init
                                                      : ctx_.lipschitz,
                         0.0, ctx_.cfg->lambda_max);
    // argmins default to the samples themselves (transport 0)
    for (int i = 0; i < m; ++i) {
      w_star_[static_cast<std::size_t>(i)] =
          ctx_.problem->samples.samples[static_cast<std::size_t>(i)];
      theta_star_[static_cast<std::size_t>(i)] =
          Eigen::VectorXd::Zero(dro::theta_dim(*ctx_.aug));
    }
  }

  double slack(const Eigen::VectorXd& u, Eigen::VectorXd* grad) override {
    const dyn::AugmentedSystem& aug = *ctx_.aug;
    const int m = static_cast<int>(w_star_.size());
    std::vector<double> values(static_cast<std::size_t>(m));
    std::vector<std::vector<Eigen::VectorXd>> grads;
    if (grad) grads.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const stl::Trajectory xi = dyn::rollout_flat(
          aug, u, w_star_[static_cast<std::size_t>(i)], theta_star_[static_cast<std::size_t>(i)]);
      double rho = 0.0;
      if (grad) {
        const stl::SmoothGradient sg = stl::smooth_robustness_gradient(
            ctx_.pnf, xi, 0, ctx_.sharpness, ctx_.cfg->robustness);
        rho = sg.value;
        grads[static_cast<std::size_t>(i)] = sg.state_gradients;
      } else {
        rho = stl::smooth_robustness(ctx_.pnf, xi, 0, ctx_.sharpness,
                                     ctx_.cfg->robustness);
      }
      values[static_cast<std::size_t>(i)] =
          rho + lambda_ * transport_[static_cast<std::size_t>(i)];
    }
    std::vector<double> weights;
    const double aggregate = combine(values, lambda_, &weights);
    if (grad) {
      std::vector<Eigen::VectorXd> mixed(static_cast<std::size_t>(aug.horizon) + 1,
                                         Eigen::VectorXd::Zero(aug.nz));
      for (int i = 0; i < m; ++i) {
        const double wgt = weights[static_cast<std::size_t>(i)];
        if (wgt == 0.0) continue;
        for (std::size_t k = 0; k < mixed.size(); ++k) {
          mixed[k] += wgt * grads[static_cast<std::size_t>(i)][k];
        }
      }
      *grad = dyn::pullback_gradient(aug, mixed).u;
    }
    return aggregate;
  }

  void update_duals(const Eigen::VectorXd& u) override {
    adopt(solve_inner(u, lambda_, false));
    maximize_lambda(u);
  }

  void refresh(const Eigen::VectorXd& x) override {
    adopt(solve_inner(x, lambda_, true));
    maximize_lambda(x);
  }

  double lambda() const { return lambda_; }

  void certify(const Eigen::VectorXd& u, SolveResult& out) override {
    const double lambda = lambda_;
    const std::vector<dro::InnerResult> inner = solve_inner(u, lambda, true);
    adopt(inner);
    const int m = static_cast<int>(inner.size());
    std::vector<double> values(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      values[static_cast<std::size_t>(i)] = inner[static_cast<std::size_t>(i)].value;
    }

    out.lambda = lambda;
    out.slack_names.push_back("lambda_nonneg");
    out.slacks.push_back(lambda);
    if (cvar_) {
      const risk::LowerCvarResult lc = risk::lower_cvar(values, ctx_.problem->eps);
      const double t_star = lc.eta;
      out.eta = -t_star;
      out.y.resize(static_cast<std::size_t>(m));
      double y_mean = 0.0;
      double cap_min = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double yi = std::min(values[static_cast<std::size_t>(i)], t_star);
        out.y[static_cast<std::size_t>(i)] = yi;
        y_mean += yi;
        cap_min = std::min(cap_min, -yi - out.eta);
      }
      y_mean /= m;
      const double aggregate = y_mean - lambda * ctx_.radius +
                               (1.0 - ctx_.problem->eps) * out.eta -
                               ctx_.problem->eps * ctx_.problem->r0;
      out.slack_names.push_back("drp_cvar_aggregate");
      out.slacks.push_back(aggregate);
      out.slack_names.push_back("drp_cvar_cap_min");
      out.slacks.push_back(cap_min);
    } else {
      out.y.assign(values.begin(), values.end());
      double y_mean = 0.0;
      for (const double v : values) y_mean += v;
      y_mean /= m;
      const double aggregate =
          y_mean - lambda * ctx_.radius - ctx_.margin - ctx_.problem->r0;
      out.slack_names.push_back("drp_com_aggregate");
      out.slacks.push_back(aggregate);
    }
    // worst tube realization among the per-sample argmins
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (values[static_cast<std::size_t>(i)] < worst) {
        worst = values[static_cast<std::size_t>(i)];
        out.theta_worst = inner[static_cast<std::size_t>(i)].theta_star;
      }
    }
  }

 private:
  double combine(const std::vector<double>& values, double lambda,
                 std::vector<double>* weights) {
    const int m = static_cast<int>(values.size());
    if (cvar_) {
      const risk::LowerCvarResult lc = risk::lower_cvar(values, ctx_.problem->eps);
      if (weights) *weights = lc.weights;
      last_eta_ = -lc.eta;
      return lc.value - lambda * ctx_.radius / ctx_.problem->eps - ctx_.problem->r0;
    }
    if (weights) weights->assign(static_cast<std::size_t>(m), 1.0 / m);
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= m;
    return mean - lambda * ctx_.radius - ctx_.margin - ctx_.problem->r0;
  }

  void adopt(const std::vector<dro::InnerResult>& inner) {
    for (std::size_t i = 0; i < inner.size(); ++i) {
      w_star_[i] = inner[i].w_star;
      theta_star_[i] = inner[i].theta_star;
      transport_[i] = inner[i].transport;
    }
  }

  double aggregate_at(const std::vector<dro::InnerResult>& inner, double lambda) {
    std::vector<double> values(inner.size());
    for (std::size_t i = 0; i < inner.size(); ++i) values[i] = inner[i].value;
    return combine(values, lambda, nullptr);
  }

  /// d(aggregate)/d(lambda) at a probed lambda: the transport costs weighted
  /// by the aggregation, minus the radius term. A supergradient of the
  /// concave aggregate, so its root is the maximizer and plain bisection
  /// converges to full precision.
  double lambda_derivative(const std::vector<dro::InnerResult>& inner, double lambda) {
    std::vector<double> values(inner.size());
    for (std::size_t i = 0; i < inner.size(); ++i) values[i] = inner[i].value;
    std::vector<double> weights;
    combine(values, lambda, &weights);
    double d = 0.0;
    for (std::size_t i = 0; i < inner.size(); ++i) d += weights[i] * inner[i].transport;
    return d - (cvar_ ? ctx_.radius / ctx_.problem->eps : ctx_.radius);
  }

  void maximize_lambda(const Eigen::VectorXd& u) {
    if (ctx_.radius == 0.0) {
      // zero-radius ball: the aggregate is non-decreasing in lambda; pinning
      // every sample recovers the sample-average program
      lambda_ = std::max(lambda_, std::max(1.0, 2.0 * ctx_.lipschitz));
      adopt(solve_inner(u, lambda_, false));
      return;
    }
    double lo = 0.0;
    double hi = std::min(ctx_.cfg->lambda_max,
                         std::max({1.0, 2.0 * ctx_.lipschitz, 1.5 * lambda_}));
    if (lambda_derivative(solve_inner_light(u, lo), lo) <= 0.0) {
      lambda_ = 0.0;
      adopt(solve_inner(u, lambda_, false));
      return;
    }
    // grow hi until the derivative turns negative (it is -radius for large
    // lambda, so this terminates quickly)
    while (lambda_derivative(solve_inner_light(u, hi), hi) > 0.0 &&
           hi < ctx_.cfg->lambda_max) {
      hi = std::min(2.0 * hi, ctx_.cfg->lambda_max);
    }
    for (int it = 0; it < 40 && hi - lo > 1e-9 * (1.0 + hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (lambda_derivative(solve_inner_light(u, mid), mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    lambda_ = 0.5 * (lo + hi);
    adopt(solve_inner(u, lambda_, false));
  }

  std::vector<dro::InnerResult> solve_inner(const Eigen::VectorXd& u, double lambda,
                                            bool full) {
    return run_inner(u, lambda, full ? ctx_.cfg->inner_multistart_final
                                     : ctx_.cfg->inner_multistart_hot,
                     full ? ctx_.cfg->inner_max_iterations
                          : std::min(ctx_.cfg->inner_max_iterations, 30));
  }

  /// Cheap re-solves for the lambda search: warm start only.
  std::vector<dro::InnerResult> solve_inner_light(const Eigen::VectorXd& u, double lambda) {
    return run_inner(u, lambda, 1, std::min(ctx_.cfg->inner_max_iterations, 12));
  }

  std::vector<dro::InnerResult> run_inner(const Eigen::VectorXd& u, double lambda,
                                          int multistart, int iterations) {
    const auto& samples = ctx_.problem->samples.samples;
    const int m = static_cast<int>(samples.size());
    std::vector<dro::InnerResult> results(static_cast<std::size_t>(m));
    const std::uint64_t base_seed = util::SplitMix64::derive(ctx_.cfg->seed, ++seed_counter_);
    util::parallel_for(m, util::worker_count(), [&](int i) {
      dro::InnerOptions opts;
      opts.sharpness = ctx_.sharpness;
      opts.robustness = ctx_.cfg->robustness;
      opts.max_iterations = iterations;
      opts.multistart = multistart;
      opts.seed = util::SplitMix64::derive(base_seed, static_cast<std::uint64_t>(i));
      if (warm_w_[static_cast<std::size_t>(i)].size() > 0) {
        opts.warm_w = warm_w_[static_cast<std::size_t>(i)];
        opts.warm_theta = warm_theta_[static_cast<std::size_t>(i)];
      }
      results[static_cast<std::size_t>(i)] = dro::inner_inf_com(
          *ctx_.aug, ctx_.pnf, u, lambda, samples[static_cast<std::size_t>(i)], opts);
      warm_w_[static_cast<std::size_t>(i)] = results[static_cast<std::size_t>(i)].w_star;
      warm_theta_[static_cast<std::size_t>(i)] = results[static_cast<std::size_t>(i)].theta_star;
    });
    return results;
  }

  bool cvar_;
  double lambda_ = 0.0;
  std::vector<Eigen::VectorXd> warm_w_;
  std::vector<Eigen::VectorXd> warm_theta_;
  std::vector<Eigen::VectorXd> w_star_;
  std::vector<Eigen::VectorXd> theta_star_;
  std::vector<double> transport_;
  double last_eta_ = 0.0;
};

// ---------------------------------------------------------------- outer loop

struct Objective {
  const RobustSynthesisProblem* problem;
  Eigen::MatrixXd q;
  int nu = 0;
  int n_steps = 0;

  double value(const Eigen::VectorXd& x) const {
    double j = 0.0;
    for (int k = 0; k < n_steps; ++k) {
      const Eigen::VectorXd uk = x.segment(k * nu, nu);
      j += uk.dot(q * uk);
    }
    return j;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (int k = 0; k < n_steps; ++k) {
      const Eigen::VectorXd uk = x.segment(k * nu, nu);
      g.segment(k * nu, nu) = 2.0 * (q * uk);
    }
    return g;
  }
};

/// Stationarity residual of min J s.t. g >= 0 over a box, normalized by the
/// gradient scales so the tolerance carries across problem scalings.
double scaled_kkt_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& jg,
                           const Eigen::VectorXd& gslack, double multiplier,
                           const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& project) {
  const Eigen::VectorXd lagrangian_grad = jg - multiplier * gslack;
  const double raw = (x - project(x - lagrangian_grad)).cwiseAbs().maxCoeff();
  const double scale = 1.0 + jg.cwiseAbs().maxCoeff() +
                       std::abs(multiplier) * gslack.cwiseAbs().maxCoeff();
  return raw / scale;
}

}  // namespace

SolveResult solve(const RobustSynthesisProblem& problem, const SolverConfig& cfg) {
  problem.validate();
  const dyn::AugmentedSystem aug = dyn::build_augmented(problem.system);
  const stl::StlFormula pnf = problem.formula.to_pnf();

  ModelContext ctx;
  ctx.aug = &aug;
  ctx.pnf = pnf;
  ctx.problem = &problem;
  ctx.cfg = &cfg;
  ctx.lipschitz =
      dyn::robustness_lipschitz(pnf, aug, problem.system.horizon, problem.lipschitz_variant);
  ctx.margin = risk::com_margin(problem.eps, ctx.lipschitz, problem.profile);
  ctx.radius = dro::wasserstein_radius(problem.ambiguity, problem.samples.count());

  std::unique_ptr<ConstraintModel> model;
  switch (problem.method) {
    case Method::EcpCom:
      model = std::make_unique<EcpModel>(ctx, dro::ThetaAggregate::Mean);
      break;
    case Method::EcpCvar:
      model = std::make_unique<EcpModel>(ctx, dro::ThetaAggregate::LowerCvar);
      break;
    case Method::DrpCom:
      model = std::make_unique<DrpModel>(ctx, false);
      break;
    case Method::DrpCvar:
      model = std::make_unique<DrpModel>(ctx, true);
      break;
  }

  const int nu = problem.system.input_dim();
  const int n_steps = problem.system.horizon;
  const int udim = nu * n_steps;

  Objective objective;
  objective.problem = &problem;
  objective.nu = nu;
  objective.n_steps = n_steps;
  objective.q = problem.input_weight.size() > 0
                    ? problem.input_weight
                    : Eigen::MatrixXd::Identity(nu, nu);

  Eigen::VectorXd lower(udim), upper(udim);
  const double big = 1e6;
  for (int k = 0; k < n_steps; ++k) {
    for (int j = 0; j < nu; ++j) {
      lower[k * nu + j] = problem.input_lower.size() > 0 ? problem.input_lower[j] : -big;
      upper[k * nu + j] = problem.input_upper.size() > 0 ? problem.input_upper[j] : big;
    }
  }
  auto project = [&](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(x.cwiseMax(lower).cwiseMin(upper));
  };

  Eigen::VectorXd x = project(Eigen::VectorXd::Zero(udim));

  SolveResult result;
  result.lipschitz = ctx.lipschitz;

  auto j_only = [&](const Eigen::VectorXd& xx) { return objective.value(xx); };
  auto j_grad = [&](const Eigen::VectorXd& xx) {
    return Eigen::VectorXd(objective.gradient(xx));
  };

  double mu = 50.0;
  const double mu_max = 1e7;
  double nu_mult = 0.0;
  int iter_total = 0;
  bool infeasible_certified = false;
  double kkt = std::numeric_limits<double>::infinity();
  double violation = std::numeric_limits<double>::infinity();
  double warm_step = 0.0;

  // best feasible iterate seen anywhere (by objective value)
  bool have_feasible = false;
  Eigen::VectorXd best_feasible;
  double best_feasible_obj = std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::VectorXd& xx, double g) {
    if (g >= -cfg.constraint_tol) {
      const double j = j_only(xx);
      if (!have_feasible || j < best_feasible_obj) {
        have_feasible = true;
        best_feasible = xx;
        best_feasible_obj = j;
      }
    }
  };

  // slack ascent with interleaved dual updates; used to enter the feasible
  // set before polishing the objective and as the restoration phase
  auto ascend_slack = [&](int rounds, int iters_per_round) {
    for (int round = 0; round < rounds; ++round) {
      auto raise = [&](const Eigen::VectorXd& xx, Eigen::VectorXd& grad) {
        Eigen::VectorXd gs;
        const double g = model->slack(xx, &gs);
        grad = -gs;
        return -g;
      };
      auto raise_value = [&](const Eigen::VectorXd& xx) {
        return -model->slack(xx, nullptr);
      };
      opt::DescentOptions aopts;
      aopts.max_iterations = iters_per_round;
      aopts.tol = 1e-12;
      const opt::DescentResult run =
          opt::projected_descent(raise, project, x, aopts, raise_value);
      x = run.x;
      model->update_duals(x);
      const double g = model->slack(x, nullptr);
      consider(x, g);
      if (g >= 2.0 * cfg.constraint_tol) break;
    }
  };

  const std::vector<double> stages = smoothing_schedule(cfg);
  for (std::size_t stage = 0; stage < stages.size(); ++stage) {
    model->set_sharpness(stages[stage]);
    model->refresh(x);
    if (model->slack(x, nullptr) < -10.0 * cfg.constraint_tol) {
      ascend_slack(6, cfg.descent_iterations);
    }
    double prev_violation = std::numeric_limits<double>::infinity();
    int stagnant = 0;
    int restorations = 0;
    bool stage_done = false;

    while (iter_total < cfg.max_outer && !stage_done) {
      ++iter_total;
      // duals (theta*, per-sample argmins, lambda) stay fixed inside the
      // subproblem; the slack is then smooth with an envelope gradient
      auto phi = [&](const Eigen::VectorXd& xx, Eigen::VectorXd& grad) {
        Eigen::VectorXd gslack;
        const double g = model->slack(xx, &gslack);
        const double shifted = nu_mult - mu * g;
        grad = j_grad(xx);
        double val = j_only(xx);
        if (shifted > 0.0) {
          val += (shifted * shifted - nu_mult * nu_mult) / (2.0 * mu);
          grad -= shifted * gslack;
        } else {
          val -= nu_mult * nu_mult / (2.0 * mu);
        }
        return val;
      };
      auto phi_value = [&](const Eigen::VectorXd& xx) {
        const double g = model->slack(xx, nullptr);
        const double shifted = nu_mult - mu * g;
        double val = j_only(xx);
        if (shifted > 0.0) {
          val += (shifted * shifted - nu_mult * nu_mult) / (2.0 * mu);
        } else {
          val -= nu_mult * nu_mult / (2.0 * mu);
        }
        return val;
      };

      opt::DescentOptions dopts;
      dopts.max_iterations = cfg.descent_iterations;
      dopts.tol = 1e-10;
      dopts.step_cap = cfg.trust_radius;
      dopts.initial_step = warm_step;
      const Eigen::VectorXd x_prev = x;
      const opt::DescentResult sub =
          opt::projected_descent(phi, project, x, dopts, phi_value);
      x = sub.x;

      // honest measurement: re-optimize the duals at the new iterate first
      model->update_duals(x);
      Eigen::VectorXd gslack;
      const double g_now = model->slack(x, &gslack);
      consider(x, g_now);
      violation = std::max(0.0, -g_now);
      const double nu_hat = std::max(0.0, nu_mult - mu * g_now);
      kkt = scaled_kkt_residual(x, j_grad(x), gslack, nu_hat, project);

      IterationRecord rec;
      rec.iteration = iter_total;
      rec.objective = j_only(x);
      rec.max_violation = violation;
      rec.step_norm = (x - x_prev).norm();
      result.log.push_back(rec);

      if (violation <= cfg.constraint_tol && kkt <= cfg.stationarity_tol) {
        stage_done = true;
        break;
      }
      nu_mult = nu_hat;
      if (violation > 0.7 * prev_violation && violation > cfg.constraint_tol) {
        mu = std::min(mu * 5.0, mu_max);
      }
      stagnant = violation > 0.95 * prev_violation && violation > cfg.constraint_tol
                     ? stagnant + 1
                     : 0;
      prev_violation = violation;
      warm_step = 0.0;  // penalty surface changed; let BB re-estimate

      if (stagnant >= 4 && mu >= mu_max && restorations < 2 && !have_feasible) {
        // last resort: drive the violation down ignoring the objective
        ++restorations;
        stagnant = 0;
        ascend_slack(4, 150);
        const double g_rest = model->slack(x, nullptr);
        if (std::max(0.0, -g_rest) > cfg.constraint_tol && restorations >= 2) {
          infeasible_certified = true;
          stage_done = true;
          violation = std::max(0.0, -g_rest);
          break;
        }
      }
    }
    if (infeasible_certified) break;
  }

  // fall back to the best feasible iterate when the last one drifted out
  if (have_feasible) {
    model->update_duals(x);
    const double g_last = model->slack(x, nullptr);
    if (g_last < -cfg.constraint_tol || j_only(x) > best_feasible_obj) {
      x = best_feasible;
    }
  }

  // Boundary polish: ride the active constraint surface with least-squares
  // multipliers until the stationarity certificate holds. Correction steps
  // restore g ~ 0, tangential steps reduce J.
  {
    model->update_duals(x);
    for (int it = 0; it < 80; ++it) {
      Eigen::VectorXd gslack;
      const double g = model->slack(x, &gslack);
      consider(x, g);
      const double gnorm2 = gslack.squaredNorm();
      if (g < -0.5 * cfg.constraint_tol && gnorm2 > 1e-16) {
        x = project(x + ((-g + 0.25 * cfg.constraint_tol) / gnorm2) * gslack);
        model->update_duals(x);
        continue;
      }
      const Eigen::VectorXd jg = j_grad(x);
      const double nu_ls =
          gnorm2 > 1e-16 ? std::max(0.0, jg.dot(gslack) / gnorm2) : 0.0;
      kkt = scaled_kkt_residual(x, jg, gslack, nu_ls, project);
      if (kkt <= 0.5 * cfg.stationarity_tol) break;
      const Eigen::VectorXd direction = -(jg - nu_ls * gslack);
      // exact-penalty merit keeps the line search from trading feasibility
      const double merit_weight = 10.0 * (1.0 + nu_ls);
      auto merit = [&](const Eigen::VectorXd& xx) {
        const double gg = model->slack(xx, nullptr);
        return j_only(xx) + merit_weight * std::max(0.0, -gg);
      };
      const double m0 = j_only(x) + merit_weight * std::max(0.0, -g);
      double alpha = 1.0 / (1.0 + direction.cwiseAbs().maxCoeff());
      bool moved = false;
      for (int bt = 0; bt < 20; ++bt) {
        const Eigen::VectorXd cand = project(x + alpha * direction);
        if ((cand - x).norm() < 1e-14) break;
        if (merit(cand) < m0 - 1e-12) {
          x = cand;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
      model->update_duals(x);
    }
    const double g_end = model->slack(x, nullptr);
    consider(x, g_end);
    if (have_feasible && (g_end < -cfg.constraint_tol || j_only(x) > best_feasible_obj)) {
      x = best_feasible;
      model->update_duals(x);
    }
  }

  // final certification against exact semantics, independent of the path
  model->refresh(x);
  double g_final = model->slack(x, nullptr);
  if (g_final < -cfg.constraint_tol) {
    // the full-budget dual refresh found a worse realization; push back in
    ascend_slack(3, 150);
    g_final = model->slack(x, nullptr);
  }
  Eigen::VectorXd gslack;
  g_final = model->slack(x, &gslack);
  result.smooth_violation = std::max(0.0, -g_final);
  const Eigen::VectorXd jg_final = j_grad(x);
  const double gnorm2 = gslack.squaredNorm();
  const double nu_final =
      gnorm2 > 1e-16 ? std::max(0.0, jg_final.dot(gslack) / gnorm2) : 0.0;
  result.kkt_residual = scaled_kkt_residual(x, jg_final, gslack, nu_final, project);

  result.u_flat = x;
  for (int k = 0; k < n_steps; ++k) {
    result.u.push_back(result.u_flat.segment(k * nu, nu));
  }
  result.objective = j_only(x);
  model->certify(x, result);

  // Status from the exact-semantics slacks (the smooth path is only the
  // search vehicle; exact >= smooth makes its feasibility the weaker claim).
  const double exact_min = result.min_slack();
  const bool feasible_exact = exact_min >= -cfg.constraint_tol;
  if (feasible_exact && result.kkt_residual <= cfg.stationarity_tol) {
    result.status = SolveStatus::Optimal;
  } else if (feasible_exact) {
    result.status = SolveStatus::FeasibleNotConverged;
  } else if (infeasible_certified) {
    result.status = SolveStatus::Infeasible;
  } else if (iter_total >= cfg.max_outer) {
    result.status = SolveStatus::BudgetExhausted;
  } else {
    result.status = SolveStatus::Infeasible;
  }
  return result;
}

}  // namespace stldro::solver
