#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include <Eigen/Core>

namespace stldro::opt {

struct DescentOptions {
  int max_iterations = 200;
  double tol = 1e-9;
  double armijo = 1e-4;
  int max_backtracks = 40;
  double initial_step = 0.0;  // 0 -> 1/(1+|g|)
  double step_cap = 0.0;      // trust-region style cap on |x_new - x|, 0 = off
};

struct DescentResult {
  Eigen::VectorXd x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Projected gradient descent with Barzilai-Borwein steps and Armijo
/// backtracking. `value_and_grad` fills the gradient and returns the value;
/// `value_only` (when given) is used for line-search probes; `project` maps
/// onto the feasible set and must be the identity on it.
inline DescentResult projected_descent(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& value_and_grad,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& project,
    const Eigen::VectorXd& x0, const DescentOptions& opts = {},
    const std::function<double(const Eigen::VectorXd&)>& value_only = {}) {
  auto probe = [&](const Eigen::VectorXd& x) {
    if (value_only) return value_only(x);
    Eigen::VectorXd scratch(x.size());
    return value_and_grad(x, scratch);
  };

  DescentResult res;
  Eigen::VectorXd x = project(x0);
  Eigen::VectorXd g(x.size());
  double f = value_and_grad(x, g);
  double step = opts.initial_step > 0.0 ? opts.initial_step : 1.0 / (1.0 + g.norm());

  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    Eigen::VectorXd d = project(x - step * g) - x;
    if (opts.step_cap > 0.0 && d.norm() > opts.step_cap) {
      d *= opts.step_cap / d.norm();
    }
    const double dnorm = d.norm();
    if (dnorm <= opts.tol * (1.0 + x.norm())) {
      res.converged = true;
      break;
    }
    const double slope = g.dot(d);
    double alpha = 1.0;
    Eigen::VectorXd x_new;
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      x_new = project(x + alpha * d);
      f_new = probe(x_new);
      if (f_new <= f + opts.armijo * alpha * slope || f_new < f - 1e-16 * std::abs(f)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // no descent direction survives backtracking (kink or flat region)
      res.converged = dnorm <= 1e-6 * (1.0 + x.norm());
      break;
    }
    Eigen::VectorXd g_new(x.size());
    const double f_check = value_and_grad(x_new, g_new);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-16) {
      step = std::clamp(s.squaredNorm() / sy, 1e-10, 1e10);
    } else {
      step = std::min(step * 2.0, 1e10);
    }
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_check;
  }
  res.x = std::move(x);
  res.value = f;
  return res;
}

}  // namespace stldro::opt
