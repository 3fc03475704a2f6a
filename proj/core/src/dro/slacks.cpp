#include "stldro/dro/slacks.hpp"

#include "stldro/util/parallel.hpp"
#include "stldro/util/rng.hpp"

namespace stldro::dro {

void DualVariables::validate(bool cvar_route) const {
  if (lambda < 0.0) throw InvalidArgumentError("duals: lambda must be >= 0");
  if (cvar_route) {
    for (const double yi : y) {
      if (yi + eta > 1e-9) {
        throw InvalidArgumentError("duals: CVaR route requires y_i + eta <= 0");
      }
    }
  }
}

namespace {

std::vector<InnerResult> solve_inner(const dyn::AugmentedSystem& aug,
                                     const stl::StlFormula& pnf,
                                     const Eigen::VectorXd& u_flat, double lambda,
                                     const EmpiricalDistribution& emp,
                                     const InnerOptions& opts) {
  emp.validate();
  const int m = emp.count();
  std::vector<InnerResult> results(static_cast<std::size_t>(m));
  util::parallel_for(m, util::worker_count(), [&](int i) {
    InnerOptions per = opts;
    per.seed = util::SplitMix64::derive(opts.seed, static_cast<std::uint64_t>(i));
    results[static_cast<std::size_t>(i)] = inner_inf_com(
        aug, pnf, u_flat, lambda, emp.samples[static_cast<std::size_t>(i)], per);
  });
  return results;
}

}  // namespace

DrpSlacks drp_com_slack(const dyn::AugmentedSystem& aug, const stl::StlFormula& pnf,
                        const Eigen::VectorXd& u_flat, const DualVariables& dual,
                        const EmpiricalDistribution& emp, double radius, double eps,
                        double lipschitz, double r0,
                        const risk::DistributionProfile& profile,
                        const InnerOptions& opts) {
  dual.validate(false);
  if (static_cast<int>(dual.y.size()) != emp.count()) {
    throw InvalidArgumentError("drp_com_slack: y must have one entry per sample");
  }
  DrpSlacks out;
  out.inner_results = solve_inner(aug, pnf, u_flat, dual.lambda, emp, opts);
  double y_mean = 0.0;
  for (int i = 0; i < emp.count(); ++i) {
    out.inner.push_back(out.inner_results[static_cast<std::size_t>(i)].value -
                        dual.y[static_cast<std::size_t>(i)]);
    y_mean += dual.y[static_cast<std::size_t>(i)];
  }
  y_mean /= emp.count();
  out.aggregate =
      y_mean - dual.lambda * radius - risk::com_margin(eps, lipschitz, profile) - r0;
  return out;
}

DrpSlacks drp_cvar_slack(const dyn::AugmentedSystem& aug, const stl::StlFormula& pnf,
                         const Eigen::VectorXd& u_flat, const DualVariables& dual,
                         const EmpiricalDistribution& emp, double radius, double eps,
                         double r0, const InnerOptions& opts) {
  dual.validate(true);
  if (static_cast<int>(dual.y.size()) != emp.count()) {
    throw InvalidArgumentError("drp_cvar_slack: y must have one entry per sample");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InvalidArgumentError("drp_cvar_slack: eps must lie in (0,1)");
  }
  DrpSlacks out;
  out.inner_results = solve_inner(aug, pnf, u_flat, dual.lambda, emp, opts);
  double y_mean = 0.0;
  for (int i = 0; i < emp.count(); ++i) {
    const double yi = dual.y[static_cast<std::size_t>(i)];
    out.inner.push_back(out.inner_results[static_cast<std::size_t>(i)].value - yi);
    out.cap.push_back(-yi - dual.eta);
    y_mean += yi;
  }
  y_mean /= emp.count();
  out.aggregate =
      y_mean - dual.lambda * radius + (1.0 - eps) * dual.eta - eps * r0;
  return out;
}

}  // namespace stldro::dro
