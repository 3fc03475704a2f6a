#include "stldro/risk/ecp.hpp"

namespace stldro::risk {

std::vector<double> sample_robustness(const dyn::AugmentedSystem& aug,
                                      const stl::StlFormula& formula,
                                      const Eigen::VectorXd& u_flat,
                                      const std::vector<Eigen::VectorXd>& w_samples,
                                      const Eigen::VectorXd& theta_flat,
                                      const RobustnessEval& eval) {
  if (w_samples.empty()) throw InvalidArgumentError("sample_robustness: M >= 1 required");
  std::vector<double> rho;
  rho.reserve(w_samples.size());
  for (const auto& w : w_samples) {
    const stl::Trajectory xi = dyn::rollout_flat(aug, u_flat, w, theta_flat);
    rho.push_back(eval.smooth
                      ? stl::smooth_robustness(formula, xi, 0, eval.sharpness, eval.options)
                      : stl::robustness(formula, xi, 0, eval.options));
  }
  return rho;
}

double ecp_com_constraint(const dyn::AugmentedSystem& aug, const stl::StlFormula& formula,
                          const Eigen::VectorXd& u_flat,
                          const Eigen::VectorXd& theta_flat,
                          const std::vector<Eigen::VectorXd>& w_samples, double eps,
                          double lipschitz, double r0,
                          const DistributionProfile& profile,
                          const RobustnessEval& eval) {
  const std::vector<double> rho =
      sample_robustness(aug, formula, u_flat, w_samples, theta_flat, eval);
  double mean = 0.0;
  for (const double r : rho) mean += r;
  mean /= static_cast<double>(rho.size());
  return mean - com_margin(eps, lipschitz, profile) - r0;
}

double ecp_cvar_constraint(const dyn::AugmentedSystem& aug, const stl::StlFormula& formula,
                           const Eigen::VectorXd& u_flat,
                           const Eigen::VectorXd& theta_flat,
                           const std::vector<Eigen::VectorXd>& w_samples, double eps,
                           double r0, const RobustnessEval& eval) {
  const std::vector<double> rho =
      sample_robustness(aug, formula, u_flat, w_samples, theta_flat, eval);
  return lower_cvar(rho, eps).value - r0;
}

}  // namespace stldro::risk
