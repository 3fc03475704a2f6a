#include "stldro/dynamics/lipschitz.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace stldro::dyn {

namespace {

double power_iteration_norm(const Eigen::MatrixXd& m) {
  // sigma_max(M)^2 is the dominant eigenvalue of M'M; deterministic start.
  const Eigen::MatrixXd gram = m.transpose() * m;
  const int n = static_cast<int>(gram.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int i = 0; i < n; ++i) v[i] += 1e-3 * std::sin(static_cast<double>(i + 1));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd next = gram * v;
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    next /= norm;
    const double lambda_next = next.dot(gram * next);
    if (std::abs(lambda_next - lambda) <= 1e-10 * std::max(1.0, std::abs(lambda_next))) {
      lambda = lambda_next;
      break;
    }
    lambda = lambda_next;
    v = next;
  }
  return std::sqrt(std::max(0.0, lambda));
}

}  // namespace

double induced_two_norm(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (m.rows() <= 64 && m.cols() <= 64) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
  }
  return power_iteration_norm(m);
}

std::vector<double> power_norms(const AugmentedSystem& aug, int n_steps,
                                LipschitzVariant variant) {
  if (n_steps < 1) throw InvalidArgumentError("trajectory lipschitz needs N >= 1");
  std::vector<double> norms;
  norms.reserve(static_cast<std::size_t>(n_steps));
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(aug.nz, aug.nz);
  for (int i = 0; i < n_steps; ++i) {
    if (variant == LipschitzVariant::FullMatrix) {
      norms.push_back(induced_two_norm(power));
    } else {
      norms.push_back(induced_two_norm(power.leftCols(aug.nx)));
    }
    power = aug.a_bar * power;
  }
  return norms;
}

double trajectory_lipschitz(const AugmentedSystem& aug, int n_steps,
                            LipschitzVariant variant) {
  double sum = 0.0;
  for (const double n : power_norms(aug, n_steps, variant)) sum += n * n;
  return std::sqrt(sum);
}

double robustness_lipschitz(const stl::StlFormula& f, const AugmentedSystem& aug,
                            int n_steps, LipschitzVariant variant) {
  return f.max_predicate_lipschitz() * trajectory_lipschitz(aug, n_steps, variant);
}

}  // namespace stldro::dyn
