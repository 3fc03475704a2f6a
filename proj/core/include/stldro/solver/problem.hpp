#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stldro/dro/ambiguity.hpp"
#include "stldro/dro/empirical.hpp"
#include "stldro/dynamics/lipschitz.hpp"
#include "stldro/risk/concentration.hpp"
#include "stldro/stl/robustness.hpp"

namespace stldro::solver {

enum class Method { EcpCom, EcpCvar, DrpCom, DrpCvar };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/// Synthesis problem over decision variables (u, lambda, y, eta):
/// minimize J(u) = sum_k u_k' Q u_k subject to the STL chance constraint in
/// one of its four tightened forms.
struct RobustSynthesisProblem {
  dyn::LinearMultiAgentSystem system;
  stl::StlFormula formula = stl::StlFormula::truth();
  double r0 = 0.0;        // robustness level
  double eps = 0.1;       // violation tolerance
  Eigen::MatrixXd input_weight;             // Q_u (psd); empty -> identity
  Eigen::VectorXd input_lower, input_upper; // per-step box; empty -> +-1e6
  Method method = Method::EcpCom;
  dro::EmpiricalDistribution samples;
  dro::AmbiguityConfig ambiguity;
  risk::DistributionProfile profile;
  dyn::LipschitzVariant lipschitz_variant = dyn::LipschitzVariant::FullMatrix;

  void validate() const;
};

struct SolverConfig {
  double constraint_tol = 1e-6;
  double stationarity_tol = 1e-5;
  int max_outer = 500;                 // total penalty iterations across stages
  std::vector<double> cs_schedule;     // empty -> {5, 20, 80}
  std::uint64_t seed = 1;
  int inner_multistart_hot = 2;        // starts per inner problem while iterating
  int inner_multistart_final = 0;      // 0 -> full 1 + 2*(N*n_x) budget at certification
  int inner_max_iterations = 200;
  int descent_iterations = 60;         // per penalty subproblem
  double trust_radius = 0.0;           // step-norm cap inside subproblems, 0 = off
  double lambda_max = 1e6;
  double lambda_init = -1.0;           // < 0 -> L_phi
  stl::RobustnessOptions robustness;
};

enum class SolveStatus { Optimal, FeasibleNotConverged, Infeasible, BudgetExhausted };

std::string status_name(SolveStatus s);

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double max_violation = 0.0;
  double step_norm = 0.0;
};

struct SolveResult {
  Eigen::VectorXd u_flat;              // N*n_u
  std::vector<Eigen::VectorXd> u;      // per step
  double lambda = 0.0;                 // DRP routes
  std::vector<double> y;               // DRP routes (eliminated analytically)
  double eta = 0.0;                    // CVaR routes
  double objective = 0.0;
  SolveStatus status = SolveStatus::BudgetExhausted;
  /// Exact-semantics slacks recomputed from u_flat after the solve, not
  /// taken from solver internals.
  std::vector<std::string> slack_names;
  std::vector<double> slacks;
  double kkt_residual = 0.0;
  double smooth_violation = 0.0;
  double lipschitz = 0.0;              // L_phi used by the CoM margins
  Eigen::VectorXd theta_worst;         // worst tube realization found
  std::vector<IterationRecord> log;

  double min_slack() const;
};

}  // namespace stldro::solver
