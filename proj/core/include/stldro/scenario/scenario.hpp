#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "stldro/solver/problem.hpp"
#include "stldro/stl/parser.hpp"

namespace stldro::scenario {

class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo section of the scenario file.
struct MonteCarloConfig {
  int trials = 200;
  std::uint64_t seed = 0;
};

/// Parsed scenario document. All stochastic steps carry explicit seeds; the
/// canonical hash covers every field that influences outputs.
struct ScenarioFile {
  std::string name;
  dyn::LinearMultiAgentSystem system;
  stl::PredicateRegistry predicates;
  std::string formula_text;
  stl::StlFormula formula = stl::StlFormula::truth();
  double epsilon = 0.1;
  double r0 = 0.0;
  double beta = 0.05;
  risk::DistributionProfile profile;
  double noise_scale = 1.0;
  // data section
  int sample_count = 0;
  std::uint64_t data_seed = 0;
  std::string sample_path;  // non-empty: load samples from CSV instead
  dro::AmbiguityConfig ambiguity;
  solver::Method method = solver::Method::EcpCom;
  Eigen::MatrixXd objective_q;            // empty -> identity
  Eigen::VectorXd input_lower, input_upper;
  solver::SolverConfig solver_config;
  dyn::LipschitzVariant lipschitz_variant = dyn::LipschitzVariant::FullMatrix;
  MonteCarloConfig montecarlo;

  /// FNV-1a of the canonical re-serialized document.
  std::string config_hash;
};

/// Loads and schema-validates a scenario JSON file. Throws SchemaError with
/// a field path on any problem.
ScenarioFile load_scenario(const std::string& path);
ScenarioFile parse_scenario(const std::string& json_text);

/// Draws (or loads) the empirical disturbance data declared by the scenario.
dro::EmpiricalDistribution scenario_samples(const ScenarioFile& scn,
                                            const dyn::AugmentedSystem& aug);

/// Assembles the synthesis problem, optionally overriding the method.
solver::RobustSynthesisProblem make_problem(
    const ScenarioFile& scn, std::optional<solver::Method> method_override = {});

}  // namespace stldro::scenario
