#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stldro/scenario/scenario.hpp"
#include "stldro/solver/solve.hpp"

namespace stldro::scenario {

/// Sweep request for the feasible-domain command: variable is "epsilon" or
/// "r", swept over `steps` evenly spaced grid points in [lo, hi].
struct SweepSpec {
  std::string variable = "epsilon";
  double lo = 0.05;
  double hi = 0.95;
  int steps = 19;

  static SweepSpec parse(const std::string& text);  // "epsilon=0.05:0.95:19"
};

struct SweepRow {
  double value = 0.0;
  double ccp = 0.0;
  double com = 0.0;
  double cvar = 0.0;
  double drp_com = 0.0;
  double drp_cvar = 0.0;
};

struct SweepResult {
  SweepSpec spec;
  double fixed_radius = 0.0;   // radius used when sweeping epsilon
  double fixed_epsilon = 0.0;  // epsilon used when sweeping r
  std::vector<SweepRow> rows;
  /// Where drp_com == drp_cvar, with the exact-mean oracle and with the
  /// scenario's finite sample set.
  std::optional<double> crossover;
  std::optional<double> crossover_finite_m;
};

/// Closed-form feasible-set sweep for the scalar warm-up scenario; writes
/// feasible_domain.csv and crossovers.csv under out_dir. Requires a scenario
/// with a one-dimensional decision (N * n_u == 1).
SweepResult run_feasible_domain(const ScenarioFile& scn, const SweepSpec& sweep,
                                const std::string& out_dir);

struct SolveBundle {
  solver::SolveResult result;
  std::string method;
  std::string out_dir;
};

/// Synthesis run: solves the scenario and persists result.json,
/// iterations.csv, u_star.csv, nominal_trajectory.csv, and ellipsoids.csv.
SolveBundle run_solve(const ScenarioFile& scn, const std::string& out_dir,
                      std::optional<solver::Method> method_override = {});

struct MonteCarloSummary {
  int trials = 0;
  int satisfied = 0;
  int failures = 0;
  double satisfaction_rate = 0.0;
  double mean_robustness = 0.0;
  double min_robustness = 0.0;
};

/// Validation run from a previously written bundle: simulates fresh
/// disturbances with boundary-sampled tube realizations and writes
/// trials.csv, distance.csv, and summary.json.
MonteCarloSummary run_monte_carlo(const ScenarioFile& scn, const std::string& bundle_dir,
                                  const std::string& out_dir,
                                  std::optional<int> trials_override = {},
                                  std::optional<std::uint64_t> seed_override = {});

struct LipschitzReport {
  double l1 = 0.0;
  double l2 = 0.0;
  double l_phi = 0.0;
  std::vector<double> power_norms;
};

/// Writes lipschitz.json and returns the constants.
LipschitzReport run_lipschitz(const ScenarioFile& scn, const std::string& out_dir);

}  // namespace stldro::scenario
