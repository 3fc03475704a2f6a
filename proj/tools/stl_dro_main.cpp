// stl-dro: scenario-driven synthesis and validation for stochastic agents
// under signal temporal logic constraints.
//
// Exit codes: 0 success, 2 scenario/schema error, 3 infeasible,
// 4 budget exhausted, 1 anything else.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stldro/scenario/runner.hpp"

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;

int status_exit_code(stldro::solver::SolveStatus status) {
  switch (status) {
    case stldro::solver::SolveStatus::Optimal:
    case stldro::solver::SolveStatus::FeasibleNotConverged:
      return 0;
    case stldro::solver::SolveStatus::Infeasible:
      return kExitInfeasible;
    case stldro::solver::SolveStatus::BudgetExhausted:
      return kExitBudget;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust STL control synthesis"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::string sweep_text = "epsilon=0.05:0.95:19";
  std::string bundle_dir;
  std::string method_name;
  int trials = -1;
  long long seed = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--out", out_dir, "Output directory");
  };

  CLI::App* feasible = app.add_subcommand(
      "feasible-domain", "Closed-form feasible-set sweep for scalar scenarios");
  add_common(feasible);
  feasible->add_option("--sweep", sweep_text, "Sweep spec var=lo:hi:steps");

  CLI::App* solve = app.add_subcommand("solve", "Synthesize a control sequence");
  add_common(solve);
  solve->add_option("--method", method_name,
                    "Override the scenario method (ecp-com|ecp-cvar|drp-com|drp-cvar)");

  CLI::App* mc = app.add_subcommand("monte-carlo", "Validate a solved bundle");
  add_common(mc);
  mc->add_option("--bundle", bundle_dir, "Directory holding result.json")->required();
  mc->add_option("--trials", trials, "Number of trials (default from scenario)");
  mc->add_option("--seed", seed, "Seed override");

  CLI::App* lip = app.add_subcommand("lipschitz", "Report L1, L2, and L_phi");
  add_common(lip);

  CLI11_PARSE(app, argc, argv);

  try {
    const stldro::scenario::ScenarioFile scn = stldro::scenario::load_scenario(scenario_path);

    if (feasible->parsed()) {
      const auto spec = stldro::scenario::SweepSpec::parse(sweep_text);
      const auto result = stldro::scenario::run_feasible_domain(scn, spec, out_dir);
      std::cout << "feasible-domain: " << result.rows.size() << " rows -> " << out_dir
                << "/feasible_domain.csv\n";
      if (result.crossover) {
        std::cout << "crossover " << spec.variable << " = " << *result.crossover << "\n";
      }
      return 0;
    }

    if (solve->parsed()) {
      std::optional<stldro::solver::Method> method;
      if (!method_name.empty()) method = stldro::solver::method_from_name(method_name);
      const auto bundle = stldro::scenario::run_solve(scn, out_dir, method);
      std::cout << "solve [" << bundle.method
                << "]: status=" << stldro::solver::status_name(bundle.result.status)
                << " objective=" << bundle.result.objective
                << " min_slack=" << bundle.result.min_slack() << " -> " << out_dir << "\n";
      return status_exit_code(bundle.result.status);
    }

    if (mc->parsed()) {
      std::optional<int> trials_opt;
      if (trials > 0) trials_opt = trials;
      std::optional<std::uint64_t> seed_opt;
      if (seed >= 0) seed_opt = static_cast<std::uint64_t>(seed);
      const auto summary =
          stldro::scenario::run_monte_carlo(scn, bundle_dir, out_dir, trials_opt, seed_opt);
      std::cout << "monte-carlo: " << summary.satisfied << "/" << summary.trials
                << " satisfied (rate " << summary.satisfaction_rate << ") -> " << out_dir
                << "\n";
      return 0;
    }

    if (lip->parsed()) {
      const auto report = stldro::scenario::run_lipschitz(scn, out_dir);
      std::cout << "L1 = " << report.l1 << "\nL2 = " << report.l2
                << "\nL_phi = " << report.l_phi << "\n";
      std::cout << "|Abar^i| =";
      for (const double n : report.power_norms) std::cout << " " << n;
      std::cout << "\n";
      return 0;
    }
  } catch (const stldro::scenario::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const stldro::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
