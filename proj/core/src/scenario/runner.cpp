#include "stldro/scenario/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "stldro/dro/scalar_oracles.hpp"
#include "stldro/dynamics/lipschitz.hpp"
#include "stldro/risk/ecp.hpp"
#include "stldro/util/parallel.hpp"
#include "stldro/util/rng.hpp"

#ifndef STLDRO_VERSION
#define STLDRO_VERSION "0.0.0"
#endif

namespace stldro::scenario {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::string& dir, const std::string& file) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + file;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json metadata_json(const ScenarioFile& scn) {
  json meta;
  meta["config_hash"] = scn.config_hash;
  meta["version"] = STLDRO_VERSION;
  meta["scenario"] = scn.name;
  return meta;
}

/// Per-step outer bound on the tube-induced position uncertainty of every
/// uncontrollable agent: a ball around the nominal y^i_k with radius
/// sum over sources of |block of Abar^power| * tube radius.
struct EllipsoidRow {
  int step = 0;
  int agent = 0;
  Eigen::VectorXd center;
  double radius = 0.0;
};

double tube_radius_bound(const dyn::SupportSet& tube) {
  if (tube.kind() == dyn::SupportSet::Kind::Ball) return tube.radius();
  return 0.5 * (tube.upper() - tube.lower()).norm();
}

std::vector<EllipsoidRow> uncertainty_ellipsoids(const dyn::AugmentedSystem& aug,
                                                 const stl::Trajectory& nominal) {
  std::vector<EllipsoidRow> rows;
  const int n_agents = static_cast<int>(aug.agent_dims.size());
  if (n_agents == 0) return rows;
  std::vector<Eigen::MatrixXd> powers(static_cast<std::size_t>(aug.horizon) + 1);
  powers[0] = Eigen::MatrixXd::Identity(aug.nz, aug.nz);
  for (int i = 1; i <= aug.horizon; ++i) powers[static_cast<std::size_t>(i)] = aug.a_bar * powers[static_cast<std::size_t>(i - 1)];

  for (int k = 0; k <= aug.horizon; ++k) {
    for (int i = 0; i < n_agents; ++i) {
      const int ri = aug.agent_offsets[static_cast<std::size_t>(i)];
      const int ni = aug.agent_dims[static_cast<std::size_t>(i)];
      double radius = 0.0;
      for (int l = 0; l < k; ++l) {
        for (int j = 0; j < n_agents; ++j) {
          const int rj = aug.agent_offsets[static_cast<std::size_t>(j)];
          const int nj = aug.agent_dims[static_cast<std::size_t>(j)];
          const Eigen::MatrixXd block =
              powers[static_cast<std::size_t>(k - l - 1)].block(ri, rj, ni, nj);
          radius += dyn::induced_two_norm(block) *
                    tube_radius_bound(aug.tubes[static_cast<std::size_t>(j)]);
        }
      }
      EllipsoidRow row;
      row.step = k;
      row.agent = i;
      row.center = nominal.state(k).segment(ri, ni);
      row.radius = radius;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

double min_agent_distance(const dyn::AugmentedSystem& aug, const Eigen::VectorXd& z) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < aug.agent_dims.size(); ++i) {
    const int ni = aug.agent_dims[i];
    const int common = std::min(aug.nx, ni);
    const double d =
        (z.head(common) - z.segment(aug.agent_offsets[i], common)).norm();
    if (std::isnan(best) || d < best) best = d;
  }
  return best;
}

}  // namespace

SweepSpec SweepSpec::parse(const std::string& text) {
  SweepSpec spec;
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw SchemaError("sweep: expected var=lo:hi:steps");
  spec.variable = text.substr(0, eq);
  if (spec.variable != "epsilon" && spec.variable != "r") {
    throw SchemaError("sweep: variable must be 'epsilon' or 'r'");
  }
  const std::string rest = text.substr(eq + 1);
  double lo = 0.0, hi = 0.0;
  int steps = 0;
  if (std::sscanf(rest.c_str(), "%lf:%lf:%d", &lo, &hi, &steps) != 3 || steps < 2 ||
      !(lo < hi)) {
    throw SchemaError("sweep: expected var=lo:hi:steps with lo < hi and steps >= 2");
  }
  spec.lo = lo;
  spec.hi = hi;
  spec.steps = steps;
  return spec;
}

SweepResult run_feasible_domain(const ScenarioFile& scn, const SweepSpec& sweep,
                                const std::string& out_dir) {
  if (scn.system.horizon * scn.system.input_dim() != 1) {
    throw SchemaError(
        "feasible-domain: closed-form mode needs a scalar decision (N * n_u == 1)");
  }
  const dyn::AugmentedSystem aug = dyn::build_augmented(scn.system);
  const dro::EmpiricalDistribution emp = scenario_samples(scn, aug);
  const double sample_mean = emp.mean().mean();
  const double radius = dro::wasserstein_radius(scn.ambiguity, emp.count());

  SweepResult out;
  out.spec = sweep;
  out.fixed_radius = radius;
  out.fixed_epsilon = scn.epsilon;

  for (int i = 0; i < sweep.steps; ++i) {
    const double v = sweep.lo + (sweep.hi - sweep.lo) * i / (sweep.steps - 1);
    SweepRow row;
    row.value = v;
    const double eps = sweep.variable == "epsilon" ? v : scn.epsilon;
    const double r = sweep.variable == "r" ? v : radius;
    row.ccp = dro::scalar_ccp_bound(eps);
    row.com = dro::scalar_com_bound(eps, sample_mean);
    row.cvar = dro::scalar_cvar_bound(eps);
    row.drp_com = dro::scalar_drp_com_bound(r, eps, sample_mean);
    row.drp_cvar = dro::scalar_drp_cvar_bound(r, eps);
    out.rows.push_back(row);
  }

  std::vector<double> flat_samples;
  for (const auto& s : emp.samples) flat_samples.push_back(s[0]);
  auto finite_m_gap = [&](double eps, double r) {
    return dro::scalar_drp_com_bound(r, eps, sample_mean) -
           dro::scalar_drp_cvar_bound_samples(r, eps, flat_samples);
  };
  if (sweep.variable == "epsilon") {
    const double hi = std::min(sweep.hi, 0.99);
    out.crossover = dro::drp_crossover_in_eps(radius, sweep.lo, hi);
    out.crossover_finite_m = dro::find_crossover(
        sweep.lo, hi, [&](double eps) { return finite_m_gap(eps, radius); });
  } else {
    out.crossover = dro::drp_crossover_in_radius(scn.epsilon, sweep.lo, sweep.hi);
    out.crossover_finite_m = dro::find_crossover(
        sweep.lo, sweep.hi, [&](double r) { return finite_m_gap(scn.epsilon, r); });
  }

  std::ofstream csv = open_out(out_dir, "feasible_domain.csv");
  csv << sweep.variable << ",ccp_bound,com_bound,cvar_bound,drp_com_bound,drp_cvar_bound\n";
  for (const auto& row : out.rows) {
    csv << fmt(row.value) << "," << fmt(row.ccp) << "," << fmt(row.com) << ","
        << fmt(row.cvar) << "," << fmt(row.drp_com) << "," << fmt(row.drp_cvar) << "\n";
  }

  std::ofstream cx = open_out(out_dir, "crossovers.csv");
  cx << "variable,oracle,value\n";
  if (out.crossover) cx << sweep.variable << ",exact-mean," << fmt(*out.crossover) << "\n";
  if (out.crossover_finite_m) {
    cx << sweep.variable << ",finite-M," << fmt(*out.crossover_finite_m) << "\n";
  }
  return out;
}

SolveBundle run_solve(const ScenarioFile& scn, const std::string& out_dir,
                      std::optional<solver::Method> method_override) {
  const solver::RobustSynthesisProblem problem = make_problem(scn, method_override);
  const solver::SolveResult res = solver::solve(problem, scn.solver_config);
  const dyn::AugmentedSystem aug = dyn::build_augmented(scn.system);

  SolveBundle bundle;
  bundle.result = res;
  bundle.method = solver::method_name(problem.method);
  bundle.out_dir = out_dir;

  // result.json
  json j;
  j["metadata"] = metadata_json(scn);
  j["method"] = bundle.method;
  j["status"] = solver::status_name(res.status);
  j["objective"] = res.objective;
  j["u_flat"] = vector_to_json(res.u_flat);
  j["lambda"] = res.lambda;
  j["eta"] = res.eta;
  j["y"] = res.y;
  json slacks = json::object();
  for (std::size_t i = 0; i < res.slacks.size(); ++i) {
    slacks[res.slack_names[i]] = res.slacks[i];
  }
  j["slacks"] = slacks;
  j["kkt_residual"] = res.kkt_residual;
  j["smooth_violation"] = res.smooth_violation;
  j["lipschitz"] = res.lipschitz;
  j["iterations"] = static_cast<int>(res.log.size());
  open_out(out_dir, "result.json") << j.dump(2) << "\n";

  // iterations.csv
  {
    std::ofstream csv = open_out(out_dir, "iterations.csv");
    csv << "iteration,objective,max_violation,step_norm\n";
    for (const auto& rec : res.log) {
      csv << rec.iteration << "," << fmt(rec.objective) << "," << fmt(rec.max_violation)
          << "," << fmt(rec.step_norm) << "\n";
    }
  }

  // u_star.csv
  {
    std::ofstream csv = open_out(out_dir, "u_star.csv");
    csv << "step";
    for (int jcol = 0; jcol < aug.nu; ++jcol) csv << ",u" << jcol;
    csv << "\n";
    for (int k = 0; k < aug.horizon; ++k) {
      csv << k;
      for (int jcol = 0; jcol < aug.nu; ++jcol) {
        csv << "," << fmt(res.u[static_cast<std::size_t>(k)][jcol]);
      }
      csv << "\n";
    }
  }

  // nominal rollout (zero disturbance, zero tube realization)
  const Eigen::VectorXd w0 = Eigen::VectorXd::Zero(aug.horizon * aug.nx);
  Eigen::VectorXd th0 = Eigen::VectorXd::Zero(dro::theta_dim(aug));
  const stl::Trajectory nominal = dyn::rollout_flat(aug, res.u_flat, w0, th0);
  {
    std::ofstream csv = open_out(out_dir, "nominal_trajectory.csv");
    csv << "step";
    for (int jcol = 0; jcol < aug.nz; ++jcol) csv << ",z" << jcol;
    csv << "\n";
    for (int k = 0; k <= aug.horizon; ++k) {
      csv << k;
      for (int jcol = 0; jcol < aug.nz; ++jcol) csv << "," << fmt(nominal.state(k)[jcol]);
      csv << "\n";
    }
  }

  // per-step tube uncertainty bound around the nominal agent positions
  {
    std::ofstream csv = open_out(out_dir, "ellipsoids.csv");
    csv << "step,agent";
    const int max_dim = aug.agent_dims.empty()
                            ? 0
                            : *std::max_element(aug.agent_dims.begin(), aug.agent_dims.end());
    for (int jcol = 0; jcol < max_dim; ++jcol) csv << ",c" << jcol;
    csv << ",radius_bound\n";
    for (const auto& row : uncertainty_ellipsoids(aug, nominal)) {
      csv << row.step << "," << row.agent;
      for (int jcol = 0; jcol < row.center.size(); ++jcol) csv << "," << fmt(row.center[jcol]);
      csv << "," << fmt(row.radius) << "\n";
    }
  }
  return bundle;
}

MonteCarloSummary run_monte_carlo(const ScenarioFile& scn, const std::string& bundle_dir,
                                  const std::string& out_dir,
                                  std::optional<int> trials_override,
                                  std::optional<std::uint64_t> seed_override) {
  // u* from the bundle
  const std::string result_path = bundle_dir + "/result.json";
  std::ifstream in(result_path);
  if (!in) throw SchemaError("monte-carlo: missing bundle result '" + result_path + "'");
  json bundle_json;
  try {
    bundle_json = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("monte-carlo: bundle result is not valid JSON: ") +
                      e.what());
  }
  if (!bundle_json.contains("u_flat")) throw SchemaError("monte-carlo: bundle lacks u_flat");

  const dyn::AugmentedSystem aug = dyn::build_augmented(scn.system);
  Eigen::VectorXd u(aug.horizon * aug.nu);
  {
    const json& ju = bundle_json.at("u_flat");
    if (static_cast<int>(ju.size()) != u.size()) {
      throw SchemaError("monte-carlo: bundle u_flat has wrong length");
    }
    for (int i = 0; i < u.size(); ++i) u[i] = ju[static_cast<std::size_t>(i)].get<double>();
  }

  const int trials = trials_override.value_or(scn.montecarlo.trials);
  const std::uint64_t seed = seed_override.value_or(scn.montecarlo.seed);
  const int theta_total = dro::theta_dim(aug);

  struct Trial {
    double robustness = 0.0;
    bool satisfied = false;
    double min_distance = 0.0;
    std::vector<double> distances;
  };
  std::vector<Trial> results(static_cast<std::size_t>(trials));

  util::parallel_for(trials, util::worker_count(), [&](int t) {
    util::SplitMix64 rng(util::SplitMix64::derive(seed, static_cast<std::uint64_t>(t)));
    Eigen::VectorXd w(aug.horizon * aug.nx);
    for (int k = 0; k < aug.horizon; ++k) {
      w.segment(k * aug.nx, aug.nx) =
          aug.disturbance.project(scn.noise_scale * rng.gaussian_vector(aug.nx));
    }
    // adversarially sampled tube realization: every step on the boundary
    Eigen::VectorXd th(theta_total);
    int at = 0;
    for (std::size_t i = 0; i < aug.tubes.size(); ++i) {
      const int ni = aug.tubes[i].dim();
      for (int k = 0; k < aug.horizon; ++k) {
        th.segment(at, ni) = aug.tubes[i].sample_boundary(rng);
        at += ni;
      }
    }
    const stl::Trajectory xi = dyn::rollout_flat(aug, u, w, th);
    Trial& trial = results[static_cast<std::size_t>(t)];
    trial.robustness = stl::robustness(scn.formula, xi, 0, scn.solver_config.robustness);
    trial.satisfied = trial.robustness >= 0.0;
    trial.min_distance = std::numeric_limits<double>::quiet_NaN();
    if (!aug.agent_dims.empty()) {
      trial.distances.reserve(static_cast<std::size_t>(aug.horizon) + 1);
      for (int k = 0; k <= aug.horizon; ++k) {
        const double d = min_agent_distance(aug, xi.state(k));
        trial.distances.push_back(d);
        if (std::isnan(trial.min_distance) || d < trial.min_distance) {
          trial.min_distance = d;
        }
      }
    }
  });

  MonteCarloSummary summary;
  summary.trials = trials;
  summary.min_robustness = std::numeric_limits<double>::infinity();
  for (const auto& trial : results) {
    summary.satisfied += trial.satisfied ? 1 : 0;
    summary.mean_robustness += trial.robustness;
    summary.min_robustness = std::min(summary.min_robustness, trial.robustness);
  }
  summary.failures = trials - summary.satisfied;
  summary.mean_robustness /= trials;
  summary.satisfaction_rate = static_cast<double>(summary.satisfied) / trials;

  {
    std::ofstream csv = open_out(out_dir, "trials.csv");
    csv << "trial,robustness,satisfied,min_distance\n";
    for (int t = 0; t < trials; ++t) {
      const Trial& trial = results[static_cast<std::size_t>(t)];
      csv << t << "," << fmt(trial.robustness) << "," << (trial.satisfied ? 1 : 0) << ","
          << (std::isnan(trial.min_distance) ? "" : fmt(trial.min_distance)) << "\n";
    }
  }
  {
    std::ofstream csv = open_out(out_dir, "distance.csv");
    csv << "step,min_distance,mean_distance\n";
    if (!aug.agent_dims.empty()) {
      for (int k = 0; k <= aug.horizon; ++k) {
        double mn = std::numeric_limits<double>::infinity();
        double mean = 0.0;
        for (const auto& trial : results) {
          const double d = trial.distances[static_cast<std::size_t>(k)];
          mn = std::min(mn, d);
          mean += d;
        }
        mean /= trials;
        csv << k << "," << fmt(mn) << "," << fmt(mean) << "\n";
      }
    }
  }
  {
    json j;
    j["metadata"] = metadata_json(scn);
    j["trials"] = summary.trials;
    j["satisfied"] = summary.satisfied;
    j["failures"] = summary.failures;
    j["satisfaction_rate"] = summary.satisfaction_rate;
    j["mean_robustness"] = summary.mean_robustness;
    j["min_robustness"] = summary.min_robustness;
    if (bundle_json.contains("metadata") &&
        bundle_json.at("metadata").value("config_hash", "") != scn.config_hash) {
      j["bundle_hash_mismatch"] = true;
    }
    open_out(out_dir, "summary.json") << j.dump(2) << "\n";
  }
  return summary;
}

LipschitzReport run_lipschitz(const ScenarioFile& scn, const std::string& out_dir) {
  const dyn::AugmentedSystem aug = dyn::build_augmented(scn.system);
  LipschitzReport report;
  report.l1 = scn.formula.max_predicate_lipschitz();
  report.power_norms = dyn::power_norms(aug, scn.system.horizon, scn.lipschitz_variant);
  double sum = 0.0;
  for (const double n : report.power_norms) sum += n * n;
  report.l2 = std::sqrt(sum);
  report.l_phi = report.l1 * report.l2;

  json j;
  j["metadata"] = metadata_json(scn);
  j["L1"] = report.l1;
  j["L2"] = report.l2;
  j["L_phi"] = report.l_phi;
  j["power_norms"] = report.power_norms;
  open_out(out_dir, "lipschitz.json") << j.dump(2) << "\n";
  return report;
}

}  // namespace stldro::scenario
