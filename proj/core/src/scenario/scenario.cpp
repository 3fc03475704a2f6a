#include "stldro/scenario/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace stldro::scenario {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SchemaError("scenario: " + path + ": " + what);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path, "missing required field '" + key + "'");
  return j.at(key);
}

double require_number(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double optional_number(const json& j, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return j.at(key).get<double>();
}

std::uint64_t require_seed(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number_unsigned() && !v.is_number_integer()) {
    fail(path + "." + key, "expected an integer seed");
  }
  return v.get<std::uint64_t>();
}

Eigen::VectorXd as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(path, "expected an array of numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    fail(path, "expected a nested array (row-major matrix)");
  }
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[static_cast<std::size_t>(r)].is_array() ||
        static_cast<int>(j[static_cast<std::size_t>(r)].size()) != cols) {
      fail(path, "matrix rows must have equal length");
    }
    for (int c = 0; c < cols; ++c) {
      m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

dyn::SupportSet as_support(const json& j, const std::string& path) {
  const std::string kind = require(j, "kind", path).get<std::string>();
  if (kind == "box") {
    return dyn::SupportSet::box(as_vector(require(j, "lower", path), path + ".lower"),
                                as_vector(require(j, "upper", path), path + ".upper"));
  }
  if (kind == "ball") {
    return dyn::SupportSet::ball(as_vector(require(j, "center", path), path + ".center"),
                                 require_number(j, "radius", path));
  }
  fail(path + ".kind", "expected 'box' or 'ball'");
}

stl::Predicate as_predicate(const std::string& name, const json& j,
                            const std::string& path) {
  const std::string kind = require(j, "kind", path).get<std::string>();
  if (kind == "affine") {
    return stl::Predicate::affine(as_vector(require(j, "a", path), path + ".a"),
                                  require_number(j, "b", path), name);
  }
  if (kind == "ball") {
    return stl::Predicate::norm_ball(require_number(j, "c", path),
                                     as_matrix(require(j, "P", path), path + ".P"),
                                     as_vector(require(j, "q", path), path + ".q"), name);
  }
  fail(path + ".kind", "expected 'affine' or 'ball'");
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace

ScenarioFile parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("scenario: invalid JSON: ") + e.what());
  }
  ScenarioFile scn;
  scn.name = doc.value("name", "scenario");

  // ---- system
  const json& sys = require(doc, "system", "$");
  scn.system.a = as_matrix(require(sys, "A", "system"), "system.A");
  scn.system.c = as_matrix(require(sys, "C", "system"), "system.C");
  scn.system.x0 = as_vector(require(sys, "x0", "system"), "system.x0");
  const double n_steps = require_number(sys, "N", "system");
  if (n_steps < 1 || n_steps != std::floor(n_steps)) {
    fail("system.N", "horizon must be a positive integer");
  }
  scn.system.horizon = static_cast<int>(n_steps);
  scn.system.disturbance =
      as_support(require(sys, "disturbance", "system"), "system.disturbance");
  if (sys.contains("agents")) {
    const json& agents = sys.at("agents");
    if (!agents.is_array()) fail("system.agents", "expected an array");
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const std::string path = "system.agents[" + std::to_string(i) + "]";
      const json& ja = agents[i];
      dyn::UncontrollableAgent ag;
      ag.b = as_matrix(require(ja, "B", path), path + ".B");
      ag.d = as_matrix(require(ja, "D", path), path + ".D");
      const json& je = require(ja, "E", path);
      if (!je.is_array()) fail(path + ".E", "expected an array of matrices");
      for (std::size_t jj = 0; jj < je.size(); ++jj) {
        ag.e_row.push_back(as_matrix(je[jj], path + ".E[" + std::to_string(jj) + "]"));
      }
      ag.y0 = as_vector(require(ja, "y0", path), path + ".y0");
      ag.tube = as_support(require(ja, "tube", path), path + ".tube");
      scn.system.agents.push_back(std::move(ag));
    }
  }
  try {
    scn.system.validate();
  } catch (const Error& e) {
    throw SchemaError(std::string("scenario: system: ") + e.what());
  }

  // ---- predicates
  if (doc.contains("predicates")) {
    const json& preds = doc.at("predicates");
    if (!preds.is_object()) fail("predicates", "expected an object");
    for (auto it = preds.begin(); it != preds.end(); ++it) {
      scn.predicates.emplace(it.key(),
                             as_predicate(it.key(), it.value(), "predicates." + it.key()));
    }
  }

  // ---- formula
  scn.formula_text = require(doc, "formula", "$").get<std::string>();
  try {
    scn.formula = stl::parse_formula(scn.formula_text, scn.predicates);
  } catch (const Error& e) {
    throw SchemaError(std::string("scenario: formula: ") + e.what());
  }
  if (scn.formula.horizon() > scn.system.horizon) {
    fail("formula", "formula horizon " + std::to_string(scn.formula.horizon()) +
                        " exceeds system horizon " + std::to_string(scn.system.horizon));
  }

  // ---- chance
  const json& chance = require(doc, "chance", "$");
  scn.epsilon = require_number(chance, "epsilon", "chance");
  if (!(scn.epsilon > 0.0 && scn.epsilon < 1.0)) fail("chance.epsilon", "must lie in (0,1)");
  scn.r0 = require_number(chance, "r0", "chance");
  if (!(scn.r0 >= 0.0)) fail("chance.r0", "must be >= 0");
  scn.beta = optional_number(chance, "beta", 0.05);
  scn.noise_scale = optional_number(chance, "scale", 1.0);
  const std::string h_family = chance.value("h_family", "gaussian-tight");
  if (h_family == "gaussian-tight") {
    scn.profile.family = risk::HFamily::GaussianTight;
  } else if (h_family == "gaussian-general") {
    scn.profile.family = risk::HFamily::GaussianGeneral;
  } else {
    fail("chance.h_family", "expected 'gaussian-tight' or 'gaussian-general'");
  }
  scn.profile.scale = scn.noise_scale;
  scn.profile.tail_exponent = optional_number(chance, "a", 2.0);
  scn.profile.tail_constant = optional_number(chance, "C", 1.0);

  // ---- data
  const json& data = require(doc, "data", "$");
  if (data.contains("path")) {
    scn.sample_path = data.at("path").get<std::string>();
  } else {
    const double m = require_number(data, "M", "data");
    if (m < 1 || m != std::floor(m)) fail("data.M", "must be a positive integer");
    scn.sample_count = static_cast<int>(m);
    scn.data_seed = require_seed(data, "seed", "data");
  }

  // ---- ambiguity
  const json& amb = require(doc, "ambiguity", "$");
  const std::string mode = require(amb, "mode", "ambiguity").get<std::string>();
  scn.ambiguity.beta = scn.beta;
  scn.ambiguity.dimension = scn.system.horizon * scn.system.state_dim();
  if (mode == "fixed") {
    scn.ambiguity.mode = dro::RadiusMode::Fixed;
    scn.ambiguity.fixed_radius = require_number(amb, "r", "ambiguity");
  } else if (mode == "auto") {
    scn.ambiguity.mode = dro::RadiusMode::Auto;
    scn.ambiguity.c1 = optional_number(amb, "c1", 1.0);
    scn.ambiguity.c2 = optional_number(amb, "c2", 1.0);
    scn.ambiguity.tail_exponent = optional_number(amb, "a", 2.0);
  } else {
    fail("ambiguity.mode", "expected 'fixed' or 'auto'");
  }
  try {
    scn.ambiguity.validate();
  } catch (const Error& e) {
    throw SchemaError(std::string("scenario: ambiguity: ") + e.what());
  }

  // ---- method
  try {
    scn.method = solver::method_from_name(require(doc, "method", "$").get<std::string>());
  } catch (const Error& e) {
    throw SchemaError(std::string("scenario: method: ") + e.what());
  }

  // ---- optional objective / input bounds
  if (doc.contains("objective") && doc.at("objective").contains("Q")) {
    scn.objective_q = as_matrix(doc.at("objective").at("Q"), "objective.Q");
  }
  if (doc.contains("input_bounds")) {
    const json& ib = doc.at("input_bounds");
    scn.input_lower = as_vector(require(ib, "lower", "input_bounds"), "input_bounds.lower");
    scn.input_upper = as_vector(require(ib, "upper", "input_bounds"), "input_bounds.upper");
    if (scn.input_lower.size() != scn.system.input_dim() ||
        scn.input_upper.size() != scn.system.input_dim()) {
      fail("input_bounds", "bounds must have n_u entries");
    }
  }

  // ---- solver
  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    scn.solver_config.constraint_tol = optional_number(s, "constraint_tol", 1e-6);
    scn.solver_config.stationarity_tol = optional_number(s, "stationarity_tol", 1e-5);
    scn.solver_config.max_outer =
        static_cast<int>(optional_number(s, "max_outer", 500));
    scn.solver_config.seed = s.contains("seed") ? require_seed(s, "seed", "solver") : 1;
    if (s.contains("cs_schedule")) {
      const json& cs = s.at("cs_schedule");
      if (!cs.is_array() || cs.empty()) fail("solver.cs_schedule", "expected a non-empty array");
      scn.solver_config.cs_schedule.clear();
      for (const auto& c : cs) scn.solver_config.cs_schedule.push_back(c.get<double>());
    }
    scn.solver_config.inner_multistart_hot =
        static_cast<int>(optional_number(s, "inner_multistart_hot", 2));
    scn.solver_config.inner_multistart_final =
        static_cast<int>(optional_number(s, "inner_multistart_final", 0));
    scn.solver_config.inner_max_iterations =
        static_cast<int>(optional_number(s, "inner_max_iterations", 200));
    scn.solver_config.descent_iterations =
        static_cast<int>(optional_number(s, "descent_iterations", 60));
    scn.solver_config.lambda_max = optional_number(s, "lambda_max", 1e6);
    scn.solver_config.lambda_init = optional_number(s, "lambda_init", -1.0);
    scn.solver_config.trust_radius = optional_number(s, "trust_radius", 0.0);
  }
  if (doc.contains("lipschitz_variant")) {
    const std::string v = doc.at("lipschitz_variant").get<std::string>();
    if (v == "full") {
      scn.lipschitz_variant = dyn::LipschitzVariant::FullMatrix;
    } else if (v == "injected") {
      scn.lipschitz_variant = dyn::LipschitzVariant::InjectedSubmatrix;
    } else {
      fail("lipschitz_variant", "expected 'full' or 'injected'");
    }
  }

  // ---- montecarlo
  if (doc.contains("montecarlo")) {
    const json& mc = doc.at("montecarlo");
    const double trials = optional_number(mc, "trials", 200);
    if (trials < 1 || trials != std::floor(trials)) fail("montecarlo.trials", "positive integer");
    scn.montecarlo.trials = static_cast<int>(trials);
    scn.montecarlo.seed = require_seed(mc, "seed", "montecarlo");
  }

  scn.config_hash = fnv1a_hex(doc.dump());
  return scn;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("scenario: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

dro::EmpiricalDistribution scenario_samples(const ScenarioFile& scn,
                                            const dyn::AugmentedSystem& aug) {
  if (!scn.sample_path.empty()) {
    std::ifstream in(scn.sample_path);
    if (!in) throw SchemaError("scenario: cannot open sample file '" + scn.sample_path + "'");
    dro::EmpiricalDistribution emp;
    emp.provenance = "file:" + scn.sample_path;
    const int dim = aug.horizon * aug.nx;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream row(line);
      Eigen::VectorXd w(dim);
      std::string cell;
      for (int i = 0; i < dim; ++i) {
        if (!std::getline(row, cell, ',')) {
          throw SchemaError("scenario: sample file row with fewer than N*n_x values");
        }
        w[i] = std::stod(cell);
      }
      emp.samples.push_back(std::move(w));
    }
    emp.validate();
    return emp;
  }
  return dro::draw_gaussian_sequences(aug, scn.sample_count, scn.noise_scale, scn.data_seed);
}

solver::RobustSynthesisProblem make_problem(const ScenarioFile& scn,
                                            std::optional<solver::Method> method_override) {
  solver::RobustSynthesisProblem p;
  p.system = scn.system;
  p.formula = scn.formula;
  p.r0 = scn.r0;
  p.eps = scn.epsilon;
  p.input_weight = scn.objective_q;
  p.input_lower = scn.input_lower;
  p.input_upper = scn.input_upper;
  p.method = method_override.value_or(scn.method);
  const dyn::AugmentedSystem aug = dyn::build_augmented(scn.system);
  p.samples = scenario_samples(scn, aug);
  p.ambiguity = scn.ambiguity;
  p.profile = scn.profile;
  p.lipschitz_variant = scn.lipschitz_variant;
  p.validate();
  return p;
}

}  // namespace stldro::scenario
