#include "wickbench/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "wickbench/errors.hpp"

namespace wickbench {

using nlohmann::json;

RunKind parse_run_kind(const std::string& name) {
  if (name == "spectrum") return RunKind::spectrum;
  if (name == "gibbs") return RunKind::gibbs;
  if (name == "evolve") return RunKind::evolve;
  if (name == "wick-check") return RunKind::wick_check;
  if (name == "duhamel") return RunKind::duhamel;
  if (name == "adiabatic-sweep") return RunKind::adiabatic_sweep;
  if (name == "improved-sweep") return RunKind::improved_sweep;
  if (name == "kubo") return RunKind::kubo;
  if (name == "assumption1") return RunKind::assumption1;
  if (name == "twopoint") return RunKind::twopoint;
  throw ConfigError("unknown run kind '" + name + "'");
}

std::string run_kind_name(RunKind kind) {
  switch (kind) {
    case RunKind::spectrum: return "spectrum";
    case RunKind::gibbs: return "gibbs";
    case RunKind::evolve: return "evolve";
    case RunKind::wick_check: return "wick-check";
    case RunKind::duhamel: return "duhamel";
    case RunKind::adiabatic_sweep: return "adiabatic-sweep";
    case RunKind::improved_sweep: return "improved-sweep";
    case RunKind::kubo: return "kubo";
    case RunKind::assumption1: return "assumption1";
    case RunKind::twopoint: return "twopoint";
  }
  return "unknown";
}

namespace {

double require_positive(double v, const std::string& name) {
  if (!(v > 0.0)) throw ConfigError(name + " must be positive");
  return v;
}

void parse_switch(const json& j, SwitchConfig& out) {
  out.type = j.value("type", "exp");
  if (out.type == "poly_flat") {
    out.m = j.value("m", 1);
    if (out.m < 0) throw ConfigError("switch.m must be >= 0");
  } else if (out.type == "atoms") {
    if (!j.contains("list")) throw ConfigError("switch.list required for atom switches");
    for (const auto& pair : j.at("list")) {
      if (!pair.is_array() || pair.size() != 2) throw ConfigError("switch.list entries are [xi, w]");
      const double xi = pair.at(0).get<double>();
      require_positive(xi, "switch atom xi");
      out.atoms.emplace_back(xi, pair.at(1).get<double>());
    }
  } else if (out.type == "rational") {
    out.a = require_positive(j.value("a", 2.0), "switch.a");
    out.n = j.value("n", 5);
    if (out.n < 2) throw ConfigError("switch.n must be >= 2");
  } else if (out.type != "exp") {
    throw ConfigError("unknown switch type '" + out.type + "'");
  }
}

void parse_observable(const json& j, ObservableConfig& out) {
  out.type = j.value("type", "density");
  out.site = j.value("site", 0);
  out.partner = j.value("partner", (out.site + 1));
  if (out.type != "density" && out.type != "density_pair" && out.type != "hop")
    throw ConfigError("unknown observable type '" + out.type + "'");
  if (out.site < 0) throw ConfigError("observable site must be >= 0");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  ExperimentConfig config;
  try {
    config.schema = j.value("schema", 1);
    if (config.schema != 1) throw ConfigError("unsupported schema version");
    if (!j.contains("kind")) throw ConfigError("missing 'kind'");
    config.kind = parse_run_kind(j.at("kind").get<std::string>());
    if (j.contains("model")) {
      const json& model = j.at("model");
      config.d = model.value("d", 1);
      config.L = model.value("L", 2);
      config.M = model.value("M", 1);
      if (config.d < 1 || config.L < 1 || config.M < 1)
        throw ConfigError("model dimensions must be positive");
      if (model.contains("kernel")) {
        const json& k = model.at("kernel");
        config.kernel.type = k.value("type", "uniform");
        config.kernel.hopping = k.value("hopping", -1.0);
        config.kernel.onsite = k.value("onsite", 0.0);
        config.kernel.stagger = k.value("stagger", 0.5);
        config.kernel.range = k.value("range", 1.0);
        if (k.contains("entries"))
          for (const auto& e : k.at("entries")) {
            if (!e.is_array() || e.size() != 4)
              throw ConfigError("kernel.entries rows are [x, y, re, im]");
            config.kernel.entries.push_back(
                {e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>(),
                 e.at(3).get<double>()});
          }
      }
      if (model.contains("interaction")) {
        const json& v = model.at("interaction");
        config.interaction.type = v.value("type", "nn");
        config.interaction.u = v.value("u", 1.0);
        config.interaction.lambda = v.value("lambda", 0.0);
      }
    }
    if (j.contains("state")) {
      config.beta = require_positive(j.at("state").value("beta", 4.0), "state.beta");
      config.mu = j.at("state").value("mu", 0.0);
    }
    if (j.contains("drive")) {
      const json& d = j.at("drive");
      config.epsilon = d.value("epsilon", 0.05);
      config.eta = require_positive(d.value("eta", 0.5), "drive.eta");
      config.time = d.value("t", 0.0);
      if (config.time > 0.0) throw ConfigError("drive.t must be <= 0");
      if (d.contains("switch")) parse_switch(d.at("switch"), config.switch_config);
    }
    if (j.contains("observable")) parse_observable(j.at("observable"), config.observable);
    if (j.contains("perturbation")) parse_observable(j.at("perturbation"), config.perturbation);
    if (j.contains("controls")) {
      const json& c = j.at("controls");
      config.controls.panel_width = c.value("panel_width", 0.0);
      config.controls.points_per_panel = c.value("points_per_panel", 8);
      if (config.controls.points_per_panel < 2 || config.controls.points_per_panel > 32)
        throw ConfigError("controls.points_per_panel must be in 2..32");
      config.controls.step = c.value("step", 0.0);
      config.controls.t_cutoff = c.value("t_cutoff", 0.0);
      config.controls.budget_multiplier = c.value("budget_multiplier", 1.0);
      config.controls.max_modes = c.value("max_modes", 12);
      config.controls.order = c.value("order", 1);
      config.controls.order_max = c.value("order_max", 2);
      config.controls.target_tolerance = c.value("target_tolerance", 0.0);
      if (config.controls.order < 1 || config.controls.order > 3)
        throw ConfigError("controls.order must be in 1..3");
    }
    if (j.contains("sweep")) {
      for (const auto& [key, values] : j.at("sweep").items()) {
        if (key != "eta" && key != "beta" && key != "epsilon")
          throw ConfigError("sweep axis must be eta, beta, or epsilon");
        std::vector<double> grid;
        for (const auto& v : values) grid.push_back(v.get<double>());
        if (grid.empty()) throw ConfigError("sweep axis '" + key + "' is empty");
        for (double v : grid)
          if (key != "epsilon") require_positive(v, "sweep." + key);
        config.sweep[key] = grid;
      }
    }
    config.output = j.value("output", "out");
    config.seed = j.value("seed", 1UL);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  // normalized echo and stable hash for provenance
  config.json_echo = j.dump(2);
  config.config_hash = std::to_string(std::hash<std::string>{}(j.dump()));
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

SwitchSpec build_switch(const SwitchConfig& config) {
  if (config.type == "exp") return exponential_switch();
  if (config.type == "poly_flat") return flat_switch(config.m);
  if (config.type == "atoms") return atom_switch(config.atoms);
  if (config.type == "rational") return rational_switch(config.a, config.n);
  throw ConfigError("unknown switch type '" + config.type + "'");
}

QuadraticKernel build_kernel(const LatticeGeometry& geometry, const KernelConfig& config) {
  if (config.type == "uniform")
    return uniform_chain_kernel(geometry, config.hopping, config.onsite);
  if (config.type == "staggered")
    return staggered_chain_kernel(geometry, config.hopping, config.stagger);
  if (config.type == "custom") {
    QuadraticKernel kernel;
    const int n = geometry.mode_count();
    kernel.entries = Matrix::Zero(n, n);
    for (const auto& e : config.entries) {
      const int x = static_cast<int>(e[0]);
      const int y = static_cast<int>(e[1]);
      if (x < 0 || x >= n || y < 0 || y >= n) throw ConfigError("kernel entry out of range");
      kernel.entries(x, y) = Complex(e[2], e[3]);
    }
    if ((kernel.entries - kernel.entries.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw ConfigError("custom kernel must be Hermitian");
    kernel.range = config.range;
    return kernel;
  }
  throw ConfigError("unknown kernel type '" + config.type + "'");
}

FockOperator build_observable(const LatticeGeometry& geometry, const FockBasis& basis,
                              const ObservableConfig& config) {
  const int n = geometry.mode_count();
  if (config.site >= n) throw ConfigError("observable site out of range");
  if (config.type != "density" && config.partner >= n)
    throw ConfigError("observable partner site out of range");
  FockOperator op;
  if (config.type == "density") {
    op.matrix = creation(basis, config.site).matrix * annihilation(basis, config.site).matrix;
    op.support = {config.site};
  } else if (config.type == "density_pair") {
    op.matrix = creation(basis, config.site).matrix * annihilation(basis, config.site).matrix +
                creation(basis, config.partner).matrix *
                    annihilation(basis, config.partner).matrix;
    op.support = merge_support({config.site}, {config.partner});
  } else if (config.type == "hop") {
    const Matrix term =
        creation(basis, config.site).matrix * annihilation(basis, config.partner).matrix;
    op.matrix = term + term.adjoint();
    op.support = merge_support({config.site}, {config.partner});
  } else {
    throw ConfigError("unknown observable type '" + config.type + "'");
  }
  op.gauge_invariant = true;
  return op;
}

SweepModel build_model(const ExperimentConfig& config) {
  SweepModel model;
  model.geometry = {config.d, config.L, config.M};
  model.basis = build_fock_basis(model.geometry, config.controls.max_modes);
  const QuadraticKernel kernel = build_kernel(model.geometry, config.kernel);
  model.hamiltonian = build_quadratic(model.geometry, model.basis, kernel);
  if (config.interaction.type == "nn" && config.interaction.lambda != 0.0) {
    const FockOperator quartic = build_quartic(
        model.geometry, model.basis,
        nearest_neighbor_interaction(model.geometry, config.interaction.u,
                                     config.interaction.lambda));
    model.hamiltonian.matrix += quartic.matrix;
    model.hamiltonian.support = merge_support(model.hamiltonian.support, quartic.support);
  } else if (config.interaction.type != "none" && config.interaction.type != "nn") {
    throw ConfigError("unknown interaction type '" + config.interaction.type + "'");
  }
  model.perturbation = build_observable(model.geometry, model.basis, config.perturbation);
  model.observable = build_observable(model.geometry, model.basis, config.observable);
  model.mu = config.mu;
  model.switch_spec = build_switch(config.switch_config);
  return model;
}

}  // namespace wickbench
