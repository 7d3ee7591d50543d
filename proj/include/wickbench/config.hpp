// config.hpp - experiment configuration: JSON schema, validation, model factory
#ifndef WICKBENCH_CONFIG_HPP
#define WICKBENCH_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wickbench/hamiltonian.hpp"
#include "wickbench/quadrature.hpp"
#include "wickbench/wick.hpp"

namespace wickbench {

enum class RunKind {
  spectrum,
  gibbs,
  evolve,
  wick_check,
  duhamel,
  adiabatic_sweep,
  improved_sweep,
  kubo,
  assumption1,
  twopoint,
};

RunKind parse_run_kind(const std::string& name);
std::string run_kind_name(RunKind kind);

struct KernelConfig {
  std::string type = "uniform";  // uniform | staggered | custom
  double hopping = -1.0;
  double onsite = 0.0;
  double stagger = 0.5;
  std::vector<std::array<double, 4>> entries;  // custom: (x, y, re, im)
  double range = 1.0;
};

struct InteractionConfig {
  std::string type = "none";  // none | nn
  double u = 1.0;
  double lambda = 0.0;
};

struct SwitchConfig {
  std::string type = "exp";  // exp | poly_flat | atoms | rational
  int m = 1;
  std::vector<std::pair<double, double>> atoms;
  double a = 2.0;
  int n = 5;
};

struct ObservableConfig {
  std::string type = "density";  // density | density_pair | hop
  int site = 0;
  int partner = 1;
};

struct ControlConfig {
  double panel_width = 0.0;
  int points_per_panel = 8;
  double step = 0.0;
  double t_cutoff = 0.0;          // 0 -> certified switch cutoff
  double budget_multiplier = 1.0;
  int max_modes = 12;
  int order = 1;                   // n for wick-check / duhamel / assumption1
  int order_max = 2;
  double target_tolerance = 0.0;
};

struct ExperimentConfig {
  int schema = 1;
  RunKind kind = RunKind::spectrum;
  int d = 1;
  int L = 2;
  int M = 1;
  KernelConfig kernel;
  InteractionConfig interaction;
  double beta = 4.0;
  double mu = 0.0;
  double epsilon = 0.05;
  double eta = 0.5;
  double time = 0.0;
  SwitchConfig switch_config;
  ObservableConfig observable;
  ObservableConfig perturbation;
  ControlConfig controls;
  std::map<std::string, std::vector<double>> sweep;  // eta | beta | epsilon grids
  std::string output = "out";
  unsigned long seed = 1;

  std::string json_echo;  // normalized echo for the manifest
  std::string config_hash;
};

// Throws ConfigError with a position-bearing message on malformed input.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

SwitchSpec build_switch(const SwitchConfig& config);
QuadraticKernel build_kernel(const LatticeGeometry& geometry, const KernelConfig& config);
FockOperator build_observable(const LatticeGeometry& geometry, const FockBasis& basis,
                              const ObservableConfig& config);

// Assembled model pieces shared by all run kinds.
SweepModel build_model(const ExperimentConfig& config);

}  // namespace wickbench

#endif
