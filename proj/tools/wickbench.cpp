// wickbench.cpp - CLI entry point
#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "wickbench/config.hpp"
#include "wickbench/errors.hpp"
#include "wickbench/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Finite-lattice simulator for driven fermionic Gibbs states"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int jobs = 0;
  unsigned long seed = 0;

  const std::vector<std::string> kinds = {"spectrum",        "gibbs",  "evolve",
                                          "wick-check",      "duhamel", "adiabatic-sweep",
                                          "improved-sweep",  "kubo",   "assumption1",
                                          "twopoint"};
  for (const std::string& kind : kinds) {
    CLI::App* sub = app.add_subcommand(kind);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--jobs", jobs, "parallel jobs (default: logical cores)");
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed, "seed override");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string kind = app.get_subcommands().front()->get_name();

  try {
    wickbench::ExperimentConfig config = wickbench::parse_config_file(config_path);
    if (wickbench::run_kind_name(config.kind) != kind) {
      std::fprintf(stderr, "config kind '%s' does not match subcommand '%s'\n",
                   wickbench::run_kind_name(config.kind).c_str(), kind.c_str());
      return 2;
    }
    wickbench::RunOptions options;
    options.out_dir = out_dir;
    options.jobs = jobs;
    options.seed = seed;
    const wickbench::RunResult result = wickbench::run_experiment(config, options);
    for (const std::string& message : result.messages)
      std::fprintf(stderr, "%s\n", message.c_str());
    std::printf("results: %s\nmanifest: %s\n", result.csv_path.c_str(),
                result.manifest_path.c_str());
    return result.exit_code;
  } catch (const wickbench::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const wickbench::BudgetUnattainable& e) {
    std::fprintf(stderr, "budget error: %s\n", e.what());
    return 3;
  } catch (const wickbench::QuadratureBudgetExceeded& e) {
    std::fprintf(stderr, "budget error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
