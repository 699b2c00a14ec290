// Command-line front end: qwalk run|validate|list-experiments

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qwalk/experiments.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
  cmd->add_option("--workers", o.workers, "worker threads, 0 = all cores (overrides the config)")
      ->check(CLI::Range(0, 1024));
  cmd->add_option("--out", o.out, "output directory (overrides the config)");
}

void apply(const Overrides& o, qwalk::ExperimentConfig& cfg) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.out) cfg.output = *o.out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qwalk: random coined quantum walk experiments"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides run_over;
  Overrides validate_over;

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "YAML config")->required();
  add_overrides(run, run_over);

  auto* validate = app.add_subcommand("validate", "check a config and print it with defaults filled in");
  validate->add_option("config", config_path, "YAML config")->required();
  add_overrides(validate, validate_over);

  auto* list = app.add_subcommand("list-experiments", "list the available experiment kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  if (list->parsed()) {
    for (auto kind : qwalk::all_experiments()) {
      std::cout << qwalk::experiment_name(kind) << "\t" << qwalk::experiment_description(kind) << "\n";
    }
    return 0;
  }

  qwalk::ExperimentConfig cfg;
  try {
    cfg = qwalk::load_config(config_path);
    apply(run->parsed() ? run_over : validate_over, cfg);
  } catch (const qwalk::ConfigError& e) {
    std::cerr << "invalid config " << config_path << ":\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  if (validate->parsed()) {
    std::cout << qwalk::to_json(cfg).dump(2) << "\n";
    return 0;
  }

  try {
    const qwalk::RunResult res = qwalk::run_experiment(cfg);
    std::cout << res.summary.dump(2) << "\n";
    std::cerr << "wrote " << res.directory.string() << " in " << res.wall_seconds << " s\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
