#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qwalk/experiments.hpp"

using namespace qwalk;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qwalk_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string problems_of(const std::string& text) {
  try {
    validate_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("field-level validation messages") {
  CHECK(problems_of("experiment: ballistic\ncoin:\n  t: 1.5\n").find("coin.t") != std::string::npos);
  CHECK(problems_of("experiment: spatial-localization\ndistribution:\n  kind: point-mass\n")
            .find("point-mass") != std::string::npos);
  CHECK(problems_of("experiment: ballistic\ncolour: red\n").find("colour: unknown key") != std::string::npos);
  CHECK(problems_of("experiment: greens-decay\nparams:\n  radius: 1.0\n").find("params.radius") !=
        std::string::npos);
  CHECK(problems_of("experiment: warp-drive\n").find("experiment") != std::string::npos);
  CHECK(problems_of("coin: [1, 2\n").find("YAML") != std::string::npos);
  CHECK(problems_of("experiment: temporal-diffusion\nparams:\n  initial:\n    up: 1\n    down: 1\n")
            .find("params.initial") != std::string::npos);
  CHECK(problems_of("experiment: lyapunov-scan\nparams:\n  replicas: many\n").find("params.replicas") !=
        std::string::npos);
}

TEST_CASE("minimal config gets defaults") {
  const ExperimentConfig cfg = validate_config("experiment: greens-decay\n");
  CHECK(cfg.greens.replicas == 1000);
  CHECK(cfg.greens.distances.size() == 10);
  const auto j = to_json(cfg);
  CHECK(j["params"]["s"] == doctest::Approx(1.0 / 3.0));
  CHECK(j["distribution"]["kind"] == "uniform-full");
  CHECK(j["output"] == "runs/greens-decay");
}

TEST_CASE("config hash ignores workers and output") {
  ExperimentConfig a = validate_config("experiment: ballistic\nseed: 4\n");
  ExperimentConfig b = a;
  b.workers = 7;
  b.output = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 5;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("identity coin run reports B = 1") {
  ExperimentConfig cfg = validate_config("experiment: ballistic\ncoin:\n  t: 1\nparams:\n  evolution_steps: 50\n");
  cfg.output = scratch("ballistic").string();
  const RunResult res = run_experiment(cfg);
  CHECK(res.summary["B"] == doctest::Approx(1.0));
  CHECK(fs::exists(res.directory / "manifest.json"));
  CHECK(fs::exists(res.directory / "data" / "bands.csv"));
  const auto manifest = nlohmann::json::parse(slurp(res.directory / "manifest.json"));
  CHECK(manifest["config"]["params"]["grid"] == 1024);
  CHECK(manifest.contains("wall_time_seconds"));
}

TEST_CASE("temporal diffusion run reaches D(2)") {
  ExperimentConfig cfg = validate_config(
      "experiment: temporal-diffusion\nparams:\n  n_max: 2000\n  moments: [2]\n  mc_replicas: 100\n");
  cfg.output = scratch("temporal").string();
  const RunResult res = run_experiment(cfg);
  CHECK(res.summary["moments"][0]["within_tolerance"] == true);
  CHECK(res.summary["moments"][0]["ratio"] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("reruns are byte-identical regardless of worker count") {
  const std::string text =
      "experiment: greens-decay\nseed: 12\nparams:\n  replicas: 60\n  distances: [2, 4, 6, 8]\n";
  ExperimentConfig a = validate_config(text);
  a.workers = 1;
  a.output = scratch("rerun_a").string();
  ExperimentConfig b = a;
  b.workers = 3;
  b.output = scratch("rerun_b").string();
  run_experiment(a);
  run_experiment(b);
  for (const char* f : {"data/fractional_moments.csv", "data/fractional_moments_doubled.csv", "summary.json"}) {
    const std::string x = slurp(fs::path(a.output) / f);
    CHECK(!x.empty());
    CHECK(x == slurp(fs::path(b.output) / f));
  }
}

TEST_CASE("experiment catalogue") {
  CHECK(all_experiments().size() == 6);
  CHECK(experiment_name(ExperimentKind::kGaugeCheck) == "gauge-check");
}
