#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/coin_model.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/temporal_diffusion.hpp"

namespace qwalk {

enum class ExperimentKind {
  kBallistic,
  kSpatialLocalization,
  kTemporalDiffusion,
  kLyapunovScan,
  kGreensDecay,
  kGaugeCheck,
};

std::string_view experiment_name(ExperimentKind kind);
const std::vector<ExperimentKind>& all_experiments();
std::string_view experiment_description(ExperimentKind kind);

struct BallisticParams {
  int grid = 1024;
  /// Steps of direct evolution compared against B; 0 skips the comparison.
  std::int64_t evolution_steps = 2000;
  CoinSpinor initial;
};

struct LocalizationParams {
  std::int64_t n_max = 2000;
  int realizations = 50;
  /// Every stride-th time step is written to the moment table.
  std::int64_t stride = 10;
  double saturation_tolerance = 0.05;
  bool deterministic_contrast = true;
};

struct TemporalParams {
  std::int64_t n_max = 10000;
  std::vector<int> moments{1, 2, 4};
  int checkpoints = 20;
  double tolerance = 0.05;
  CoinSpinor initial;
  std::int64_t mc_steps = 30;
  /// 0 skips the Monte Carlo comparison.
  int mc_replicas = 2000;
};

struct LyapunovParams {
  std::vector<double> radii{0.98, 1.0, 1.02};
  int angles = 1;
  std::int64_t n = 100000;
  int replicas = 32;
};

struct GreensParams {
  double s = 1.0 / 3.0;
  double radius = 0.95;
  double angle = 0.0;
  std::vector<std::int64_t> distances{4, 8, 12, 16, 20, 24, 28, 32, 36, 40};
  std::int64_t column = 0;
  /// 0 means twice the largest distance.
  std::int64_t padding = 0;
  int replicas = 1000;
  bool window_doubling = true;
};

struct GaugeParams {
  std::int64_t n = 20;
  int realizations = 10;
  std::int64_t half_width = 40;
  double alpha = 0.7;
  double gamma = 1.1;
  double theta = 0.3;
  double tolerance = 1e-10;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kBallistic;
  double coin_t = 0.70710678118654752;
  PhaseDistribution distribution = PhaseDistribution::uniform_full();
  std::uint64_t seed = 1;
  int workers = 0;
  std::string output;

  BallisticParams ballistic;
  LocalizationParams localization;
  TemporalParams temporal;
  LyapunovParams lyapunov;
  GreensParams greens;
  GaugeParams gauge;
};

/// Field-level problems found while reading a config; what() joins them with newlines.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  [[nodiscard]] const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Parses and range-checks a YAML config. Throws ConfigError listing every problem.
ExperimentConfig validate_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Effective configuration with all defaults filled in.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical JSON of the result-relevant fields (workers and output excluded).
std::string config_hash(const ExperimentConfig& cfg);

struct RunResult {
  std::filesystem::path directory;
  nlohmann::json summary;
  double wall_seconds = 0.0;
};

/// Runs the experiment and writes manifest.json, summary.json and data/*.csv under
/// cfg.output. Data files depend only on the config, never on the worker count.
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace qwalk
