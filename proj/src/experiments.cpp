#include "qwalk/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <yaml-cpp/yaml.h>

#include "qwalk/evolution.hpp"
#include "qwalk/fourier_ballistic.hpp"
#include "qwalk/greens_fm.hpp"
#include "qwalk/numeric_format.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/statistics.hpp"
#include "qwalk/transfer_lyapunov.hpp"

#ifndef QWALK_VERSION
#define QWALK_VERSION "unknown"
#endif

namespace qwalk {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ExperimentInfo {
  ExperimentKind kind;
  std::string_view name;
  std::string_view description;
};

constexpr ExperimentInfo kExperiments[] = {
    {ExperimentKind::kBallistic, "ballistic",
     "ballistic constant B of a deterministic coin by quadrature, checked against direct evolution"},
    {ExperimentKind::kSpatialLocalization, "spatial-localization",
     "per-realization <X^2>(n) under spatially random phases, with saturation test"},
    {ExperimentKind::kTemporalDiffusion, "temporal-diffusion",
     "exact persistent-walk moments and diffusion constants; Monte Carlo check of the quantum walk"},
    {ExperimentKind::kLyapunovScan, "lyapunov-scan",
     "Lyapunov exponent of transfer-matrix products over an annulus of spectral parameters"},
    {ExperimentKind::kGreensDecay, "greens-decay",
     "fractional moments E|G_z(k,l)|^s against distance with an exponential fit"},
    {ExperimentKind::kGaugeCheck, "gauge-check",
     "Konno-model and general-coin gauge reductions against their deterministic counterparts"},
};

// ---------------------------------------------------------------------------
// YAML reading with field-level diagnostics

class Section {
 public:
  Section(YAML::Node node, std::string path, std::vector<std::string>& problems)
      : node_(std::move(node)), path_(std::move(path)), problems_(problems) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      problems_.push_back(label() + "must be a mapping");
      node_ = YAML::Node();
    }
  }

  ~Section() {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.contains(key)) problems_.push_back(field(key) + ": unknown key");
    }
  }

  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  [[nodiscard]] std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  YAML::Node get(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_.IsMap()) return {};
    const YAML::Node& cn = node_;
    return cn[key];
  }

  Section child(const std::string& key) { return Section(get(key), field(key), problems_); }

  void number(const std::string& key, double& out, double lo, double hi) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return;
    double v = 0.0;
    if (!n.IsScalar() || !YAML::convert<double>::decode(n, v) || !std::isfinite(v)) {
      problems_.push_back(field(key) + ": expected a finite number");
      return;
    }
    if (v < lo || v > hi) {
      problems_.push_back(field(key) + ": " + fmt_double(v) + " outside [" + fmt_double(lo) + ", " +
                          fmt_double(hi) + "]");
      return;
    }
    out = v;
  }

  template <class Int>
  void integer(const std::string& key, Int& out, long long lo, long long hi) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return;
    long long v = 0;
    if (!n.IsScalar() || !YAML::convert<long long>::decode(n, v)) {
      problems_.push_back(field(key) + ": expected an integer");
      return;
    }
    if (v < lo || v > hi) {
      problems_.push_back(field(key) + ": " + std::to_string(v) + " outside [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "]");
      return;
    }
    out = static_cast<Int>(v);
  }

  void boolean(const std::string& key, bool& out) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return;
    bool v = false;
    if (!n.IsScalar() || !YAML::convert<bool>::decode(n, v)) {
      problems_.push_back(field(key) + ": expected true or false");
      return;
    }
    out = v;
  }

  void string(const std::string& key, std::string& out) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return;
    if (!n.IsScalar()) {
      problems_.push_back(field(key) + ": expected a string");
      return;
    }
    out = n.Scalar();
  }

  template <class T>
  void list(const std::string& key, std::vector<T>& out, double lo, double hi) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return;
    if (!n.IsSequence() || n.size() == 0) {
      problems_.push_back(field(key) + ": expected a nonempty list");
      return;
    }
    std::vector<T> vals;
    for (std::size_t i = 0; i < n.size(); ++i) {
      T v{};
      const std::string where = field(key) + "[" + std::to_string(i) + "]";
      if (!n[i].IsScalar() || !YAML::convert<T>::decode(n[i], v) ||
          !std::isfinite(static_cast<double>(v))) {
        problems_.push_back(where + ": expected a number");
        return;
      }
      if (static_cast<double>(v) < lo || static_cast<double>(v) > hi) {
        problems_.push_back(where + ": value outside [" + fmt_double(lo) + ", " + fmt_double(hi) + "]");
        return;
      }
      vals.push_back(v);
    }
    out = std::move(vals);
  }

  void complex(const std::string& key, cplx& out) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return;
    double re = 0.0;
    double im = 0.0;
    if (n.IsSequence() && n.size() == 2 && YAML::convert<double>::decode(n[0], re) &&
        YAML::convert<double>::decode(n[1], im)) {
      out = {re, im};
    } else if (n.IsScalar() && YAML::convert<double>::decode(n, re)) {
      out = {re, 0.0};
    } else {
      problems_.push_back(field(key) + ": expected a number or a [re, im] pair");
    }
  }

  std::vector<std::string>& problems() { return problems_; }

 private:
  [[nodiscard]] std::string label() const { return path_.empty() ? "config " : path_ + " "; }

  YAML::Node node_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string> seen_;
};

void read_spinor(Section& parent, const std::string& key, CoinSpinor& out) {
  Section s = parent.child(key);
  s.complex("up", out.up);
  s.complex("down", out.down);
  const double norm = std::norm(out.up) + std::norm(out.down);
  if (std::abs(norm - 1.0) > 1e-9) {
    s.problems().push_back(parent.field(key) + ": |up|^2 + |down|^2 must equal 1 (got " +
                           fmt_double(norm) + ")");
  }
}

PhaseDistribution read_distribution(Section& root, std::vector<std::string>& problems) {
  Section d = root.child("distribution");
  std::string kind = "uniform-full";
  d.string("kind", kind);
  double a = 0.0;
  double b = kTwoPi;
  double value = 0.0;
  d.number("a", a, 0.0, kTwoPi);
  d.number("b", b, 0.0, kTwoPi);
  d.number("value", value, -1e6, 1e6);
  if (kind == "uniform-full") return PhaseDistribution::uniform_full();
  if (kind == "point-mass") return PhaseDistribution::point_mass(value);
  if (kind == "uniform-interval") {
    if (!(a < b)) {
      problems.push_back("distribution.b: must exceed distribution.a");
      return PhaseDistribution::uniform_full();
    }
    return PhaseDistribution::uniform_interval(a, b);
  }
  problems.push_back("distribution.kind: unknown kind '" + kind +
                     "' (expected uniform-full, uniform-interval or point-mass)");
  return PhaseDistribution::uniform_full();
}

json distribution_json(const PhaseDistribution& d) {
  switch (d.kind()) {
    case PhaseDistribution::Kind::kUniformFull:
      return {{"kind", "uniform-full"}};
    case PhaseDistribution::Kind::kUniformInterval:
      return {{"kind", "uniform-interval"}, {"a", d.lower()}, {"b", d.upper()}};
    case PhaseDistribution::Kind::kPointMass:
      return {{"kind", "point-mass"}, {"value", d.value()}};
  }
  return {};
}

json spinor_json(const CoinSpinor& s) {
  return {{"up", {s.up.real(), s.up.imag()}}, {"down", {s.down.real(), s.down.imag()}}};
}

// ---------------------------------------------------------------------------
// output helpers

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

template <class Fn>
void write_csv(const fs::path& path, Fn&& body) {
  std::ostringstream os;
  body(os);
  write_text(path, os.str());
}

CoinParams coin_of(const ExperimentConfig& cfg) { return make_coin(cfg.coin_t); }

// ---------------------------------------------------------------------------
// experiments

json run_ballistic(const ExperimentConfig& cfg, const fs::path& data) {
  const BallisticParams& p = cfg.ballistic;
  const CoinParams coin = coin_of(cfg);
  const Eigen::Matrix2cd c = normal_coin_matrix(coin);
  const WalkState initial = coin_state(p.initial.up, p.initial.down, 0);
  const BallisticResult b = ballistic_constant(c, initial, p.grid);
  write_csv(data / "bands.csv", [&](std::ostream& os) { write_bands_csv(os, bands(c, p.grid)); });

  json out{{"B", b.B}, {"quadrature_error", b.quadrature_error}, {"grid", b.grid_size}};
  if (p.evolution_steps > 0) {
    std::vector<std::int64_t> checkpoints;
    for (std::int64_t n = p.evolution_steps / 10; n <= p.evolution_steps; n += std::max<std::int64_t>(1, p.evolution_steps / 10)) {
      checkpoints.push_back(n);
    }
    Walker w(initial, coin, Regime::deterministic(0.0), p.evolution_steps);
    std::ostringstream os;
    os << "n,second_moment,ratio\n";
    double last_ratio = 0.0;
    for (std::int64_t n : checkpoints) {
      while (w.time() < n) w.step();
      const double x2 = w.moment(2);
      last_ratio = x2 / (static_cast<double>(n) * static_cast<double>(n));
      os << n << ',' << fmt_double(x2) << ',' << fmt_double(last_ratio) << '\n';
    }
    write_text(data / "evolution.csv", os.str());
    out["evolution_steps"] = p.evolution_steps;
    out["evolution_ratio"] = last_ratio;
    out["relative_difference"] =
        b.B == 0.0 ? std::abs(last_ratio) : std::abs(last_ratio - b.B) / std::abs(b.B);
  }
  return out;
}

json run_localization(const ExperimentConfig& cfg, const fs::path& data) {
  const LocalizationParams& p = cfg.localization;
  const CoinParams coin = coin_of(cfg);
  const WalkState initial = basis_state(Spin::kUp, 0);
  const auto reps = static_cast<std::size_t>(p.realizations);
  std::vector<std::vector<double>> series(reps);
  parallel_for(reps, cfg.workers, [&](std::size_t i) {
    Walker w(initial, coin, Regime::spatial(cfg.distribution, derive_seed(cfg.seed, i)), p.n_max);
    std::vector<double> x2(static_cast<std::size_t>(p.n_max + 1));
    x2[0] = w.moment(2);
    for (std::int64_t n = 1; n <= p.n_max; ++n) {
      w.step();
      x2[static_cast<std::size_t>(n)] = w.moment(2);
    }
    series[i] = std::move(x2);
  });

  const std::int64_t half = p.n_max / 2;
  int saturated = 0;
  std::ostringstream rows;
  rows << "realization,replica_seed,n,second_moment\n";
  json per = json::array();
  for (std::size_t i = 0; i < reps; ++i) {
    const auto& x2 = series[i];
    const double early = *std::max_element(x2.begin() + 1, x2.begin() + half + 1);
    const double late = *std::max_element(x2.begin() + half, x2.end());
    const double growth = late / early - 1.0;
    const bool sat = growth < p.saturation_tolerance;
    saturated += sat ? 1 : 0;
    per.push_back({{"realization", i}, {"replica_seed", derive_seed(cfg.seed, i)},
                   {"max_early", early}, {"max_late", late}, {"growth", growth}, {"saturated", sat}});
    for (std::int64_t n = 0; n <= p.n_max; n += p.stride) {
      rows << i << ',' << derive_seed(cfg.seed, i) << ',' << n << ','
           << fmt_double(x2[static_cast<std::size_t>(n)]) << '\n';
    }
  }
  write_text(data / "second_moments.csv", rows.str());

  json out{{"realizations", p.realizations}, {"saturated", saturated},
           {"saturation_tolerance", p.saturation_tolerance}, {"per_realization", per}};
  if (p.deterministic_contrast) {
    Walker w(initial, coin, Regime::deterministic(0.0), p.n_max);
    while (w.time() < p.n_max) w.step();
    const double n = static_cast<double>(p.n_max);
    out["deterministic_ratio"] = w.moment(2) / (n * n);
  }
  return out;
}

json run_temporal(const ExperimentConfig& cfg, const fs::path& data) {
  const TemporalParams& p = cfg.temporal;
  const CoinParams coin = coin_of(cfg);
  std::vector<std::int64_t> n_list;
  for (int c = 1; c <= p.checkpoints; ++c) {
    // geometric checkpoints ending at n_max
    const double frac = static_cast<double>(c) / p.checkpoints;
    const auto n = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(p.n_max), frac)));
    if (n_list.empty() || n > n_list.back()) n_list.push_back(n);
  }
  if (n_list.back() != p.n_max) n_list.push_back(p.n_max);

  std::ostringstream os;
  os << "L,n,moment,ratio\n";
  json moments = json::array();
  for (int L : p.moments) {
    const auto rows = moment_scaling(L, coin, p.initial, n_list);
    for (const auto& r : rows) {
      os << L << ',' << r.n << ',' << fmt_double(r.moment) << ',' << fmt_double(r.ratio) << '\n';
    }
    const double limit = diffusion_constant(L, coin);
    const double ratio = rows.back().ratio;
    json m{{"L", L}, {"n", rows.back().n}, {"ratio", ratio}, {"limit", limit}};
    if (L % 2 == 0) {
      const double rel = std::abs(ratio - limit) / limit;
      m["relative_error"] = rel;
      m["within_tolerance"] = rel < p.tolerance;
    } else {
      const double scaled = std::abs(table_moment(prw_distribution(prw_params(p.initial, coin), p.n_max), 1)) /
                            std::sqrt(static_cast<double>(p.n_max));
      m["abs_first_moment_over_sqrt_n"] = scaled;
      m["within_tolerance"] = scaled < p.tolerance;
    }
    moments.push_back(m);
  }
  write_text(data / "moment_scaling.csv", os.str());

  const PersistentRWParams prw = prw_params(p.initial, coin);
  write_csv(data / "distribution.csv",
            [&](std::ostream& o) { write_distribution_csv(o, prw_distribution(prw, p.n_max)); });

  json out{{"persistent_walk", {{"a", prw.a}, {"b", prw.b}, {"persist", prw.persist}, {"flip", prw.flip}}},
           {"moments", moments},
           {"tolerance", p.tolerance}};
  if (p.mc_replicas > 0) {
    const ComparisonReport rep =
        mc_vs_exact(coin, p.initial, cfg.distribution, p.mc_steps, p.mc_replicas, cfg.seed, cfg.workers);
    std::ostringstream mc;
    mc << "k,mc_mean,mc_stderr,exact,z_score\n";
    for (const auto& s : rep.sites) {
      mc << s.k << ',' << fmt_double(s.mc_mean) << ',' << fmt_double(s.mc_stderr) << ','
         << fmt_double(s.exact) << ',' << fmt_double(s.z_score) << '\n';
    }
    write_text(data / "mc_comparison.csv", mc.str());
    out["monte_carlo"] = {{"n", rep.n},
                          {"replicas", rep.replicas},
                          {"max_abs_deviation", rep.max_abs_deviation},
                          {"max_abs_z", rep.max_abs_z}};
  }
  return out;
}

json run_lyapunov(const ExperimentConfig& cfg, const fs::path& data) {
  const LyapunovParams& p = cfg.lyapunov;
  const CoinParams coin = coin_of(cfg);
  const std::vector<cplx> grid = annulus_grid(p.radii, p.angles);
  std::vector<LyapunovEstimate> rows;
  LyapunovOptions opt;
  opt.n = p.n;
  opt.replicas = p.replicas;
  opt.seed = cfg.seed;
  opt.workers = cfg.workers;
  for (const cplx& z : grid) rows.push_back(lyapunov_estimate(z, coin, cfg.distribution, opt));
  write_csv(data / "lyapunov.csv", [&](std::ostream& os) { write_lyapunov_csv(os, rows); });

  double min_t = std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double sum = 0.0;
  for (const auto& r : rows) {
    min_t = std::min(min_t, r.stderr_ > 0.0 ? r.gamma_hat / r.stderr_ : std::numeric_limits<double>::infinity());
    lo = std::min(lo, r.gamma_hat);
    hi = std::max(hi, r.gamma_hat);
    sum += r.gamma_hat;
  }
  const double mean = sum / static_cast<double>(rows.size());
  return {{"points", rows.size()},
          {"min_gamma_over_stderr", min_t},
          {"gamma_min", lo},
          {"gamma_max", hi},
          {"relative_variation", mean > 0.0 ? (hi - lo) / mean : 0.0}};
}

json run_greens(const ExperimentConfig& cfg, const fs::path& data) {
  const GreensParams& p = cfg.greens;
  const CoinParams coin = coin_of(cfg);
  const cplx z = std::polar(p.radius, p.angle);
  const auto pairs = distance_pairs(p.distances, p.column);
  const std::int64_t dmax = *std::max_element(p.distances.begin(), p.distances.end());
  const std::int64_t padding = p.padding > 0 ? p.padding : 2 * dmax;

  FractionalMomentOptions opt;
  opt.replicas = p.replicas;
  opt.seed = cfg.seed;
  opt.workers = cfg.workers;
  opt.window = padded_window(pairs, padding);
  const FractionalMomentEstimate est = fractional_moment(z, p.s, pairs, cfg.distribution, coin, opt);
  write_csv(data / "fractional_moments.csv", [&](std::ostream& os) { write_fractional_moment_csv(os, est); });
  const DecayFit fit = decay_fit(est.rows);

  json out{{"z", {z.real(), z.imag()}},
           {"s", p.s},
           {"window", {est.window.first, est.window.last}},
           {"fit", to_json(fit)},
           {"slope_over_stderr", fit.alpha_stderr > 0.0 ? fit.alpha_hat / fit.alpha_stderr : 0.0}};
  if (p.window_doubling) {
    opt.window = padded_window(pairs, 2 * padding);
    const FractionalMomentEstimate wide = fractional_moment(z, p.s, pairs, cfg.distribution, coin, opt);
    write_csv(data / "fractional_moments_doubled.csv",
              [&](std::ostream& os) { write_fractional_moment_csv(os, wide); });
    double worst = 0.0;
    for (std::size_t i = 0; i < est.rows.size(); ++i) {
      const double se = std::max(est.rows[i].stderr_, kStderrFloor);
      worst = std::max(worst, std::abs(wide.rows[i].mean - est.rows[i].mean) / se);
    }
    out["doubled_window"] = {wide.window.first, wide.window.last};
    out["doubling_max_shift_in_stderr"] = worst;
  }
  return out;
}

json run_gauge(const ExperimentConfig& cfg, const fs::path& data) {
  const GaugeParams& p = cfg.gauge;
  const CoinParams coin = coin_of(cfg);
  const IndexRange window{-2 * p.half_width, 2 * p.half_width};
  GeneralCoin g{coin.t, coin.r, p.alpha, p.gamma, p.theta};
  const CoinReduction red = reduce_general_coin(g, window);

  std::ostringstream os;
  os << "realization,replica_seed,konno_distribution_gap,konno_matrix_gap,reduction_matrix_gap\n";
  double worst_dist = 0.0;
  double worst_konno = 0.0;
  double worst_red = 0.0;
  for (int i = 0; i < p.realizations; ++i) {
    const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
    const PhaseSequence phases = sample_phases(cfg.distribution, window, s);
    const double dist_gap = konno_distribution_gap(coin, phases, p.n);
    const double konno_gap = verify_konno_gauge(coin, phases, konno_gauge(phases));
    const double red_gap = verify_reduction(g, red, phases);
    worst_dist = std::max(worst_dist, dist_gap);
    worst_konno = std::max(worst_konno, konno_gap);
    worst_red = std::max(worst_red, red_gap);
    os << i << ',' << s << ',' << fmt_double(dist_gap) << ',' << fmt_double(konno_gap) << ','
       << fmt_double(red_gap) << '\n';
  }
  write_text(data / "gauge_checks.csv", os.str());
  return {{"realizations", p.realizations},
          {"max_konno_distribution_gap", worst_dist},
          {"max_konno_matrix_gap", worst_konno},
          {"max_reduction_matrix_gap", worst_red},
          {"tolerance", p.tolerance},
          {"pass", worst_dist <= p.tolerance && worst_konno <= p.tolerance && worst_red <= p.tolerance}};
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view experiment_name(ExperimentKind kind) {
  for (const auto& e : kExperiments) {
    if (e.kind == kind) return e.name;
  }
  return "unknown";
}

std::string_view experiment_description(ExperimentKind kind) {
  for (const auto& e : kExperiments) {
    if (e.kind == kind) return e.description;
  }
  return "";
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> v;
    for (const auto& e : kExperiments) v.push_back(e.kind);
    return v;
  }();
  return kinds;
}

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out;
  for (const auto& p : problems) {
    if (!out.empty()) out += '\n';
    out += p;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : ValidationError(join_problems(problems)), problems_(std::move(problems)) {}

ExperimentConfig validate_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("config: YAML syntax error: ") + e.what()});
  }
  if (!root || !root.IsMap()) throw ConfigError({"config: top level must be a mapping"});

  std::vector<std::string> problems;
  ExperimentConfig cfg;
  {
    Section top(root, "", problems);
    std::string name;
    top.string("experiment", name);
    bool known = false;
    for (const auto& e : kExperiments) {
      if (e.name == name) {
        cfg.experiment = e.kind;
        known = true;
      }
    }
    if (name.empty()) {
      problems.push_back("experiment: required key missing");
    } else if (!known) {
      problems.push_back("experiment: unknown experiment '" + name + "'");
    }
    {
      Section coin = top.child("coin");
      coin.number("t", cfg.coin_t, 0.0, 1.0);
    }
    cfg.distribution = read_distribution(top, problems);
    top.integer("seed", cfg.seed, 0, std::numeric_limits<long long>::max());
    top.integer("workers", cfg.workers, 0, 1024);
    top.string("output", cfg.output);

    Section p = top.child("params");
    switch (cfg.experiment) {
      case ExperimentKind::kBallistic: {
        auto& b = cfg.ballistic;
        p.integer("grid", b.grid, 16, 1 << 22);
        p.integer("evolution_steps", b.evolution_steps, 0, 100000);
        read_spinor(p, "initial", b.initial);
        break;
      }
      case ExperimentKind::kSpatialLocalization: {
        auto& l = cfg.localization;
        p.integer("n_max", l.n_max, 2, 1000000);
        p.integer("realizations", l.realizations, 1, 1000000);
        p.integer("stride", l.stride, 1, 1000000);
        p.number("saturation_tolerance", l.saturation_tolerance, 0.0, 10.0);
        p.boolean("deterministic_contrast", l.deterministic_contrast);
        break;
      }
      case ExperimentKind::kTemporalDiffusion: {
        auto& t = cfg.temporal;
        p.integer("n_max", t.n_max, 1, 200000);
        p.list("moments", t.moments, 1, 12);
        p.integer("checkpoints", t.checkpoints, 1, 1000);
        p.number("tolerance", t.tolerance, 0.0, 1e6);
        read_spinor(p, "initial", t.initial);
        p.integer("mc_steps", t.mc_steps, 1, 10000);
        p.integer("mc_replicas", t.mc_replicas, 0, 10000000);
        break;
      }
      case ExperimentKind::kLyapunovScan: {
        auto& l = cfg.lyapunov;
        p.list("radii", l.radii, 1e-6, 1e6);
        p.integer("angles", l.angles, 1, 100000);
        p.integer("n", l.n, 1, 1000000000);
        p.integer("replicas", l.replicas, 2, 1000000);
        break;
      }
      case ExperimentKind::kGreensDecay: {
        auto& g = cfg.greens;
        p.number("s", g.s, 1e-6, 1.0 - 1e-6);
        p.number("radius", g.radius, 1e-6, 1e6);
        p.number("angle", g.angle, -kTwoPi, kTwoPi);
        p.list("distances", g.distances, 0, 1e6);
        p.integer("column", g.column, -1000000, 1000000);
        p.integer("padding", g.padding, 0, 10000000);
        p.integer("replicas", g.replicas, 2, 100000000);
        p.boolean("window_doubling", g.window_doubling);
        break;
      }
      case ExperimentKind::kGaugeCheck: {
        auto& g = cfg.gauge;
        p.integer("n", g.n, 1, 10000);
        p.integer("realizations", g.realizations, 1, 100000);
        p.integer("half_width", g.half_width, 2, 100000);
        p.number("alpha", g.alpha, -1e3, 1e3);
        p.number("gamma", g.gamma, -1e3, 1e3);
        p.number("theta", g.theta, -1e3, 1e3);
        p.number("tolerance", g.tolerance, 0.0, 1.0);
        break;
      }
    }
  }

  // cross-field rules
  const bool interior_coin = cfg.coin_t > 0.0 && cfg.coin_t < 1.0;
  const bool point_mass = cfg.distribution.kind() == PhaseDistribution::Kind::kPointMass;
  switch (cfg.experiment) {
    case ExperimentKind::kSpatialLocalization:
    case ExperimentKind::kLyapunovScan:
    case ExperimentKind::kGreensDecay:
      if (point_mass) {
        problems.push_back("distribution.kind: " + std::string(experiment_name(cfg.experiment)) +
                           " needs a phase law with a bounded density; point-mass is deterministic");
      }
      if (!interior_coin) problems.push_back("coin.t: must lie strictly between 0 and 1 for this experiment");
      break;
    case ExperimentKind::kTemporalDiffusion:
      if (cfg.coin_t >= 1.0) problems.push_back("coin.t: must be below 1 (diffusion constant diverges at r = 0)");
      if (cfg.temporal.mc_replicas > 0 && cfg.distribution.circular_mean_modulus() > 1e-12) {
        problems.push_back("distribution.kind: Monte Carlo comparison needs E exp(-i omega) = 0 (uniform-full)");
      }
      if (cfg.temporal.mc_replicas == 1) problems.push_back("params.mc_replicas: need 0 or at least 2");
      break;
    case ExperimentKind::kGaugeCheck:
      if (cfg.gauge.half_width < cfg.gauge.n + 2) {
        problems.push_back("params.half_width: must be at least params.n + 2 to cover the light cone");
      }
      break;
    case ExperimentKind::kBallistic:
      break;
  }
  if (cfg.experiment == ExperimentKind::kGreensDecay) {
    std::set<std::int64_t> distinct(cfg.greens.distances.begin(), cfg.greens.distances.end());
    if (distinct.size() < 4) problems.push_back("params.distances: need at least four distinct distances");
    if (std::abs(cfg.greens.radius - 1.0) < kUnitCircleMargin) {
      problems.push_back("params.radius: must stay at least 1e-3 away from 1");
    }
  }
  if (cfg.output.empty()) cfg.output = "runs/" + std::string(experiment_name(cfg.experiment));

  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return validate_config(ss.str());
}

json to_json(const ExperimentConfig& cfg) {
  json params;
  switch (cfg.experiment) {
    case ExperimentKind::kBallistic:
      params = {{"grid", cfg.ballistic.grid},
                {"evolution_steps", cfg.ballistic.evolution_steps},
                {"initial", spinor_json(cfg.ballistic.initial)}};
      break;
    case ExperimentKind::kSpatialLocalization: {
      const auto& l = cfg.localization;
      params = {{"n_max", l.n_max},
                {"realizations", l.realizations},
                {"stride", l.stride},
                {"saturation_tolerance", l.saturation_tolerance},
                {"deterministic_contrast", l.deterministic_contrast}};
      break;
    }
    case ExperimentKind::kTemporalDiffusion: {
      const auto& t = cfg.temporal;
      params = {{"n_max", t.n_max},         {"moments", t.moments},   {"checkpoints", t.checkpoints},
                {"tolerance", t.tolerance}, {"initial", spinor_json(t.initial)},
                {"mc_steps", t.mc_steps},   {"mc_replicas", t.mc_replicas}};
      break;
    }
    case ExperimentKind::kLyapunovScan: {
      const auto& l = cfg.lyapunov;
      params = {{"radii", l.radii}, {"angles", l.angles}, {"n", l.n}, {"replicas", l.replicas}};
      break;
    }
    case ExperimentKind::kGreensDecay: {
      const auto& g = cfg.greens;
      params = {{"s", g.s},           {"radius", g.radius},   {"angle", g.angle},
                {"distances", g.distances}, {"column", g.column}, {"padding", g.padding},
                {"replicas", g.replicas},   {"window_doubling", g.window_doubling}};
      break;
    }
    case ExperimentKind::kGaugeCheck: {
      const auto& g = cfg.gauge;
      params = {{"n", g.n},         {"realizations", g.realizations}, {"half_width", g.half_width},
                {"alpha", g.alpha}, {"gamma", g.gamma},               {"theta", g.theta},
                {"tolerance", g.tolerance}};
      break;
    }
  }
  return {{"experiment", experiment_name(cfg.experiment)},
          {"coin", {{"t", cfg.coin_t}}},
          {"distribution", distribution_json(cfg.distribution)},
          {"seed", cfg.seed},
          {"workers", cfg.workers},
          {"output", cfg.output},
          {"params", params}};
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = to_json(cfg);
  j.erase("workers");
  j.erase("output");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return std::string("fnv1a64:") + buf;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = cfg.output;
  const fs::path data = dir / "data";
  fs::create_directories(data);

  json summary;
  switch (cfg.experiment) {
    case ExperimentKind::kBallistic:
      summary = run_ballistic(cfg, data);
      break;
    case ExperimentKind::kSpatialLocalization:
      summary = run_localization(cfg, data);
      break;
    case ExperimentKind::kTemporalDiffusion:
      summary = run_temporal(cfg, data);
      break;
    case ExperimentKind::kLyapunovScan:
      summary = run_lyapunov(cfg, data);
      break;
    case ExperimentKind::kGreensDecay:
      summary = run_greens(cfg, data);
      break;
    case ExperimentKind::kGaugeCheck:
      summary = run_gauge(cfg, data);
      break;
  }
  summary["experiment"] = experiment_name(cfg.experiment);
  summary["config_hash"] = config_hash(cfg);
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(data)) files.push_back("data/" + entry.path().filename().string());
  std::sort(files.begin(), files.end());
  const json manifest{{"tool", "qwalk"},
                      {"version", QWALK_VERSION},
                      {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                            std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                            std::to_string(EIGEN_MINOR_VERSION)},
                      {"compiler", __VERSION__},
                      {"config", to_json(cfg)},
                      {"config_hash", config_hash(cfg)},
                      {"workers_used", resolve_workers(cfg.workers)},
                      {"wall_time_seconds", wall},
                      {"files", files}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return {dir, summary, wall};
}

}  // namespace qwalk
