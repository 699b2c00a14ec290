#include "qwalk/temporal_diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "qwalk/errors.hpp"
#include "qwalk/evolution.hpp"
#include "qwalk/numeric_format.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/statistics.hpp"

namespace qwalk {

namespace {

// Neumaier summation in long double
class CompensatedSum {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

constexpr double kNegligible = 1e-290;

// (w⁺, w⁻) over k ∈ [−n_max, n_max]; slot k + n_max
class PrwRecursion {
 public:
  PrwRecursion(const PersistentRWParams& p, std::int64_t n_max)
      : p_(p), n_max_(n_max), plus_(static_cast<std::size_t>(2 * n_max + 3)), minus_(plus_.size()),
        next_plus_(plus_.size()), next_minus_(plus_.size()) {
    plus_[slot(1)] = p.a;
    minus_[slot(-1)] = p.b;
  }

  void step() {
    // only sites with the parity of n+1 are reachable
    const std::size_t lo = slot(-(n_ + 1));
    const std::size_t hi = slot(n_ + 1);
    const double* p = plus_.data();
    const double* m = minus_.data();
    double* np = next_plus_.data();
    double* nm = next_minus_.data();
    const double flip = p_.flip;
    const double persist = p_.persist;
    for (std::size_t s = lo; s <= hi; s += 2) {
      const double up = flip * m[s - 1] + persist * p[s - 1];
      const double down = persist * m[s + 1] + flip * p[s + 1];
      // tail weights underflow towards subnormals, which are slow and carry no mass
      np[s] = up < kNegligible ? 0.0 : up;
      nm[s] = down < kNegligible ? 0.0 : down;
    }
    // clear the previous parity class so stale values never leak into the next step
    for (std::size_t s = lo + 1; s < hi; s += 2) {
      np[s] = 0.0;
      nm[s] = 0.0;
    }
    std::swap(plus_, next_plus_);
    std::swap(minus_, next_minus_);
    ++n_;
  }

  [[nodiscard]] std::int64_t time() const { return n_; }

  [[nodiscard]] DistributionTable table() const {
    DistributionTable t{n_, std::vector<double>(static_cast<std::size_t>(2 * n_ + 1))};
    for (std::int64_t k = -n_; k <= n_; ++k) {
      t.w[static_cast<std::size_t>(k + n_)] = plus_[slot(k)] + minus_[slot(k)];
    }
    return t;
  }

  [[nodiscard]] double moment(int L) const {
    CompensatedSum acc;
    for (std::int64_t k = -n_; k <= n_; ++k) {
      const long double w = static_cast<long double>(plus_[slot(k)]) + minus_[slot(k)];
      if (w == 0.0L) continue;
      acc.add(std::pow(static_cast<long double>(k), L) * w);
    }
    return static_cast<double>(acc.value());
  }

 private:
  // one guard slot on each side keeps s−1 and s+1 in range
  [[nodiscard]] std::size_t slot(std::int64_t k) const { return static_cast<std::size_t>(k + n_max_ + 1); }

  PersistentRWParams p_;
  std::int64_t n_max_;
  std::int64_t n_ = 1;
  std::vector<double> plus_;
  std::vector<double> minus_;
  std::vector<double> next_plus_;
  std::vector<double> next_minus_;
};

DistributionTable table_from_state(const WalkState& s, std::int64_t n) {
  DistributionTable t{n, std::vector<double>(static_cast<std::size_t>(2 * n + 1))};
  const std::vector<double> p = s.site_probabilities();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::int64_t k = s.first_site() + static_cast<std::int64_t>(i);
    if (k >= -n && k <= n) t.w[static_cast<std::size_t>(k + n)] += p[i];
  }
  return t;
}

}  // namespace

void validate(const PersistentRWParams& p) {
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(p.a) || !unit(p.b) || !unit(p.persist) || !unit(p.flip)) {
    throw ValidationError("persistent walk parameters must lie in [0,1]");
  }
  if (std::abs(p.a + p.b - 1.0) > 1e-12 || std::abs(p.persist + p.flip - 1.0) > 1e-12) {
    throw ValidationError("persistent walk parameters must satisfy a+b = persist+flip = 1");
  }
}

double DistributionTable::total() const {
  CompensatedSum s;
  for (double x : w) s.add(x);
  return static_cast<double>(s.value());
}

DistributionTable quantum_distribution(const CoinParams& coin,
                                       std::span<const std::pair<double, double>> step_phases,
                                       const CoinSpinor& phi0, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("quantum_distribution: n must be nonnegative");
  if (static_cast<std::int64_t>(step_phases.size()) < n) {
    throw std::invalid_argument("quantum_distribution: fewer phase pairs than steps");
  }
  WalkState s = coin_state(phi0.up, phi0.down, 0);
  for (std::int64_t j = 0; j < n; ++j) {
    const auto [w_up, w_down] = step_phases[static_cast<std::size_t>(j)];
    const Eigen::Matrix2cd c = coin_matrix(coin, w_up, w_down);
    s = apply_walk_step(s, [&](std::int64_t) { return c; });
  }
  return table_from_state(s, n);
}

DistributionTable quantum_distribution(const CoinParams& coin, const PhaseDistribution& dist,
                                       std::uint64_t seed, const CoinSpinor& phi0, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("quantum_distribution: n must be nonnegative");
  const WalkState s = evolve(coin_state(phi0.up, phi0.down, 0), coin, n, Regime::temporal(dist, seed));
  return table_from_state(s, n);
}

PersistentRWParams prw_params(const CoinSpinor& phi0, const CoinParams& coin) {
  const double na = std::norm(phi0.up);
  const double nb = std::norm(phi0.down);
  if (std::abs(na + nb - 1.0) > 1e-12) throw ValidationError("initial coin state must be normalized");
  const double cross = (std::conj(phi0.up) * phi0.down).real();
  const double r2 = coin.r * coin.r;
  const double t2 = coin.t * coin.t;
  PersistentRWParams p;
  p.a = std::clamp(na * t2 + nb * r2 - 2.0 * cross * coin.r * coin.t, 0.0, 1.0);
  p.b = 1.0 - p.a;
  p.persist = t2;
  p.flip = 1.0 - t2;
  return p;
}

DistributionTable prw_distribution(const PersistentRWParams& p, std::int64_t n) {
  validate(p);
  if (n < 1) throw std::invalid_argument("prw_distribution: n must be at least 1");
  PrwRecursion rec(p, n);
  while (rec.time() < n) rec.step();
  return rec.table();
}

ComparisonReport mc_vs_exact(const CoinParams& coin, const CoinSpinor& phi0,
                             const PhaseDistribution& dist, std::int64_t n, int replicas,
                             std::uint64_t seed, int workers) {
  if (dist.circular_mean_modulus() > 1e-12) {
    throw HypothesisError("mc_vs_exact requires E exp(-i omega) = 0; " + dist.describe() +
                          " has nonzero circular mean");
  }
  if (replicas < 2) throw std::invalid_argument("mc_vs_exact: need at least two replicas");
  if (n < 1) throw std::invalid_argument("mc_vs_exact: n must be at least 1");
  const DistributionTable exact = prw_distribution(prw_params(phi0, coin), n);
  const auto width = static_cast<std::size_t>(2 * n + 1);
  const auto reps = static_cast<std::size_t>(replicas);
  std::vector<double> samples(width * reps);  // site-major
  parallel_for(reps, workers, [&](std::size_t i) {
    const DistributionTable w = quantum_distribution(coin, dist, derive_seed(seed, i), phi0, n);
    for (std::size_t j = 0; j < width; ++j) samples[j * reps + i] = w.w[j];
  });

  ComparisonReport rep{n, replicas, seed, 0.0, 0.0, {}};
  for (std::size_t j = 0; j < width; ++j) {
    const MeanStderr ms = mean_stderr(std::span<const double>(samples).subspan(j * reps, reps));
    SiteComparison s;
    s.k = static_cast<std::int64_t>(j) - n;
    s.mc_mean = ms.mean;
    s.mc_stderr = ms.stderr_;
    s.exact = exact.w[j];
    s.z_score = (s.mc_mean - s.exact) / std::max(s.mc_stderr, kStderrFloor);
    rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(s.mc_mean - s.exact));
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(s.z_score));
    rep.sites.push_back(s);
  }
  return rep;
}

nlohmann::json to_json(const ComparisonReport& report) {
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& s : report.sites) {
    sites.push_back({{"k", s.k},
                     {"mc_mean", s.mc_mean},
                     {"mc_stderr", s.mc_stderr},
                     {"exact", s.exact},
                     {"z_score", s.z_score}});
  }
  return {{"n", report.n},
          {"replicas", report.replicas},
          {"seed", report.seed},
          {"max_abs_deviation", report.max_abs_deviation},
          {"max_abs_z", report.max_abs_z},
          {"sites", sites}};
}

Eigen::Matrix2cd transition_symbol(cplx y, const CoinParams& coin) {
  const cplx e = std::exp(cplx{0.0, 1.0} * y);
  const cplx ei = 1.0 / e;
  const double t2 = coin.t * coin.t;
  const double r2 = coin.r * coin.r;
  Eigen::Matrix2cd m;
  m << t2 * e, r2 * e, r2 * ei, t2 * ei;
  return m;
}

cplx generating_function(cplx y, std::int64_t n, const PersistentRWParams& p) {
  validate(p);
  if (n < 1) throw std::invalid_argument("generating_function: n must be at least 1");
  const cplx e = std::exp(cplx{0.0, 1.0} * y);
  const cplx ei = 1.0 / e;
  Eigen::Vector2cd phi(p.a * e, p.b * ei);
  const CoinParams coin{std::sqrt(p.flip), std::sqrt(p.persist)};
  const Eigen::Matrix2cd m = transition_symbol(y, coin);
  for (std::int64_t j = 1; j < n; ++j) phi = m * phi;
  return phi(0) + phi(1);
}

cplx characteristic_function(const DistributionTable& table, cplx y) {
  cplx s{};
  for (std::int64_t k = -table.n; k <= table.n; ++k) {
    const double w = table.at(k);
    if (w != 0.0) s += w * std::exp(cplx{0.0, 1.0} * y * static_cast<double>(k));
  }
  return s;
}

double diffusion_constant(int L, const CoinParams& coin) {
  if (L < 1) throw std::domain_error("diffusion_constant: L must be a positive integer");
  if (coin.r == 0.0) throw std::domain_error("diffusion constant diverges for r = 0 (ballistic walk)");
  if (L % 2 != 0) return 0.0;
  double dfact = 1.0;
  for (int j = L - 1; j > 1; j -= 2) dfact *= j;
  return dfact * std::pow(coin.t * coin.t / (coin.r * coin.r), L / 2);
}

double hermite_at_zero(int L) {
  if (L < 0) throw std::domain_error("hermite_at_zero: negative order");
  // He_{n+1}(x) = x He_n(x) − n He_{n−1}(x) at x = 0
  double prev = 1.0;  // He_0
  double cur = 0.0;   // He_1
  if (L == 0) return prev;
  for (int j = 1; j < L; ++j) {
    const double next = -j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_moment_limit(int L, const CoinParams& coin) {
  if (coin.r == 0.0) throw std::domain_error("hermite_moment_limit: r = 0");
  const double ratio = coin.t * coin.t / (coin.r * coin.r);
  const double sign = L % 2 == 0 ? 1.0 : -1.0;
  return std::pow(ratio, 0.5 * L) * hermite_at_zero(L) * sign;
}

std::vector<MomentScalingRow> moment_scaling(int L, const CoinParams& coin, const CoinSpinor& phi0,
                                             std::span<const std::int64_t> n_list) {
  if (n_list.empty()) return {};
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1])) {
      throw std::invalid_argument("moment_scaling: n_list must be positive and increasing");
    }
  }
  const PersistentRWParams p = prw_params(phi0, coin);
  PrwRecursion rec(p, n_list.back());
  std::vector<MomentScalingRow> out;
  for (std::int64_t n : n_list) {
    while (rec.time() < n) rec.step();
    const double m = rec.moment(L);
    out.push_back({n, m, m / std::pow(static_cast<double>(n), 0.5 * L)});
  }
  return out;
}

double table_moment(const DistributionTable& table, int L) {
  CompensatedSum acc;
  for (std::int64_t k = -table.n; k <= table.n; ++k) {
    const double w = table.at(k);
    if (w != 0.0) acc.add(std::pow(static_cast<long double>(k), L) * w);
  }
  return static_cast<double>(acc.value());
}

void write_distribution_csv(std::ostream& os, const DistributionTable& table) {
  os << "n,k,probability\n";
  for (std::int64_t k = -table.n; k <= table.n; ++k) {
    os << table.n << ',' << k << ',' << fmt_double(table.at(k)) << '\n';
  }
}

void write_moment_scaling_csv(std::ostream& os, int L, std::span<const MomentScalingRow> rows) {
  os << "L,n,moment,ratio\n";
  for (const auto& r : rows) {
    os << L << ',' << r.n << ',' << fmt_double(r.moment) << ',' << fmt_double(r.ratio) << '\n';
  }
}

}  // namespace qwalk
