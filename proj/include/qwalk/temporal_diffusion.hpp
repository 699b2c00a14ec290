#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "qwalk/coin_model.hpp"

namespace qwalk {

/// Classical walk whose first step is +1 with probability a, and which afterwards repeats
/// its previous step with probability persist = t² and reverses it with flip = r².
struct PersistentRWParams {
  double a = 0.5;
  double b = 0.5;
  double persist = 0.5;
  double flip = 0.5;
};

void validate(const PersistentRWParams& p);

/// Probabilities over sites k = −n..n.
struct DistributionTable {
  std::int64_t n = 0;
  std::vector<double> w;  // w[k + n]

  [[nodiscard]] double at(std::int64_t k) const noexcept {
    return k < -n || k > n ? 0.0 : w[static_cast<std::size_t>(k + n)];
  }
  [[nodiscard]] int parity() const noexcept { return static_cast<int>(n & 1); }
  [[nodiscard]] double total() const;
};

/// Initial coin state α|↑⟩ + β|↓⟩.
struct CoinSpinor {
  cplx up{1.0, 0.0};
  cplx down{0.0, 0.0};
};

/// W_k(n) for φ₀⊗|0⟩ evolved with the phase pair (ω↑_j, ω↓_j) at step j (entry j−1 of
/// `step_phases`, applied on every site).
DistributionTable quantum_distribution(const CoinParams& coin,
                                       std::span<const std::pair<double, double>> step_phases,
                                       const CoinSpinor& phi0, std::int64_t n);

/// Same, with the phase pairs drawn from the temporal stream of `seed`.
DistributionTable quantum_distribution(const CoinParams& coin, const PhaseDistribution& dist,
                                       std::uint64_t seed, const CoinSpinor& phi0, std::int64_t n);

/// Throws ValidationError if |α|² + |β|² differs from 1 by more than 1e-12.
PersistentRWParams prw_params(const CoinSpinor& phi0, const CoinParams& coin);

/// Exact distribution of the persistent walk after n ≥ 1 steps, O(n²).
DistributionTable prw_distribution(const PersistentRWParams& p, std::int64_t n);

struct SiteComparison {
  std::int64_t k = 0;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  double exact = 0.0;
  double z_score = 0.0;
};

struct ComparisonReport {
  std::int64_t n = 0;
  int replicas = 0;
  std::uint64_t seed = 0;
  double max_abs_deviation = 0.0;
  double max_abs_z = 0.0;
  std::vector<SiteComparison> sites;
};

/// Sites whose Monte Carlo spread vanishes are scored against this floor.
inline constexpr double kStderrFloor = 1e-12;

/// Monte Carlo mean of W_k(n) over replicas compared with the persistent walk. Throws
/// HypothesisError unless E e^{−iω} = 0 for `dist`.
ComparisonReport mc_vs_exact(const CoinParams& coin, const CoinSpinor& phi0,
                             const PhaseDistribution& dist, std::int64_t n, int replicas,
                             std::uint64_t seed, int workers = 1);

nlohmann::json to_json(const ComparisonReport& report);

/// [[t²e^{iy}, r²e^{iy}], [r²e^{−iy}, t²e^{−iy}]]
Eigen::Matrix2cd transition_symbol(cplx y, const CoinParams& coin);

/// Ψ_n(y) = Σ_k e^{iyk} w_k(n) by n−1 multiplications with M(y).
cplx generating_function(cplx y, std::int64_t n, const PersistentRWParams& p);

/// Σ_k e^{iyk} w_k computed directly from a table.
cplx characteristic_function(const DistributionTable& table, cplx y);

/// (L−1)!!(t²/r²)^{L/2} for even L, 0 for odd L. Throws std::domain_error for r = 0 or L < 1.
double diffusion_constant(int L, const CoinParams& coin);

/// Probabilists' Hermite value He_L(0).
double hermite_at_zero(int L);

/// (t²/r²)^{L/2} He_L(0)(−1)^L, the limit of Σ (ik)^L w_k(τ)/τ^{L/2}.
double hermite_moment_limit(int L, const CoinParams& coin);

struct MomentScalingRow {
  std::int64_t n = 0;
  double moment = 0.0;
  double ratio = 0.0;  // moment / n^{L/2}
};

/// Σ_k k^L w_k(n) / n^{L/2} from the exact recursion at each n of the increasing list.
std::vector<MomentScalingRow> moment_scaling(int L, const CoinParams& coin, const CoinSpinor& phi0,
                                             std::span<const std::int64_t> n_list);

/// Σ_k k^L w_k with compensated extended-precision summation.
double table_moment(const DistributionTable& table, int L);

void write_distribution_csv(std::ostream& os, const DistributionTable& table);
void write_moment_scaling_csv(std::ostream& os, int L, std::span<const MomentScalingRow> rows);

}  // namespace qwalk
