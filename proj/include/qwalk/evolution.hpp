#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qwalk/banded.hpp"
#include "qwalk/band_operator.hpp"
#include "qwalk/coin_model.hpp"
#include "qwalk/lattice_state.hpp"

namespace qwalk {

// The walk operator is used in band form U_ω = D_ω S with S = S_o S_e: the phase factor
// e^{-iω_m} multiplies the amplitude arriving at relabeled index m. In spin/site language
//   U ↑⊗k = e^{-iω_{2k+2}} t ↑⊗(k+1) + e^{-iω_{2k-1}} r ↓⊗(k-1)
//   U ↓⊗k = −e^{-iω_{2k+2}} r ↑⊗(k+1) + e^{-iω_{2k-1}} t ↓⊗(k-1)
// which is the coin diag(e^{-iω↑_k}, e^{-iω↓_k})[[t,−r],[r,t]] with ω↑_k = ω_{2k+2},
// ω↓_k = ω_{2k−1}.

enum class RegimeKind { kDeterministic, kSpatial, kTemporal };

struct Regime {
  RegimeKind kind = RegimeKind::kDeterministic;
  PhaseDistribution dist = PhaseDistribution::point_mass(0.0);
  std::uint64_t seed = 0;

  /// Every phase equal to `phase`, every step.
  static Regime deterministic(double phase = 0.0) {
    return {RegimeKind::kDeterministic, PhaseDistribution::point_mass(phase), 0};
  }
  /// One realization ω_m drawn once and frozen in time.
  static Regime spatial(const PhaseDistribution& dist, std::uint64_t seed) {
    return {RegimeKind::kSpatial, dist, seed};
  }
  /// Fresh pair (ω↑_j, ω↓_j) at every step j, the same on all sites.
  static Regime temporal(const PhaseDistribution& dist, std::uint64_t seed) {
    return {RegimeKind::kTemporal, dist, seed};
  }
};

/// Phase pair used at time step j ≥ 1 of a temporal-regime run.
std::pair<double, double> temporal_phases(const Regime& regime, std::int64_t step);

/// One application of U_ω. `phases` must cover every destination index
/// (the state's sites extended by one on each side); throws WindowError otherwise.
WalkState apply_step(const WalkState& state, const CoinParams& coin, const PhaseSequence& phases);

/// One step of Σ_k (P↑ C_k ⊗ |k+1⟩⟨k| + P↓ C_k ⊗ |k−1⟩⟨k|) with C_k = site_coin(k).
WalkState apply_walk_step(const WalkState& state,
                          const std::function<Eigen::Matrix2cd(std::int64_t)>& site_coin);

/// Streams U_ω over time with buffers pre-sized to the light cone.
class Walker {
 public:
  Walker(const WalkState& initial, const CoinParams& coin, const Regime& regime, std::int64_t n_max);

  void step();
  [[nodiscard]] std::int64_t time() const noexcept { return time_; }

  [[nodiscard]] WalkState state() const;
  [[nodiscard]] double moment(int L) const;
  [[nodiscard]] double norm2() const;
  [[nodiscard]] std::vector<double> site_probabilities() const;
  /// Site of the first entry of site_probabilities().
  [[nodiscard]] std::int64_t first_site() const noexcept { return site_lo_ + active_lo_; }

 private:
  CoinParams coin_;
  Regime regime_;
  std::int64_t n_max_;
  std::int64_t time_ = 0;
  std::int64_t site_lo_;  // site of buffer slot 0
  std::int64_t active_lo_;
  std::int64_t active_hi_;  // inclusive slot range holding the support
  std::vector<cplx> cur_;
  std::vector<cplx> next_;
  std::vector<cplx> phase_factor_;  // spatial regime: e^{-iω_m} per buffer index
};

/// U^n applied to `initial` in the given regime.
WalkState evolve(const WalkState& initial, const CoinParams& coin, std::int64_t n,
                 const Regime& regime);

struct MomentSeries {
  int L = 0;
  std::uint64_t seed = 0;
  /// values[n] = ⟨X^L⟩(n), n = 0..n_max
  std::vector<double> values;
};

std::vector<MomentSeries> moment_series(const WalkState& initial, const CoinParams& coin,
                                        const Regime& regime, std::span<const int> L_list,
                                        std::int64_t n_max);

/// Evolves e_0 for n steps under the site-random coins konno_coin(coin, ω_{2k}) and the
/// gauge-transformed initial state under the fixed coin konno_coin(coin, 0); returns the
/// largest difference between the two site distributions. `phases` must contain index 0
/// and cover indices [−2n−2, 2n+3].
double konno_distribution_gap(const CoinParams& coin, const PhaseSequence& phases, std::int64_t n);

// ---------------------------------------------------------------------------
// Truncated band matrices

enum class Truncation { kFinite, kSemifinitePlus, kSemifiniteMinus, kNone };

/// Materialized U on a window [2n₀, 2m₀] of relabeled indices.
/// kFinite is the exactly unitary finite-volume propagator; kSemifinitePlus keeps the left
/// boundary and is open on the right, kSemifiniteMinus the reverse, kNone restricts the
/// infinite operator. Rows touching an open end are inexact.
struct BandUnitary {
  IndexRange window;
  CoinParams coin;
  Truncation truncation = Truncation::kFinite;
  BandMatrix matrix;

  [[nodiscard]] bool left_exact() const noexcept {
    return truncation == Truncation::kFinite || truncation == Truncation::kSemifinitePlus;
  }
  [[nodiscard]] bool right_exact() const noexcept {
    return truncation == Truncation::kFinite || truncation == Truncation::kSemifiniteMinus;
  }
};

/// Throws WindowError for odd endpoints or when `phases` does not cover the window.
BandUnitary build_band_matrix(IndexRange window, const CoinParams& coin, const PhaseSequence& phases,
                              Truncation truncation);

}  // namespace qwalk
