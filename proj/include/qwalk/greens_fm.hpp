#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/coin_model.hpp"
#include "qwalk/evolution.hpp"

namespace qwalk {

/// Minimum distance of |z| from the unit circle accepted by the resolvent routines.
inline constexpr double kUnitCircleMargin = 1e-3;

struct GreensQuery {
  cplx z;
  std::int64_t k = 0;
  std::int64_t l = 0;
  /// [2n₀, 2m₀]
  IndexRange window;
  Truncation truncation = Truncation::kFinite;
};

/// Throws NumericalError if |z| is within kUnitCircleMargin of 1, std::domain_error for z = 0,
/// WindowError if k or l lies outside the window.
void validate(const GreensQuery& q);

/// Column G(·, l) of (U − z)⁻¹ on the truncated window by banded LU with partial pivoting.
/// `residual` receives max |[(U − z)g − e_l]_k|.
std::vector<cplx> greens_column(cplx z, std::int64_t l, IndexRange window, const CoinParams& coin,
                                const PhaseSequence& phases, Truncation truncation = Truncation::kFinite,
                                double* residual = nullptr);

/// G(k, l) by direct solve. Throws NumericalError if the residual exceeds 1e-10 (scaled by ‖g‖∞).
cplx greens_direct(const GreensQuery& q, const CoinParams& coin, const PhaseSequence& phases);

/// G(k, l) of the finite truncation from the boundary solutions φ^a (left, Side::kPlus) and
/// φ^b (right, Side::kMinus). Valid for columns 2n₀+1 ≤ l ≤ 2m₀ and every row of the window;
/// the corner (2n₀, 2m₀) uses its dedicated closed form. Throws NumericalError when the
/// Wronskian-type denominator vanishes to 1e-12 relative.
cplx greens_formula(const GreensQuery& q, const CoinParams& coin, const PhaseSequence& phases);

/// Corner element ⟨e_{2n₀}, G e_{2m₀}⟩ of the finite truncation.
cplx greens_corner(cplx z, IndexRange window, const CoinParams& coin, const PhaseSequence& phases);

struct FractionalMomentRow {
  std::int64_t distance = 0;
  std::int64_t k = 0;
  std::int64_t l = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct DecayFit {
  double C_hat = 0.0;
  double alpha_hat = 0.0;
  double alpha_stderr = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

struct FractionalMomentEstimate {
  cplx z;
  double s = 1.0 / 3.0;
  int replicas = 0;
  IndexRange window;
  std::vector<FractionalMomentRow> rows;
};

struct FractionalMomentOptions {
  int replicas = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  /// Empty: derived from the pairs with padding 2·max distance on both sides.
  IndexRange window{};
};

/// Even-aligned window around the pairs with `padding` extra indices on each side.
IndexRange padded_window(std::span<const std::pair<std::int64_t, std::int64_t>> pairs,
                         std::int64_t padding);

/// Pairs (l + d, l) for each distance d.
std::vector<std::pair<std::int64_t, std::int64_t>> distance_pairs(std::span<const std::int64_t> distances,
                                                                  std::int64_t l);

/// Monte Carlo E[|G(k,l)|^s] per (k, l) pair over i.i.d. realizations of the finite truncation.
FractionalMomentEstimate fractional_moment(cplx z, double s,
                                           std::span<const std::pair<std::int64_t, std::int64_t>> pairs,
                                           const PhaseDistribution& dist, const CoinParams& coin,
                                           const FractionalMomentOptions& opt);

/// Weighted least squares of log E against distance: E ≈ C e^{−α d}. Rows sharing a distance
/// are pooled. Throws NumericalError for nonpositive estimates, std::invalid_argument for
/// fewer than four distinct distances.
DecayFit decay_fit(std::span<const FractionalMomentRow> rows);

/// CSV rows (distance, s, re_z, im_z, mean, stderr, replicas).
void write_fractional_moment_csv(std::ostream& os, const FractionalMomentEstimate& est);

nlohmann::json to_json(const DecayFit& fit);

}  // namespace qwalk
