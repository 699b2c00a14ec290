#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/random.hpp"

namespace qwalk {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Wraps an angle into [0, 2π).
double wrap_phase(double angle) noexcept;

/// Inclusive range of relabeled lattice indices.
struct IndexRange {
  std::int64_t first = 0;
  std::int64_t last = -1;

  [[nodiscard]] bool empty() const noexcept { return last < first; }
  [[nodiscard]] std::size_t size() const noexcept {
    return empty() ? 0 : static_cast<std::size_t>(last - first + 1);
  }
  [[nodiscard]] bool contains(std::int64_t m) const noexcept { return m >= first && m <= last; }
  bool operator==(const IndexRange&) const = default;
};

/// Lattice site k of relabeled index m (e_{2k} = ↑⊗k, e_{2k+1} = ↓⊗k).
constexpr std::int64_t site_of(std::int64_t m) noexcept {
  return m >= 0 ? m / 2 : -((-m + 1) / 2);
}
/// 0 for ↑, 1 for ↓.
constexpr int spin_of(std::int64_t m) noexcept { return static_cast<int>(m - 2 * site_of(m)); }

/// Normal-form coin amplitudes: r² + t² = 1, both nonnegative.
struct CoinParams {
  double r = 0.0;
  double t = 1.0;
};

/// Builds (r = √(1−t²), t). Throws std::domain_error unless 0 ≤ t ≤ 1.
CoinParams make_coin(double t);

/// The random coin diag(e^{-iω↑}, e^{-iω↓})·[[t, −r], [r, t]].
Eigen::Matrix2cd coin_matrix(const CoinParams& coin, double phase_up = 0.0,
                             double phase_down = 0.0);

/// Deterministic part [[t, −r], [r, t]] of the normal-form coin.
Eigen::Matrix2cd normal_coin_matrix(const CoinParams& coin);

/// General U(2) coin e^{-iθ}[[t e^{-iα}, i r e^{iγ}], [i r e^{-iγ}, t e^{iα}]].
struct GeneralCoin {
  double t = 1.0;
  double r = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
  double theta = 0.0;

  [[nodiscard]] Eigen::Matrix2cd matrix() const;
};

/// Throws ValidationError when the coin matrix is not unitary to 1e-12.
void validate(const GeneralCoin& g);

class PhaseDistribution {
 public:
  enum class Kind { kUniformFull, kUniformInterval, kPointMass };

  static PhaseDistribution uniform_full();
  static PhaseDistribution uniform_interval(double a, double b);
  static PhaseDistribution point_mass(double value);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double lower() const noexcept { return a_; }
  [[nodiscard]] double upper() const noexcept { return b_; }
  [[nodiscard]] double value() const noexcept { return a_; }

  /// Absolutely continuous with bounded density (the localization hypotheses).
  [[nodiscard]] bool bounded_density() const noexcept { return kind_ != Kind::kPointMass; }

  /// |E e^{-iω}|, exact for every supported kind.
  [[nodiscard]] double circular_mean_modulus() const noexcept;

  /// Maps 64 random bits to a phase in [0, 2π).
  [[nodiscard]] double sample(std::uint64_t bits) const noexcept;

  [[nodiscard]] std::string describe() const;

 private:
  PhaseDistribution(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  Kind kind_;
  double a_;
  double b_;
};

/// Phase ω_m for relabeled index m: pure function of (dist, seed, stream, m).
double phase_at(const PhaseDistribution& dist, std::uint64_t seed, Stream stream,
                std::int64_t m) noexcept;

/// i.i.d. phases ω_m over a window of relabeled indices, ω↑_k = ω_{2k}, ω↓_k = ω_{2k+1}.
class PhaseSequence {
 public:
  PhaseSequence() = default;
  PhaseSequence(IndexRange window, std::vector<double> values, std::uint64_t seed = 0);

  /// All phases equal to `value` on the window.
  static PhaseSequence constant(IndexRange window, double value);

  [[nodiscard]] const IndexRange& window() const noexcept { return window_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  /// Throws WindowError outside the window.
  [[nodiscard]] double at(std::int64_t m) const;
  [[nodiscard]] double operator[](std::int64_t m) const noexcept {
    return values_[static_cast<std::size_t>(m - window_.first)];
  }

 private:
  IndexRange window_{};
  std::vector<double> values_;
  std::uint64_t seed_ = 0;
};

/// Draws one phase per relabeled index of `window`. Throws WindowError on an empty window.
PhaseSequence sample_phases(const PhaseDistribution& dist, IndexRange window, std::uint64_t seed,
                            Stream stream = Stream::kSpatial);

// ---------------------------------------------------------------------------
// Gauge reductions

/// Diagonal gauge V e_m = e^{iζ_m} e_m on a window of relabeled indices.
struct GaugePhases {
  IndexRange window;
  std::vector<double> zeta;

  [[nodiscard]] double operator[](std::int64_t m) const {
    return zeta[static_cast<std::size_t>(m - window.first)];
  }
};

/// Result of reducing a general coin family to normal form.
///
/// With W = (Σ⁻¹ ⊗ 𝟙)·V, the band operators satisfy
/// global_phase · W⁻¹ U_general W = U_normal for every phase realization.
struct CoinReduction {
  CoinParams coin;
  /// Spin conjugation Σ = diag(1, −i e^{iγ}), stored as its two diagonal entries.
  std::array<cplx, 2> sigma{};
  /// α-removing gauge ζ_{2k+2} = ζ_{2k+1} = −kα.
  GaugePhases zeta;
  /// e^{iθ}
  cplx global_phase{1.0, 0.0};

  /// Combined diagonal of W as phases per relabeled index.
  [[nodiscard]] GaugePhases combined() const;
};

CoinReduction reduce_general_coin(const GeneralCoin& g, IndexRange window);

/// Max entrywise error of global_phase·W⁻¹U_general W − U_normal on the window interior,
/// for the given phase realization.
double verify_reduction(const GeneralCoin& g, const CoinReduction& red,
                        const PhaseSequence& phases);

/// Cumulative-sum gauge removing the site phases of the Konno coin
/// [[t e^{iω_k}, r], [r, −t e^{−iω_k}]] with ω_k read from the even entries ω_{2k}.
/// Requires index 0 inside the window; ζ_0 = ζ_{−1} = 0.
GaugePhases konno_gauge(const PhaseSequence& phases);

Eigen::Matrix2cd konno_coin(const CoinParams& coin, double site_phase);

/// Max entrywise error of V⁻¹ Ũ_ω V − Ũ_0 on the window interior.
double verify_konno_gauge(const CoinParams& coin, const PhaseSequence& phases,
                          const GaugePhases& zeta);

}  // namespace qwalk
