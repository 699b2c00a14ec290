#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/coin_model.hpp"

namespace qwalk {

/// T_z(θ, η) = (e^{-iθ}/(z t))·[[z² e^{i(θ+η)} + r², −rt], [−rt, t²]], mapping
/// (ψ_{2n−1}, ψ_{2n−2}) to (ψ_{2n+1}, ψ_{2n}) for θ = ω_{2n}, η = ω_{2n−1}.
struct TransferMatrix {
  cplx z;
  Eigen::Matrix2cd m;

  /// Exact determinant e^{−i(θ−η)}.
  cplx det_expected;
};

/// Throws std::domain_error for t = 0 (singular coin) or z = 0.
TransferMatrix transfer_matrix(cplx z, double theta, double eta, const CoinParams& coin);

/// Source of phases ω_1, ω_2, ... consumed pairwise by transfer products.
using PhaseStream = std::function<double(std::int64_t)>;

/// log ‖T_z(ω_{2n}, ω_{2n−1})⋯T_z(ω_2, ω_1)‖_F with per-step renormalization.
double product_log_norm(cplx z, const CoinParams& coin, const PhaseStream& omega, std::int64_t n);

/// Same product computed through the 4×4 real embedding τ; returns log ‖τ(·)‖_F.
double product_log_norm_embedded(cplx z, const CoinParams& coin, const PhaseStream& omega,
                                 std::int64_t n);

struct LyapunovEstimate {
  cplx z;
  double gamma_hat = 0.0;
  double stderr_ = 0.0;
  std::int64_t n = 0;
  int replicas = 0;
  /// Set when the phase law lacks a bounded density.
  bool hypotheses_violated = false;
};

struct LyapunovOptions {
  std::int64_t n = 100000;
  int replicas = 32;
  std::uint64_t seed = 1;
  int workers = 1;
  bool embedded = false;
};

/// Mean over replicas of product_log_norm/n, replica standard error.
LyapunovEstimate lyapunov_estimate(cplx z, const CoinParams& coin, const PhaseDistribution& dist,
                                   const LyapunovOptions& opt);

/// Annulus grid of spectral parameters: radii × angles (radii-major order).
std::vector<cplx> annulus_grid(std::span<const double> radii, int n_angles);

/// CSV rows (re_z, im_z, gamma_hat, stderr, n, replicas).
void write_lyapunov_csv(std::ostream& os, std::span<const LyapunovEstimate> rows);

/// Real 4×4 image of a complex 2×2 matrix: each entry a ↦ I·Re a + J·Im a, J = [[0,1],[−1,0]].
Eigen::Matrix4d tau_embed(const Eigen::Matrix2cd& a);

struct NoncompactnessWitness {
  /// T(η,θ) T(η,η)⁻¹ T(θ,θ)⁻¹ T(θ,η)
  Eigen::Matrix2cd m;
  double spectral_radius = 0.0;
};

/// The witness product without the θ ≠ η precondition.
Eigen::Matrix2cd witness_matrix(cplx z, double theta, double eta, const CoinParams& coin);

/// Throws std::domain_error when θ = η (mod 2π), r = 0, t = 0 or z = 0.
NoncompactnessWitness noncompactness_witness(cplx z, double theta, double eta, const CoinParams& coin);

enum class Side { kPlus, kMinus };

/// Generalized eigenvector components φ_m, m in the window [2n₀, 2m₀], solving (U^± − z)φ = 0.
/// kPlus seeds the normalized left boundary vector (φ_{2n₀+1}, φ_{2n₀}) ∝ (z e^{iω_{2n₀}} − r, t) and
/// propagates with transfer matrices; kMinus seeds φ_{2m₀−1} = 1, φ_{2m₀} = z e^{iω_{2m₀−1}} and
/// propagates leftward.
std::vector<cplx> generalized_eigenvector(cplx z, const CoinParams& coin, const PhaseSequence& phases,
                                          IndexRange window, Side side);

}  // namespace qwalk
