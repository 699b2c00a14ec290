#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/coin_model.hpp"
#include "qwalk/lattice_state.hpp"

namespace qwalk {

// Fourier convention: f(x) = Σ_k ψ(k) e^{-ikx}, under which the translation-invariant walk
// U = S(C⊗𝟙) acts as multiplication by V(x) = diag(e^{-ix}, e^{ix})·C.

/// V(x) for a deterministic coin. Throws ValidationError if C is not unitary to 1e-12.
Eigen::Matrix2cd symbol(double x, const Eigen::Matrix2cd& coin);

/// Eigen-data of V(x) at one quasi-momentum.
struct SymbolEigen {
  std::array<cplx, 2> eigenvalue;
  /// d(arg α_j)/dx from implicit differentiation of det(V(x) − α) = 0.
  std::array<double, 2> group_velocity;
  std::array<Eigen::Matrix2cd, 2> projector;
};

SymbolEigen symbol_eigen(double x, const Eigen::Matrix2cd& coin);

struct BandsData {
  std::vector<double> x;
  /// Branch-tracked eigenphases in (−π, π], continuous along the grid up to 2π wraps.
  std::array<std::vector<double>, 2> eigenphase;
  std::array<std::vector<double>, 2> group_velocity;
  std::array<std::vector<Eigen::Matrix2cd>, 2> projector;
};

/// Eigenphases, group velocities and projectors on a uniform grid of [0, 2π).
/// Throws std::invalid_argument for grid_size < 16.
BandsData bands(const Eigen::Matrix2cd& coin, int grid_size);

/// CSV rows (x, branch, eigenphase, group_velocity).
void write_bands_csv(std::ostream& os, const BandsData& data);

struct BallisticResult {
  double B = 0.0;
  /// |B(grid) − B(grid/2)|
  double quadrature_error = 0.0;
  int grid_size = 0;
};

/// lim ⟨X²⟩(n)/n² = (1/2π)∫ Σ_j v_j(x)² ‖P_j(x) f(x)‖² dx by the periodic trapezoid rule.
BallisticResult ballistic_constant(const Eigen::Matrix2cd& coin, const WalkState& initial,
                                   int grid_size = 1024);

}  // namespace qwalk
