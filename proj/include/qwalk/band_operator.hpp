#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

#include "qwalk/coin_model.hpp"

namespace qwalk {

/// Image U e_m of one basis vector under a coined walk operator: at most two nonzero rows.
struct ColumnImage {
  std::array<std::int64_t, 2> row{};
  std::array<cplx, 2> value{};
};

/// Column image of the walk U = Σ_k (P↑ C_k ⊗ |k+1⟩⟨k| + P↓ C_k ⊗ |k−1⟩⟨k|),
/// C_k = `site_coin(k)`, in the basis e_{2k} = ↑⊗k, e_{2k+1} = ↓⊗k.
template <class SiteCoin>
ColumnImage walk_column(std::int64_t m, SiteCoin&& site_coin) {
  const std::int64_t k = site_of(m);
  const int spin = spin_of(m);
  const Eigen::Matrix2cd c = site_coin(k);
  ColumnImage img;
  img.row = {2 * (k + 1), 2 * (k - 1) + 1};
  img.value = {c(0, spin), c(1, spin)};
  return img;
}

/// Column image of the band form U_ω = D_ω S for a deterministic coin [[a, b], [c, d]]:
/// the phase e^{-iω} is attached to the destination index.
inline ColumnImage band_column(std::int64_t m, const Eigen::Matrix2cd& coin,
                               const PhaseSequence& phases) {
  const std::int64_t k = site_of(m);
  const int spin = spin_of(m);
  ColumnImage img;
  img.row = {2 * (k + 1), 2 * (k - 1) + 1};
  for (int q = 0; q < 2; ++q) {
    const double w = phases.window().contains(img.row[q]) ? phases[img.row[q]] : 0.0;
    img.value[q] = std::polar(1.0, -w) * coin(q, spin);
  }
  return img;
}

/// Dense restriction of an operator (given by column images) to `window`;
/// entries whose row falls outside the window are dropped.
template <class ColumnFn>
Eigen::MatrixXcd materialize(IndexRange window, ColumnFn&& column) {
  const auto n = static_cast<Eigen::Index>(window.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (std::int64_t j = window.first; j <= window.last; ++j) {
    const ColumnImage img = column(j);
    for (int q = 0; q < 2; ++q) {
      if (window.contains(img.row[q])) {
        out(img.row[q] - window.first, j - window.first) += img.value[q];
      }
    }
  }
  return out;
}

}  // namespace qwalk
