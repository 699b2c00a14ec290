#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qwalk/coin_model.hpp"

namespace qwalk {

enum class Spin { kUp = 0, kDown = 1 };

/// Finitely supported state on ℂ²⊗l²(ℤ) stored over relabeled indices
/// m = offset, offset+1, ... with e_{2k} = ↑⊗k and e_{2k+1} = ↓⊗k.
class WalkState {
 public:
  WalkState() = default;
  WalkState(std::int64_t offset, std::vector<cplx> amplitudes);

  /// Zero state covering sites [site_lo, site_hi] (both spins).
  static WalkState zeros(std::int64_t site_lo, std::int64_t site_hi);

  [[nodiscard]] std::int64_t offset() const noexcept { return offset_; }
  [[nodiscard]] std::int64_t last_index() const noexcept {
    return offset_ + static_cast<std::int64_t>(amp_.size()) - 1;
  }
  [[nodiscard]] IndexRange window() const noexcept { return {offset_, last_index()}; }
  [[nodiscard]] std::size_t size() const noexcept { return amp_.size(); }

  [[nodiscard]] const std::vector<cplx>& amplitudes() const noexcept { return amp_; }
  [[nodiscard]] std::vector<cplx>& amplitudes() noexcept { return amp_; }

  /// Amplitude on relabeled index m; zero outside the stored window.
  [[nodiscard]] cplx at(std::int64_t m) const noexcept;
  [[nodiscard]] cplx at(Spin s, std::int64_t site) const noexcept {
    return at(2 * site + static_cast<int>(s));
  }

  [[nodiscard]] double norm2() const noexcept;

  /// Site range [lo, hi] touched by the stored window.
  [[nodiscard]] std::int64_t first_site() const noexcept { return site_of(offset_); }
  [[nodiscard]] std::int64_t last_site() const noexcept { return site_of(last_index()); }

  /// Site probabilities |ψ_{2k}|² + |ψ_{2k+1}|² for k in [first_site, last_site].
  [[nodiscard]] std::vector<double> site_probabilities() const;

  /// Drops edge amplitudes with modulus below `threshold`.
  void trim(double threshold = 1e-300);

 private:
  std::int64_t offset_ = 0;
  std::vector<cplx> amp_;
};

WalkState basis_state(Spin spin, std::int64_t site);

/// α|↑⟩⊗|site⟩ + β|↓⟩⊗|site⟩
WalkState coin_state(cplx up, cplx down, std::int64_t site = 0);

/// Σ_k k^L (|ψ_{2k}|² + |ψ_{2k+1}|²) in the physical site coordinate.
double position_moment(const WalkState& state, int L);

/// Σ_k |k|^L (|ψ_{2k}|² + |ψ_{2k+1}|²).
double abs_position_moment(const WalkState& state, double L);

/// CSV rows (site, spin, re, im) with a header line; spin is "up" or "down".
void write_state_csv(std::ostream& os, const WalkState& state);

}  // namespace qwalk
