#include "qwalk/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qwalk/errors.hpp"

namespace qwalk {

std::pair<double, double> temporal_phases(const Regime& regime, std::int64_t step) {
  return {phase_at(regime.dist, regime.seed, Stream::kTemporal, 2 * step),
          phase_at(regime.dist, regime.seed, Stream::kTemporal, 2 * step + 1)};
}

WalkState apply_step(const WalkState& state, const CoinParams& coin, const PhaseSequence& phases) {
  if (state.size() == 0) return state;
  const std::int64_t lo = state.first_site();
  const std::int64_t hi = state.last_site();
  // destinations: ↓ at sites lo−1..hi−1, ↑ at sites lo+1..hi+1
  const IndexRange needed{2 * (lo - 1) + 1, 2 * (hi + 1)};
  if (!phases.window().contains(needed.first) || !phases.window().contains(needed.last)) {
    throw WindowError("apply_step: phase window [" + std::to_string(phases.window().first) + "," +
                      std::to_string(phases.window().last) + "] does not cover destinations [" +
                      std::to_string(needed.first) + "," + std::to_string(needed.last) + "]");
  }
  WalkState out = WalkState::zeros(lo - 1, hi + 1);
  auto& a = out.amplitudes();
  for (std::int64_t k = lo; k <= hi; ++k) {
    const cplx up = state.at(2 * k);
    const cplx down = state.at(2 * k + 1);
    const std::int64_t m_up = 2 * (k + 1);
    const std::int64_t m_down = 2 * (k - 1) + 1;
    a[static_cast<std::size_t>(m_up - out.offset())] =
        std::polar(1.0, -phases[m_up]) * (coin.t * up - coin.r * down);
    a[static_cast<std::size_t>(m_down - out.offset())] =
        std::polar(1.0, -phases[m_down]) * (coin.r * up + coin.t * down);
  }
  return out;
}

WalkState apply_walk_step(const WalkState& state,
                          const std::function<Eigen::Matrix2cd(std::int64_t)>& site_coin) {
  if (state.size() == 0) return state;
  const std::int64_t lo = state.first_site();
  const std::int64_t hi = state.last_site();
  WalkState out = WalkState::zeros(lo - 1, hi + 1);
  auto& a = out.amplitudes();
  for (std::int64_t k = lo; k <= hi; ++k) {
    const Eigen::Matrix2cd c = site_coin(k);
    const cplx up = state.at(2 * k);
    const cplx down = state.at(2 * k + 1);
    a[static_cast<std::size_t>(2 * (k + 1) - out.offset())] += c(0, 0) * up + c(0, 1) * down;
    a[static_cast<std::size_t>(2 * (k - 1) + 1 - out.offset())] += c(1, 0) * up + c(1, 1) * down;
  }
  return out;
}

// ---------------------------------------------------------------------------

Walker::Walker(const WalkState& initial, const CoinParams& coin, const Regime& regime,
               std::int64_t n_max)
    : coin_(coin), regime_(regime), n_max_(n_max) {
  if (n_max < 0) throw std::invalid_argument("Walker: n_max must be nonnegative");
  const std::int64_t lo = initial.size() ? initial.first_site() : 0;
  const std::int64_t hi = initial.size() ? initial.last_site() : 0;
  site_lo_ = lo - n_max - 1;
  const std::int64_t n_sites = (hi + n_max + 1) - site_lo_ + 1;
  cur_.assign(static_cast<std::size_t>(2 * n_sites), cplx{});
  next_ = cur_;
  active_lo_ = lo - site_lo_;
  active_hi_ = hi - site_lo_;
  for (std::int64_t m = initial.offset(); m <= initial.last_index(); ++m) {
    cur_[static_cast<std::size_t>(m - 2 * site_lo_)] = initial.at(m);
  }
  if (regime_.kind == RegimeKind::kSpatial) {
    phase_factor_.resize(cur_.size());
    for (std::size_t i = 0; i < cur_.size(); ++i) {
      const std::int64_t m = 2 * site_lo_ + static_cast<std::int64_t>(i);
      phase_factor_[i] = std::polar(1.0, -phase_at(regime_.dist, regime_.seed, Stream::kSpatial, m));
    }
  }
}

void Walker::step() {
  if (time_ >= n_max_) throw std::out_of_range("Walker: stepped past n_max");
  cplx f_up{1.0, 0.0};
  cplx f_down{1.0, 0.0};
  if (regime_.kind == RegimeKind::kDeterministic) {
    f_up = f_down = std::polar(1.0, -regime_.dist.value());
  } else if (regime_.kind == RegimeKind::kTemporal) {
    const auto [w_up, w_down] = temporal_phases(regime_, time_ + 1);
    f_up = std::polar(1.0, -w_up);
    f_down = std::polar(1.0, -w_down);
  }
  const bool spatial = regime_.kind == RegimeKind::kSpatial;
  const double t = coin_.t;
  const double r = coin_.r;
  const auto lo = static_cast<std::size_t>(active_lo_);
  const auto hi = static_cast<std::size_t>(active_hi_);
  for (std::size_t i = 2 * (lo - 1); i < 2 * (hi + 2); ++i) next_[i] = cplx{};
  for (std::size_t s = lo; s <= hi; ++s) {
    const cplx up = cur_[2 * s];
    const cplx down = cur_[2 * s + 1];
    const std::size_t m_up = 2 * (s + 1);
    const std::size_t m_down = 2 * (s - 1) + 1;
    const cplx g_up = spatial ? phase_factor_[m_up] : f_up;
    const cplx g_down = spatial ? phase_factor_[m_down] : f_down;
    next_[m_up] = g_up * (t * up - r * down);
    next_[m_down] = g_down * (r * up + t * down);
  }
  std::swap(cur_, next_);
  --active_lo_;
  ++active_hi_;
  ++time_;
}

WalkState Walker::state() const {
  const auto lo = static_cast<std::size_t>(active_lo_);
  const auto hi = static_cast<std::size_t>(active_hi_);
  std::vector<cplx> amp(cur_.begin() + static_cast<std::ptrdiff_t>(2 * lo),
                        cur_.begin() + static_cast<std::ptrdiff_t>(2 * hi + 2));
  return WalkState(2 * (site_lo_ + active_lo_), std::move(amp));
}

double Walker::moment(int L) const {
  long double acc = 0.0L;
  for (std::int64_t s = active_lo_; s <= active_hi_; ++s) {
    const auto i = static_cast<std::size_t>(s);
    const double p = std::norm(cur_[2 * i]) + std::norm(cur_[2 * i + 1]);
    if (p == 0.0) continue;
    const auto k = static_cast<long double>(site_lo_ + s);
    long double kl = 1.0L;
    for (int q = 0; q < L; ++q) kl *= k;
    acc += kl * static_cast<long double>(p);
  }
  return static_cast<double>(acc);
}

double Walker::norm2() const {
  double s = 0.0;
  for (std::int64_t i = 2 * active_lo_; i <= 2 * active_hi_ + 1; ++i) {
    s += std::norm(cur_[static_cast<std::size_t>(i)]);
  }
  return s;
}

std::vector<double> Walker::site_probabilities() const {
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(active_hi_ - active_lo_ + 1));
  for (std::int64_t s = active_lo_; s <= active_hi_; ++s) {
    const auto i = static_cast<std::size_t>(s);
    p.push_back(std::norm(cur_[2 * i]) + std::norm(cur_[2 * i + 1]));
  }
  return p;
}

WalkState evolve(const WalkState& initial, const CoinParams& coin, std::int64_t n,
                 const Regime& regime) {
  if (n < 0) throw std::invalid_argument("evolve: n must be nonnegative");
  if (n == 0) return initial;
  Walker w(initial, coin, regime, n);
  for (std::int64_t j = 0; j < n; ++j) w.step();
  return w.state();
}

std::vector<MomentSeries> moment_series(const WalkState& initial, const CoinParams& coin,
                                        const Regime& regime, std::span<const int> L_list,
                                        std::int64_t n_max) {
  std::vector<MomentSeries> out;
  out.reserve(L_list.size());
  for (int L : L_list) {
    out.push_back(MomentSeries{L, regime.seed, {}});
    out.back().values.reserve(static_cast<std::size_t>(n_max + 1));
  }
  Walker w(initial, coin, regime, n_max);
  for (std::int64_t n = 0;; ++n) {
    for (auto& s : out) s.values.push_back(w.moment(s.L));
    if (n == n_max) break;
    w.step();
  }
  return out;
}

double konno_distribution_gap(const CoinParams& coin, const PhaseSequence& phases, std::int64_t n) {
  const IndexRange w = phases.window();
  if (!w.contains(-2 * n - 2) || !w.contains(2 * n + 3)) {
    throw WindowError("konno_distribution_gap: phases do not cover the light cone");
  }
  const GaugePhases zeta = konno_gauge(phases);
  WalkState random = basis_state(Spin::kUp, 0);
  // U_random = W U_fixed W⁻¹ with W = diag(e^{iζ_m}), so the fixed walk starts from W⁻¹e_0
  WalkState fixed = coin_state(std::polar(1.0, -zeta[0]), 0.0, 0);
  const Eigen::Matrix2cd c0 = konno_coin(coin, 0.0);
  for (std::int64_t j = 0; j < n; ++j) {
    random = apply_walk_step(random, [&](std::int64_t k) { return konno_coin(coin, phases[2 * k]); });
    fixed = apply_walk_step(fixed, [&](std::int64_t) { return c0; });
  }
  const std::vector<double> pr = random.site_probabilities();
  const std::vector<double> pf = fixed.site_probabilities();
  double gap = 0.0;
  for (std::size_t i = 0; i < std::max(pr.size(), pf.size()); ++i) {
    const double a = i < pr.size() ? pr[i] : 0.0;
    const double b = i < pf.size() ? pf[i] : 0.0;
    gap = std::max(gap, std::abs(a - b));
  }
  if (random.first_site() != fixed.first_site()) throw std::logic_error("konno_distribution_gap: misaligned supports");
  return gap;
}

// ---------------------------------------------------------------------------

BandUnitary build_band_matrix(IndexRange window, const CoinParams& coin, const PhaseSequence& phases,
                              Truncation truncation) {
  if (window.empty() || window.first % 2 != 0 || window.last % 2 != 0) {
    throw WindowError("build_band_matrix: window endpoints must be even relabeled indices");
  }
  if (!phases.window().contains(window.first) || !phases.window().contains(window.last)) {
    throw WindowError("build_band_matrix: phases do not cover the window");
  }
  BandUnitary u{window, coin, truncation, BandMatrix(window.size(), 2, 2)};
  const bool left = u.left_exact();
  const bool right = u.right_exact();
  auto put = [&](std::int64_t row, std::int64_t col, cplx v) {
    if (!window.contains(col)) return;
    u.matrix.ref(static_cast<std::size_t>(row - window.first),
                 static_cast<std::size_t>(col - window.first)) = v;
  };
  for (std::int64_t i = window.first; i <= window.last; ++i) {
    const cplx d = std::polar(1.0, -phases[i]);
    if (left && i == window.first) {
      put(i, i, d * coin.r);
      put(i, i + 1, d * coin.t);
    } else if (right && i == window.last - 1) {
      put(i, i + 1, d);
    } else if (i % 2 != 0) {
      put(i, i + 1, d * coin.r);
      put(i, i + 2, d * coin.t);
    } else {
      put(i, i - 2, d * coin.t);
      put(i, i - 1, -d * coin.r);
    }
  }
  return u;
}

}  // namespace qwalk
