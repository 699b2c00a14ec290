#include "qwalk/lattice_state.hpp"

#include <cmath>
#include <ostream>

#include "qwalk/numeric_format.hpp"

namespace qwalk {

WalkState::WalkState(std::int64_t offset, std::vector<cplx> amplitudes)
    : offset_(offset), amp_(std::move(amplitudes)) {}

WalkState WalkState::zeros(std::int64_t site_lo, std::int64_t site_hi) {
  const std::int64_t n = 2 * (site_hi - site_lo + 1);
  return WalkState(2 * site_lo, std::vector<cplx>(static_cast<std::size_t>(std::max<std::int64_t>(n, 0))));
}

cplx WalkState::at(std::int64_t m) const noexcept {
  if (m < offset_ || m > last_index()) return {};
  return amp_[static_cast<std::size_t>(m - offset_)];
}

double WalkState::norm2() const noexcept {
  double s = 0.0;
  for (const cplx& a : amp_) s += std::norm(a);
  return s;
}

std::vector<double> WalkState::site_probabilities() const {
  if (amp_.empty()) return {};
  const std::int64_t lo = first_site();
  const std::int64_t hi = last_site();
  std::vector<double> p(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (std::size_t i = 0; i < amp_.size(); ++i) {
    const std::int64_t m = offset_ + static_cast<std::int64_t>(i);
    p[static_cast<std::size_t>(site_of(m) - lo)] += std::norm(amp_[i]);
  }
  return p;
}

void WalkState::trim(double threshold) {
  std::size_t lo = 0;
  std::size_t hi = amp_.size();
  while (lo < hi && std::abs(amp_[lo]) < threshold) ++lo;
  while (hi > lo && std::abs(amp_[hi - 1]) < threshold) --hi;
  if (lo == 0 && hi == amp_.size()) return;
  amp_ = std::vector<cplx>(amp_.begin() + static_cast<std::ptrdiff_t>(lo),
                           amp_.begin() + static_cast<std::ptrdiff_t>(hi));
  offset_ += static_cast<std::int64_t>(lo);
}

WalkState basis_state(Spin spin, std::int64_t site) {
  return WalkState(2 * site + static_cast<int>(spin), {cplx{1.0, 0.0}});
}

WalkState coin_state(cplx up, cplx down, std::int64_t site) {
  return WalkState(2 * site, {up, down});
}

double position_moment(const WalkState& state, int L) {
  const auto p = state.site_probabilities();
  const std::int64_t lo = state.first_site();
  long double acc = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const long double k = static_cast<long double>(lo + static_cast<std::int64_t>(i));
    acc += std::pow(k, L) * static_cast<long double>(p[i]);
  }
  return static_cast<double>(acc);
}

double abs_position_moment(const WalkState& state, double L) {
  const auto p = state.site_probabilities();
  const std::int64_t lo = state.first_site();
  long double acc = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const long double k = std::fabs(static_cast<long double>(lo + static_cast<std::int64_t>(i)));
    acc += std::pow(k, static_cast<long double>(L)) * static_cast<long double>(p[i]);
  }
  return static_cast<double>(acc);
}

void write_state_csv(std::ostream& os, const WalkState& state) {
  os << "site,spin,re,im\n";
  for (std::int64_t m = state.offset(); m <= state.last_index(); ++m) {
    const cplx a = state.at(m);
    os << site_of(m) << ',' << (spin_of(m) == 0 ? "up" : "down") << ',' << fmt_double(a.real())
       << ',' << fmt_double(a.imag()) << '\n';
  }
}

}  // namespace qwalk
