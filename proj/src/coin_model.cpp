#include "qwalk/coin_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qwalk/band_operator.hpp"
#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

constexpr cplx kI{0.0, 1.0};

double unitarity_defect(const Eigen::Matrix2cd& c) {
  return (c.adjoint() * c - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

// Largest entrywise difference, skipping `margin` indices at each edge of the window.
double interior_max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, Eigen::Index margin) {
  double err = 0.0;
  for (Eigen::Index j = margin; j + margin < a.cols(); ++j) {
    for (Eigen::Index i = margin; i + margin < a.rows(); ++i) {
      err = std::max(err, std::abs(a(i, j) - b(i, j)));
    }
  }
  return err;
}

}  // namespace

double wrap_phase(double angle) noexcept {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2π
  if (w >= kTwoPi) w = 0.0;
  return w;
}

CoinParams make_coin(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error("coin transmission amplitude t must lie in [0,1], got " +
                            std::to_string(t));
  }
  return CoinParams{std::sqrt(std::max(0.0, 1.0 - t * t)), t};
}

Eigen::Matrix2cd normal_coin_matrix(const CoinParams& coin) {
  Eigen::Matrix2cd c;
  c << coin.t, -coin.r, coin.r, coin.t;
  return c;
}

Eigen::Matrix2cd coin_matrix(const CoinParams& coin, double phase_up, double phase_down) {
  Eigen::Matrix2cd c = normal_coin_matrix(coin);
  c.row(0) *= std::polar(1.0, -phase_up);
  c.row(1) *= std::polar(1.0, -phase_down);
  return c;
}

Eigen::Matrix2cd GeneralCoin::matrix() const {
  Eigen::Matrix2cd c;
  c << t * std::polar(1.0, -alpha), kI * r * std::polar(1.0, gamma),
      kI * r * std::polar(1.0, -gamma), t * std::polar(1.0, alpha);
  return std::polar(1.0, -theta) * c;
}

void validate(const GeneralCoin& g) {
  if (g.r < 0.0 || g.t < 0.0) throw ValidationError("general coin: r and t must be nonnegative");
  if (unitarity_defect(g.matrix()) > 1e-12) {
    throw ValidationError("general coin is not unitary (r^2 + t^2 != 1)");
  }
}

// ---------------------------------------------------------------------------

PhaseDistribution PhaseDistribution::uniform_full() {
  return PhaseDistribution(Kind::kUniformFull, 0.0, kTwoPi);
}

PhaseDistribution PhaseDistribution::uniform_interval(double a, double b) {
  if (!(a >= 0.0 && a < b && b <= kTwoPi)) {
    throw std::domain_error("uniform-interval requires 0 <= a < b <= 2*pi");
  }
  return PhaseDistribution(Kind::kUniformInterval, a, b);
}

PhaseDistribution PhaseDistribution::point_mass(double value) {
  const double v = wrap_phase(value);
  return PhaseDistribution(Kind::kPointMass, v, v);
}

double PhaseDistribution::circular_mean_modulus() const noexcept {
  switch (kind_) {
    case Kind::kUniformFull:
      return 0.0;
    case Kind::kUniformInterval: {
      const double w = b_ - a_;
      return std::abs(2.0 * std::sin(0.5 * w)) / w;
    }
    case Kind::kPointMass:
      return 1.0;
  }
  return 1.0;
}

double PhaseDistribution::sample(std::uint64_t bits) const noexcept {
  switch (kind_) {
    case Kind::kUniformFull:
      return to_unit_interval(bits) * kTwoPi;
    case Kind::kUniformInterval:
      return wrap_phase(a_ + (b_ - a_) * to_unit_interval(bits));
    case Kind::kPointMass:
      return a_;
  }
  return 0.0;
}

std::string PhaseDistribution::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kUniformFull:
      os << "uniform-full";
      break;
    case Kind::kUniformInterval:
      os << "uniform-interval(" << a_ << "," << b_ << ")";
      break;
    case Kind::kPointMass:
      os << "point-mass(" << a_ << ")";
      break;
  }
  return os.str();
}

double phase_at(const PhaseDistribution& dist, std::uint64_t seed, Stream stream,
                std::int64_t m) noexcept {
  return dist.sample(mix_bits(seed, static_cast<std::uint64_t>(stream), static_cast<std::uint64_t>(m)));
}

PhaseSequence::PhaseSequence(IndexRange window, std::vector<double> values, std::uint64_t seed)
    : window_(window), values_(std::move(values)), seed_(seed) {
  if (values_.size() != window_.size()) {
    throw std::invalid_argument("PhaseSequence: value count does not match window");
  }
  for (double& v : values_) v = wrap_phase(v);
}

PhaseSequence PhaseSequence::constant(IndexRange window, double value) {
  return PhaseSequence(window, std::vector<double>(window.size(), value));
}

double PhaseSequence::at(std::int64_t m) const {
  if (!window_.contains(m)) {
    throw WindowError("phase index " + std::to_string(m) + " outside window [" +
                      std::to_string(window_.first) + "," + std::to_string(window_.last) + "]");
  }
  return (*this)[m];
}

PhaseSequence sample_phases(const PhaseDistribution& dist, IndexRange window, std::uint64_t seed,
                            Stream stream) {
  if (window.empty()) throw WindowError("sample_phases: empty window");
  std::vector<double> values(window.size());
  for (std::int64_t m = window.first; m <= window.last; ++m) {
    values[static_cast<std::size_t>(m - window.first)] = phase_at(dist, seed, stream, m);
  }
  return PhaseSequence(window, std::move(values), seed);
}

// ---------------------------------------------------------------------------

GaugePhases CoinReduction::combined() const {
  GaugePhases out{zeta.window, std::vector<double>(zeta.zeta.size())};
  for (std::int64_t m = zeta.window.first; m <= zeta.window.last; ++m) {
    // W = Σ⁻¹ V: phase of Σ⁻¹ on the spin of m plus ζ_m
    const double sigma_inv = -std::arg(sigma[static_cast<std::size_t>(spin_of(m))]);
    out.zeta[static_cast<std::size_t>(m - zeta.window.first)] = wrap_phase(sigma_inv + zeta[m]);
  }
  return out;
}

CoinReduction reduce_general_coin(const GeneralCoin& g, IndexRange window) {
  validate(g);
  if (window.empty()) throw WindowError("reduce_general_coin: empty window");
  CoinReduction red;
  red.coin = CoinParams{g.r, g.t};
  red.sigma = {cplx{1.0, 0.0}, -kI * std::polar(1.0, g.gamma)};
  red.global_phase = std::polar(1.0, g.theta);
  red.zeta.window = window;
  red.zeta.zeta.resize(window.size());
  for (std::int64_t m = window.first; m <= window.last; ++m) {
    // ζ_{2k+2} = ζ_{2k+1} = −kα: both indices share k = ⌊(m−1)/2⌋
    const std::int64_t k = site_of(m - 1);
    red.zeta.zeta[static_cast<std::size_t>(m - window.first)] =
        wrap_phase(-static_cast<double>(k) * g.alpha);
  }
  return red;
}

double verify_reduction(const GeneralCoin& g, const CoinReduction& red,
                        const PhaseSequence& phases) {
  const IndexRange window = red.zeta.window;
  const Eigen::Matrix2cd general = g.matrix();
  const Eigen::Matrix2cd normal = normal_coin_matrix(red.coin);
  const Eigen::MatrixXcd u_general =
      materialize(window, [&](std::int64_t m) { return band_column(m, general, phases); });
  const Eigen::MatrixXcd u_normal =
      materialize(window, [&](std::int64_t m) { return band_column(m, normal, phases); });

  const GaugePhases w = red.combined();
  Eigen::VectorXcd diag(static_cast<Eigen::Index>(window.size()));
  for (std::int64_t m = window.first; m <= window.last; ++m) {
    diag(m - window.first) = std::polar(1.0, w[m]);
  }
  const Eigen::MatrixXcd conj =
      red.global_phase * (diag.conjugate().asDiagonal() * u_general * diag.asDiagonal());
  return interior_max_diff(conj, u_normal, 2);
}

GaugePhases konno_gauge(const PhaseSequence& phases) {
  const IndexRange window = phases.window();
  if (!window.contains(0)) throw WindowError("konno_gauge: window must contain index 0");
  GaugePhases out{window, std::vector<double>(window.size())};
  for (std::int64_t m = window.first; m <= window.last; ++m) {
    // indices 2p−1 and 2p share Z_p, with Z_0 = 0 and Z_{p+1} = Z_p + ω_{2p}
    const std::int64_t p = site_of(m + 1);
    double z = 0.0;
    if (p > 0) {
      for (std::int64_t j = 0; j < p; ++j) z += phases.at(2 * j);
    } else {
      for (std::int64_t j = p; j < 0; ++j) z -= phases.at(2 * j);
    }
    out.zeta[static_cast<std::size_t>(m - window.first)] = wrap_phase(z);
  }
  return out;
}

Eigen::Matrix2cd konno_coin(const CoinParams& coin, double site_phase) {
  Eigen::Matrix2cd c;
  c << coin.t * std::polar(1.0, site_phase), coin.r, coin.r, -coin.t * std::polar(1.0, -site_phase);
  return c;
}

double verify_konno_gauge(const CoinParams& coin, const PhaseSequence& phases,
                          const GaugePhases& zeta) {
  const IndexRange window = phases.window();
  auto random_site = [&](std::int64_t k) {
    const std::int64_t m = 2 * k;
    return konno_coin(coin, window.contains(m) ? phases[m] : 0.0);
  };
  const Eigen::MatrixXcd u_random =
      materialize(window, [&](std::int64_t m) { return walk_column(m, random_site); });
  const Eigen::MatrixXcd u_fixed = materialize(window, [&](std::int64_t m) {
    return walk_column(m, [&](std::int64_t) { return konno_coin(coin, 0.0); });
  });
  Eigen::VectorXcd diag(static_cast<Eigen::Index>(window.size()));
  for (std::int64_t m = window.first; m <= window.last; ++m) {
    diag(m - window.first) = std::polar(1.0, zeta[m]);
  }
  const Eigen::MatrixXcd conj = diag.conjugate().asDiagonal() * u_random * diag.asDiagonal();
  return interior_max_diff(conj, u_fixed, 2);
}

}  // namespace qwalk
