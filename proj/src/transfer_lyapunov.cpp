#include "qwalk/transfer_lyapunov.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "qwalk/errors.hpp"
#include "qwalk/numeric_format.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/statistics.hpp"

namespace qwalk {

namespace {

void require_transfer_domain(cplx z, const CoinParams& coin) {
  if (coin.t == 0.0) throw std::domain_error("transfer matrix undefined for t = 0 (singular coin)");
  if (z == cplx{}) throw std::domain_error("transfer matrix undefined for z = 0");
}

Eigen::Matrix2cd raw_transfer(cplx z, double theta, double eta, const CoinParams& coin) {
  const double r = coin.r;
  const double t = coin.t;
  Eigen::Matrix2cd m;
  m << z * z * std::polar(1.0, theta + eta) + r * r, -r * t, -r * t, t * t;
  return (std::polar(1.0, -theta) / (z * t)) * m;
}

}  // namespace

TransferMatrix transfer_matrix(cplx z, double theta, double eta, const CoinParams& coin) {
  require_transfer_domain(z, coin);
  return TransferMatrix{z, raw_transfer(z, theta, eta, coin), std::polar(1.0, -(theta - eta))};
}

double product_log_norm(cplx z, const CoinParams& coin, const PhaseStream& omega, std::int64_t n) {
  require_transfer_domain(z, coin);
  if (n < 1) throw std::invalid_argument("product_log_norm: n must be at least 1");
  Eigen::Matrix2cd p = Eigen::Matrix2cd::Identity();
  double log_scale = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) {
    p = raw_transfer(z, omega(2 * j), omega(2 * j - 1), coin) * p;
    const double nrm = p.norm();
    p /= nrm;
    log_scale += std::log(nrm);
  }
  return log_scale;
}

double product_log_norm_embedded(cplx z, const CoinParams& coin, const PhaseStream& omega,
                                 std::int64_t n) {
  require_transfer_domain(z, coin);
  if (n < 1) throw std::invalid_argument("product_log_norm_embedded: n must be at least 1");
  Eigen::Matrix4d p = Eigen::Matrix4d::Identity();
  double log_scale = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) {
    p = tau_embed(raw_transfer(z, omega(2 * j), omega(2 * j - 1), coin)) * p;
    const double nrm = p.norm();
    p /= nrm;
    log_scale += std::log(nrm);
  }
  return log_scale;
}

LyapunovEstimate lyapunov_estimate(cplx z, const CoinParams& coin, const PhaseDistribution& dist,
                                   const LyapunovOptions& opt) {
  require_transfer_domain(z, coin);
  if (opt.replicas < 1 || opt.n < 1) throw std::invalid_argument("lyapunov_estimate: need n, replicas >= 1");
  std::vector<double> per_replica(static_cast<std::size_t>(opt.replicas));
  parallel_for(per_replica.size(), opt.workers, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(opt.seed, i);
    const PhaseStream omega = [&](std::int64_t m) { return phase_at(dist, seed, Stream::kTransfer, m); };
    const double ln = opt.embedded ? product_log_norm_embedded(z, coin, omega, opt.n)
                                   : product_log_norm(z, coin, omega, opt.n);
    per_replica[i] = ln / static_cast<double>(opt.n);
  });
  const MeanStderr ms = mean_stderr(per_replica);
  LyapunovEstimate est;
  est.z = z;
  est.gamma_hat = ms.mean;
  est.stderr_ = ms.stderr_;
  est.n = opt.n;
  est.replicas = opt.replicas;
  est.hypotheses_violated = !dist.bounded_density();
  return est;
}

std::vector<cplx> annulus_grid(std::span<const double> radii, int n_angles) {
  std::vector<cplx> out;
  for (double rad : radii) {
    for (int a = 0; a < n_angles; ++a) out.push_back(std::polar(rad, kTwoPi * a / n_angles));
  }
  return out;
}

void write_lyapunov_csv(std::ostream& os, std::span<const LyapunovEstimate> rows) {
  os << "re_z,im_z,gamma_hat,stderr,n,replicas\n";
  for (const auto& e : rows) {
    os << fmt_double(e.z.real()) << ',' << fmt_double(e.z.imag()) << ',' << fmt_double(e.gamma_hat)
       << ',' << fmt_double(e.stderr_) << ',' << e.n << ',' << e.replicas << '\n';
  }
}

Eigen::Matrix4d tau_embed(const Eigen::Matrix2cd& a) {
  Eigen::Matrix4d out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double re = a(i, j).real();
      const double im = a(i, j).imag();
      out.block<2, 2>(2 * i, 2 * j) << re, im, -im, re;
    }
  }
  return out;
}

Eigen::Matrix2cd witness_matrix(cplx z, double theta, double eta, const CoinParams& coin) {
  require_transfer_domain(z, coin);
  const Eigen::Matrix2cd t_et = raw_transfer(z, eta, theta, coin);
  const Eigen::Matrix2cd t_ee = raw_transfer(z, eta, eta, coin);
  const Eigen::Matrix2cd t_tt = raw_transfer(z, theta, theta, coin);
  const Eigen::Matrix2cd t_te = raw_transfer(z, theta, eta, coin);
  return t_et * t_ee.inverse() * t_tt.inverse() * t_te;
}

NoncompactnessWitness noncompactness_witness(cplx z, double theta, double eta, const CoinParams& coin) {
  require_transfer_domain(z, coin);
  if (coin.r == 0.0) throw std::domain_error("noncompactness witness requires r > 0");
  if (std::abs(std::remainder(theta - eta, kTwoPi)) == 0.0) {
    throw std::domain_error("noncompactness witness degenerate for theta == eta");
  }
  NoncompactnessWitness w;
  w.m = witness_matrix(z, theta, eta, coin);
  w.spectral_radius = w.m.eigenvalues().cwiseAbs().maxCoeff();
  return w;
}

std::vector<cplx> generalized_eigenvector(cplx z, const CoinParams& coin, const PhaseSequence& phases,
                                          IndexRange window, Side side) {
  require_transfer_domain(z, coin);
  if (window.first % 2 != 0 || window.last % 2 != 0 || window.last <= window.first) {
    throw WindowError("generalized_eigenvector: window must be [2n0, 2m0] with m0 > n0");
  }
  if (!phases.window().contains(window.first) || !phases.window().contains(window.last)) {
    throw WindowError("generalized_eigenvector: phases do not cover the window");
  }
  const double r = coin.r;
  const double t = coin.t;
  std::vector<cplx> phi(window.size());
  auto at = [&](std::int64_t m) -> cplx& { return phi[static_cast<std::size_t>(m - window.first)]; };
  const std::int64_t a = window.first;
  const std::int64_t b = window.last;
  if (side == Side::kPlus) {
    const cplx top = z * std::polar(1.0, phases[a]) - r;
    const double nrm = std::sqrt(t * t + std::norm(top));
    at(a) = t / nrm;
    at(a + 1) = top / nrm;
    Eigen::Vector2cd v(at(a + 1), at(a));
    for (std::int64_t even = a + 2; even <= b; even += 2) {
      v = raw_transfer(z, phases[even], phases[even - 1], coin) * v;
      at(even) = v(1);
      if (even + 1 <= b) at(even + 1) = v(0);
    }
  } else {
    at(b - 1) = 1.0;
    at(b) = z * std::polar(1.0, phases[b - 1]);
    at(b - 2) = (z * std::polar(1.0, phases[b]) * at(b) + r * at(b - 1)) / t;
    Eigen::Vector2cd v(at(b - 1), at(b - 2));
    for (std::int64_t even = b - 2; even - 1 >= a; even -= 2) {
      v = raw_transfer(z, phases[even], phases[even - 1], coin).inverse() * v;
      at(even - 1) = v(0);
      if (even - 2 >= a) at(even - 2) = v(1);
    }
  }
  return phi;
}

}  // namespace qwalk
