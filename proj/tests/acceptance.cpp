// Acceptance suite: one PASS/FAIL line per criterion. `acceptance N` runs criterion N only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qwalk/evolution.hpp"
#include "qwalk/fourier_ballistic.hpp"
#include "qwalk/greens_fm.hpp"
#include "qwalk/temporal_diffusion.hpp"
#include "qwalk/transfer_lyapunov.hpp"

using namespace qwalk;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const CoinParams kHadamard = make_coin(std::sqrt(0.5));
const CoinParams kBiased = make_coin(std::sqrt(0.8));  // t² = 0.8, r² = 0.2

double scaled_moment(int L, const CoinParams& c, const CoinSpinor& phi0, std::int64_t n) {
  const std::int64_t ns[] = {n};
  return moment_scaling(L, c, phi0, ns).front().ratio;
}

Outcome criterion1() {
  const double ratio = scaled_moment(2, kHadamard, {}, 10000);
  const double rel = std::abs(ratio - 1.0);
  return {rel < 0.05, fmt("sum k^2 w_k(n)/n = %.6f at n=1e4 (relative error %.2e, limit 0.05)", ratio, rel)};
}

Outcome criterion2() {
  const double r4 = scaled_moment(4, kHadamard, {}, 10000);
  const double r2 = scaled_moment(2, kBiased, {}, 10000);
  const double e4 = std::abs(r4 - 3.0) / 3.0;
  const double e2 = std::abs(r2 - 4.0) / 4.0;
  return {e4 < 0.10 && e2 < 0.05,
          fmt("D(4) ratio %.6f vs 3 (rel %.2e < 0.10); t^2=0.8 D(2) ratio %.6f vs 4 (rel %.2e < 0.05)", r4, e4,
              r2, e2)};
}

Outcome criterion3() {
  const std::int64_t n = 10000;
  double worst = 0.0;
  for (const CoinParams& c : {kHadamard, kBiased}) {
    for (const CoinSpinor& phi0 : {CoinSpinor{}, CoinSpinor{0.0, 1.0}}) {
      const double m1 = table_moment(prw_distribution(prw_params(phi0, c), n), 1);
      worst = std::max(worst, std::abs(m1) / std::sqrt(double(n)));
    }
  }
  return {worst < 0.05, fmt("max |sum k w_k|/sqrt(n) = %.3e at n=1e4 over 2 coins x 2 initial spins (limit 0.05)", worst)};
}

Outcome criterion4() {
  const std::int64_t tau = 10000;
  const double h = std::sqrt(0.5);
  double worst = 0.0;
  // unbiased first step (a = 1/2) for both coins
  const CoinSpinor sym{h, cplx{0.0, h}};
  for (const CoinParams& c : {kHadamard, kBiased}) {
    const PersistentRWParams p = prw_params(sym, c);
    const double q = c.t * c.t / (2 * c.r * c.r);
    for (double y : {0.5, 1.0, 2.0}) {
      const cplx psi = generating_function(y / std::sqrt(double(tau)), tau, p);
      worst = std::max(worst, std::abs(psi - std::exp(-q * y * y)));
    }
  }
  return {worst < 0.01, fmt("max |Psi_tau(y/sqrt(tau)) - exp(-t^2 y^2/2r^2)| = %.3e, tau=1e4, y in {0.5,1,2}, r=t and t^2=0.8 (limit 0.01)", worst)};
}

Outcome criterion5() {
  const ComparisonReport r = mc_vs_exact(kHadamard, {}, PhaseDistribution::uniform_full(), 30, 2000, 20240605, 0);
  return {r.max_abs_z < 4.0, fmt("max per-site |z| = %.3f over %zu sites, n=30, 2000 realizations (limit 4)",
                                 r.max_abs_z, r.sites.size())};
}

Outcome criterion6() {
  const WalkState up = basis_state(Spin::kUp, 0);
  const double b_id = ballistic_constant(Eigen::Matrix2cd::Identity(), up).B;
  Eigen::Matrix2cd off;
  off << 0, -1, 1, 0;
  const double b_off = ballistic_constant(off, coin_state({std::sqrt(0.5), 0}, {0, std::sqrt(0.5)})).B;
  const BallisticResult bh = ballistic_constant(normal_coin_matrix(kHadamard), up, 1024);
  const int n = 2000;
  const WalkState s = evolve(up, kHadamard, n, Regime::deterministic());
  const double direct = position_moment(s, 2) / (double(n) * n);
  const double rel = std::abs(direct - bh.B) / bh.B;
  const bool pass = std::abs(b_id - 1.0) < 1e-12 && std::abs(b_off) < 1e-12 && rel < 0.01;
  return {pass, fmt("B(identity)=%.15f, B(off-diagonal)=%.2e, Hadamard B=%.8f vs <X^2>/n^2=%.8f at n=2000 (rel %.2e < 0.01)",
                    b_id, b_off, bh.B, direct, rel)};
}

Outcome criterion7() {
  const std::int64_t n_max = 2000;
  const std::uint64_t master = 20240607;
  int saturated = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    Walker w(basis_state(Spin::kUp, 0), kHadamard,
             Regime::spatial(PhaseDistribution::uniform_full(), derive_seed(master, i)), n_max);
    double early = 0.0;
    double late = 0.0;
    for (std::int64_t n = 1; n <= n_max; ++n) {
      w.step();
      const double x2 = w.moment(2);
      if (n <= 1000) early = std::max(early, x2);
      if (n >= 1000) late = std::max(late, x2);
    }
    if (late < 1.05 * early) ++saturated;
  }
  Walker d(basis_state(Spin::kUp, 0), kHadamard, Regime::deterministic(0.0), n_max);
  while (d.time() < n_max) d.step();
  const double contrast = d.moment(2) / (double(n_max) * n_max);
  return {saturated >= 45 && contrast > 0.01,
          fmt("%d/50 realizations with max<X^2> over [1000,2000] < 1.05 x max over [1,1000] (need 45); "
              "deterministic <X^2>(2000)/2000^2 = %.4f (need > 0.01)",
              saturated, contrast)};
}

Outcome criterion8() {
  LyapunovOptions opt;
  opt.n = 100000;
  opt.replicas = 32;
  opt.seed = 20240608;
  opt.workers = 0;
  const auto dist = PhaseDistribution::uniform_full();
  std::vector<LyapunovEstimate> est;
  for (double rad : {0.98, 1.0, 1.02}) est.push_back(lyapunov_estimate({rad, 0.0}, kHadamard, dist, opt));
  const double g1 = est[1].gamma_hat;
  const double tstat = g1 / est[1].stderr_;
  double lo = g1;
  double hi = g1;
  for (const auto& e : est) {
    lo = std::min(lo, e.gamma_hat);
    hi = std::max(hi, e.gamma_hat);
  }
  const double variation = (hi - lo) / g1;
  return {tstat > 5.0 && variation < 0.20,
          fmt("gamma(1)=%.5f, gamma/stderr=%.1f (need > 5); gamma at |z|=0.98,1,1.02: %.5f %.5f %.5f, variation %.3f (< 0.20)",
              g1, tstat, est[0].gamma_hat, est[1].gamma_hat, est[2].gamma_hat, variation)};
}

Outcome criterion9() {
  std::mt19937_64 rng(20240609);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const IndexRange w{-20, 20};
  int samples = 0;
  double worst = 0.0;
  for (int real = 0; real < 60; ++real) {
    const CoinParams c = make_coin(0.15 + 0.8 * u01(rng));
    const PhaseSequence ph = sample_phases(PhaseDistribution::uniform_full(), w, rng());
    const double rad = u01(rng) < 0.5 ? 0.6 + 0.35 * u01(rng) : 1.05 + 0.5 * u01(rng);
    const cplx z = std::polar(rad, kTwoPi * u01(rng));
    for (int e = 0; e < 10; ++e) {
      const auto k = w.first + static_cast<std::int64_t>(rng() % w.size());
      const auto l = w.first + 1 + static_cast<std::int64_t>(rng() % (w.size() - 1));
      const cplx f = greens_formula({z, k, l, w}, c, ph);
      const cplx d = greens_direct({z, k, l, w}, c, ph);
      worst = std::max(worst, std::abs(f - d) / std::max(std::abs(f), std::abs(d)));
      ++samples;
    }
  }
  double det_worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const CoinParams c = make_coin(0.05 + 0.95 * u01(rng));
    const cplx z = std::polar(0.3 + 1.4 * u01(rng), kTwoPi * u01(rng));
    const double th = kTwoPi * u01(rng);
    const double et = kTwoPi * u01(rng);
    const TransferMatrix t = transfer_matrix(z, th, et, c);
    det_worst = std::max(det_worst, std::abs(t.m.determinant() - std::polar(1.0, -(th - et))));
  }
  return {samples >= 500 && worst < 1e-9 && det_worst < 1e-12,
          fmt("%d formula-vs-direct samples, max relative gap %.2e (< 1e-9); det T = exp(-i(theta-eta)) max gap %.2e on 1e4 samples (< 1e-12)",
              samples, worst, det_worst)};
}

Outcome criterion10() {
  std::vector<std::int64_t> d;
  for (std::int64_t x = 4; x <= 40; x += 4) d.push_back(x);
  const auto pairs = distance_pairs(d, 0);
  FractionalMomentOptions opt;
  opt.replicas = 10000;
  opt.seed = 20240610;
  opt.workers = 0;
  opt.window = padded_window(pairs, 80);
  const cplx z{0.95, 0.0};
  const auto dist = PhaseDistribution::uniform_full();
  const auto est = fractional_moment(z, 1.0 / 3.0, pairs, dist, kHadamard, opt);
  const DecayFit fit = decay_fit(est.rows);
  opt.window = padded_window(pairs, 160);
  const auto wide = fractional_moment(z, 1.0 / 3.0, pairs, dist, kHadamard, opt);
  double shift = 0.0;
  for (std::size_t i = 0; i < est.rows.size(); ++i) {
    shift = std::max(shift, std::abs(wide.rows[i].mean - est.rows[i].mean) / est.rows[i].stderr_);
  }
  const double slope = -fit.alpha_hat;
  const double ratio = std::abs(slope) / fit.alpha_stderr;
  return {slope < 0.0 && ratio > 5.0 && shift < 1.0,
          fmt("slope %.5f +- %.5f (|slope|/stderr %.1f > 5), C=%.4f, r^2=%.5f; window [%lld,%lld] -> [%lld,%lld] max shift %.2e stderr (< 1)",
              slope, fit.alpha_stderr, ratio, fit.C_hat, fit.r_squared, (long long)est.window.first,
              (long long)est.window.last, (long long)wide.window.first, (long long)wide.window.last, shift)};
}

Outcome criterion11() {
  const auto dist = PhaseDistribution::uniform_full();
  const CoinParams c = make_coin(0.6);
  const IndexRange w{-44, 44};
  double konno = 0.0;
  double reduction = 0.0;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const PhaseSequence ph = sample_phases(dist, w, derive_seed(20240611, i));
    konno = std::max(konno, konno_distribution_gap(c, ph, 20));
    GeneralCoin g{c.t, c.r, ang(rng), ang(rng), ang(rng)};
    reduction = std::max(reduction, verify_reduction(g, reduce_general_coin(g, w), ph));
  }
  return {konno < 1e-10 && reduction < 1e-10,
          fmt("Konno vs gauge-equivalent distributions at n=20: max gap %.2e; general-coin reduction max entry gap %.2e (both < 1e-10, 10 realizations)",
              konno, reduction)};
}

Outcome criterion12() {
  std::mt19937_64 rng(20240612);
  std::normal_distribution<double> g;
  auto rnd = [&] {
    Eigen::Matrix2cd a;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) a(i, j) = {g(rng), g(rng)};
    }
    return a;
  };
  double e_norm = 0.0;
  double e_hom = 0.0;
  double e_det = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Eigen::Matrix2cd a = rnd();
    const Eigen::Matrix2cd b = rnd();
    e_norm = std::max(e_norm, std::abs(tau_embed(a).norm() - std::sqrt(2.0) * a.norm()) / a.norm());
    e_hom = std::max(e_hom, (tau_embed(a * b) - tau_embed(a) * tau_embed(b)).cwiseAbs().maxCoeff() /
                                std::max(1.0, (a * b).cwiseAbs().maxCoeff()));
    a /= std::sqrt(std::abs(a.determinant()));
    e_det = std::max(e_det, std::abs(std::abs(tau_embed(a).determinant()) - 1.0));
  }
  return {e_norm < 1e-12 && e_hom < 1e-12 && e_det < 1e-12,
          fmt("1e4 random matrices: norm identity %.2e, homomorphism %.2e, |det| %.2e (all < 1e-12)", e_norm, e_hom,
              e_det)};
}

const std::vector<std::pair<const char*, std::function<Outcome()>>> kCriteria = {
    {"temporal diffusion D(2)", criterion1},
    {"temporal diffusion D(4) and t^2=0.8 D(2)", criterion2},
    {"odd moments vanish", criterion3},
    {"Gaussian limit of the generating function", criterion4},
    {"quantum vs persistent walk Monte Carlo", criterion5},
    {"ballistic constant", criterion6},
    {"dynamical localization and deterministic contrast", criterion7},
    {"Lyapunov positivity and continuity", criterion8},
    {"Green's function cross-route and determinant identity", criterion9},
    {"fractional-moment decay and window doubling", criterion10},
    {"gauge checks", criterion11},
    {"tau-embedding identities", criterion12},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (int i = 1; i <= static_cast<int>(kCriteria.size()); ++i) which.push_back(i);
  }
  int failed = 0;
  for (int idx : which) {
    if (idx < 1 || idx > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", idx);
      return 2;
    }
    const auto& [name, fn] = kCriteria[static_cast<std::size_t>(idx - 1)];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", idx, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
