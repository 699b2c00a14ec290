#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qwalk/errors.hpp"
#include "qwalk/evolution.hpp"
#include "qwalk/greens_fm.hpp"
#include "test_support.hpp"

using namespace qwalk;
using qwalk::testing::rel_diff;
using qwalk::testing::uniform;

namespace {

Eigen::MatrixXcd dense_resolvent(IndexRange w, const CoinParams& c, const PhaseSequence& ph, cplx z) {
  const Eigen::MatrixXcd u = build_band_matrix(w, c, ph, Truncation::kFinite).matrix.to_dense();
  return (u - z * Eigen::MatrixXcd::Identity(u.rows(), u.cols())).inverse();
}

cplx random_z(std::mt19937_64& rng) {
  const double rad = uniform(rng, 0.0, 1.0) < 0.5 ? uniform(rng, 0.7, 0.98) : uniform(rng, 1.02, 1.4);
  return std::polar(rad, uniform(rng, 0.0, kTwoPi));
}

}  // namespace

TEST_CASE("direct solve matches a dense inverse") {
  std::mt19937_64 rng(1);
  const IndexRange w{-8, 12};
  for (int trial = 0; trial < 10; ++trial) {
    const CoinParams c = make_coin(uniform(rng, 0.2, 0.9));
    const PhaseSequence ph = sample_phases(PhaseDistribution::uniform_full(), w, rng());
    const cplx z = random_z(rng);
    const Eigen::MatrixXcd g = dense_resolvent(w, c, ph, z);
    for (std::int64_t k = w.first; k <= w.last; k += 3) {
      for (std::int64_t l = w.first; l <= w.last; l += 2) {
        const cplx d = greens_direct({z, k, l, w}, c, ph);
        CHECK(std::abs(d - g(k - w.first, l - w.first)) < 1e-10);
      }
    }
  }
}

TEST_CASE("boundary-solution formula reproduces every covered entry") {
  std::mt19937_64 rng(2);
  const IndexRange w{-10, 10};
  for (int trial = 0; trial < 10; ++trial) {
    const CoinParams c = make_coin(uniform(rng, 0.2, 0.9));
    const PhaseSequence ph = sample_phases(PhaseDistribution::uniform_full(), w, rng());
    const cplx z = random_z(rng);
    const Eigen::MatrixXcd g = dense_resolvent(w, c, ph, z);
    for (std::int64_t l = w.first + 1; l <= w.last; ++l) {
      for (std::int64_t k = w.first; k <= w.last; ++k) {
        const cplx f = greens_formula({z, k, l, w}, c, ph);
        CHECK(rel_diff(f, g(k - w.first, l - w.first)) < 1e-9);
      }
    }
    CHECK(rel_diff(greens_corner(z, w, c, ph), g(0, w.size() - 1)) < 1e-9);
  }
}

TEST_CASE("formula domain and error reporting") {
  const CoinParams c = make_coin(0.5);
  const IndexRange w{-6, 6};
  const PhaseSequence ph = sample_phases(PhaseDistribution::uniform_full(), w, 1);
  CHECK_THROWS_AS(greens_formula({{0.9, 0.0}, 0, -6, w}, c, ph), WindowError);
  CHECK_THROWS_AS(greens_direct({{0.9995, 0.0}, 0, 0, w}, c, ph), NumericalError);
  CHECK_THROWS_AS(greens_direct({{0.9, 0.0}, 0, 8, w}, c, ph), WindowError);
  CHECK_THROWS_AS(greens_direct({{0.0, 0.0}, 0, 0, w}, c, ph), std::domain_error);
}

TEST_CASE("inversion symmetry of the resolvent of a unitary") {
  std::mt19937_64 rng(3);
  const IndexRange w{-12, 12};
  for (int trial = 0; trial < 10; ++trial) {
    const CoinParams c = make_coin(uniform(rng, 0.2, 0.9));
    const PhaseSequence ph = sample_phases(PhaseDistribution::uniform_full(), w, rng());
    const cplx z = random_z(rng);
    const cplx zi = 1.0 / std::conj(z);
    for (int s = 0; s < 20; ++s) {
      const auto k = static_cast<std::int64_t>(rng() % w.size()) + w.first;
      const auto l = static_cast<std::int64_t>(rng() % w.size()) + w.first;
      if (k == l) continue;
      const double lhs = std::abs(greens_direct({z, k, l, w}, c, ph));
      const double rhs = std::abs(greens_direct({zi, l, k, w}, c, ph)) / std::norm(z);
      CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(lhs, 1e-300) + 1e-14);
    }
  }
}

TEST_CASE("padded windows are even and contain the pairs") {
  const std::int64_t d[] = {4, 8};
  const auto pairs = distance_pairs(d, -1);
  const IndexRange w = padded_window(pairs, 5);
  CHECK(w.first % 2 == 0);
  CHECK(w.last % 2 == 0);
  CHECK(w.first <= -6);
  CHECK(w.last >= 12);
}

TEST_CASE("decay fit recovers exact exponentials") {
  std::vector<FractionalMomentRow> rows;
  for (int d = 2; d <= 20; d += 3) rows.push_back({d, d, 0, 1.7 * std::exp(-0.3 * d), 0.0});
  const DecayFit fit = decay_fit(rows);
  CHECK(fit.alpha_hat == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(fit.C_hat == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.alpha_stderr < 1e-10);

  // weighted version with a known perturbation
  std::vector<FractionalMomentRow> noisy = rows;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    noisy[i].stderr_ = 0.01 * noisy[i].mean;
    noisy[i].mean *= (i % 2 == 0 ? 1.001 : 0.999);
  }
  const DecayFit nf = decay_fit(noisy);
  CHECK(std::abs(nf.alpha_hat - 0.3) < 1e-3);
  CHECK(nf.ci_low < nf.alpha_hat);
  CHECK(nf.ci_high > nf.alpha_hat);

  rows[1].mean = 0.0;
  CHECK_THROWS_AS(decay_fit(rows), NumericalError);
  std::vector<FractionalMomentRow> few(rows.begin() + 2, rows.begin() + 5);
  CHECK_THROWS_AS(decay_fit(few), std::invalid_argument);
}

TEST_CASE("fractional moments are reproducible and decay") {
  const CoinParams c = make_coin(std::sqrt(0.5));
  const std::int64_t d[] = {2, 6, 10, 14};
  const auto pairs = distance_pairs(d, 0);
  FractionalMomentOptions opt;
  opt.replicas = 200;
  opt.seed = 4;
  const auto a = fractional_moment({0.9, 0.0}, 1.0 / 3.0, pairs, PhaseDistribution::uniform_full(), c, opt);
  opt.workers = 2;
  const auto b = fractional_moment({0.9, 0.0}, 1.0 / 3.0, pairs, PhaseDistribution::uniform_full(), c, opt);
  REQUIRE(a.rows.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(a.rows[i].mean == b.rows[i].mean);
  CHECK(a.rows[0].mean > a.rows[3].mean);
  CHECK(a.window == padded_window(pairs, 28));

  std::ostringstream os;
  write_fractional_moment_csv(os, a);
  CHECK(os.str().rfind("distance,s,re_z,im_z,mean,stderr,replicas\n", 0) == 0);
  CHECK_THROWS_AS(fractional_moment({0.9, 0.0}, 1.5, pairs, PhaseDistribution::uniform_full(), c, opt),
                  std::domain_error);
}

TEST_CASE("single-realization entries are stable under window growth") {
  // phases are keyed by absolute index, so the wider window reuses the realization
  const CoinParams c = make_coin(std::sqrt(0.5));
  const auto dist = PhaseDistribution::uniform_full();
  const IndexRange narrow{-40, 60};
  const IndexRange wide{-80, 100};
  const PhaseSequence pn = sample_phases(dist, narrow, 77);
  const PhaseSequence pw = sample_phases(dist, wide, 77);
  const cplx z{0.95, 0.0};
  const cplx gn = greens_direct({z, 10, 0, narrow}, c, pn);
  const cplx gw = greens_direct({z, 10, 0, wide}, c, pw);
  CHECK(rel_diff(gn, gw) < 1e-6);
}
