#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <utility>

#include "qwalk/band_operator.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/evolution.hpp"
#include "test_support.hpp"

using namespace qwalk;

namespace {

using Amplitudes = std::map<std::pair<std::int64_t, int>, cplx>;

// Direct path sum: ↑ at k feeds t·↑(k+1) and r·↓(k−1); ↓ at k feeds −r·↑(k+1) and t·↓(k−1);
// each arrival picks up e^{−iω} of its destination index.
Amplitudes path_sum_step(const Amplitudes& in, const CoinParams& c,
                         const std::function<double(std::int64_t)>& omega) {
  Amplitudes out;
  for (const auto& [key, a] : in) {
    const auto [k, spin] = key;
    const cplx to_up = spin == 0 ? c.t * a : -c.r * a;
    const cplx to_down = spin == 0 ? c.r * a : c.t * a;
    out[{k + 1, 0}] += std::polar(1.0, -omega(2 * (k + 1))) * to_up;
    out[{k - 1, 1}] += std::polar(1.0, -omega(2 * (k - 1) + 1)) * to_down;
  }
  return out;
}

double max_gap(const WalkState& s, const Amplitudes& a) {
  double gap = 0.0;
  for (const auto& [key, v] : a) gap = std::max(gap, std::abs(s.at(Spin(key.second), key.first) - v));
  for (std::int64_t m = s.offset(); m <= s.last_index(); ++m) {
    if (!a.contains({site_of(m), spin_of(m)})) gap = std::max(gap, std::abs(s.at(m)));
  }
  return gap;
}

}  // namespace

TEST_CASE("two Hadamard-amplitude steps from up") {
  const CoinParams c = make_coin(std::sqrt(0.5));
  const WalkState s = evolve(basis_state(Spin::kUp, 0), c, 2, Regime::deterministic());
  const auto p = s.site_probabilities();
  // sites −2..2
  REQUIRE(s.first_site() == -2);
  CHECK(p[0] == doctest::Approx(0.25));
  CHECK(p[1] == doctest::Approx(0.0));
  CHECK(p[2] == doctest::Approx(0.5));
  CHECK(p[4] == doctest::Approx(0.25));
}

TEST_CASE("evolution matches the path sum in every regime") {
  const CoinParams c = make_coin(0.6);
  const auto dist = PhaseDistribution::uniform_full();
  const Regime regimes[] = {Regime::deterministic(0.7), Regime::spatial(dist, 3), Regime::temporal(dist, 4)};
  for (const Regime& reg : regimes) {
    Amplitudes a{{{0, 0}, cplx{0.6, 0.0}}, {{0, 1}, cplx{0.0, 0.8}}};
    Walker w(coin_state({0.6, 0.0}, {0.0, 0.8}), c, reg, 12);
    for (int n = 1; n <= 12; ++n) {
      auto omega = [&](std::int64_t m) {
        switch (reg.kind) {
          case RegimeKind::kDeterministic:
            return reg.dist.value();
          case RegimeKind::kSpatial:
            return phase_at(reg.dist, reg.seed, Stream::kSpatial, m);
          case RegimeKind::kTemporal: {
            const auto [u, d] = temporal_phases(reg, n);
            return spin_of(m) == 0 ? u : d;
          }
        }
        return 0.0;
      };
      a = path_sum_step(a, c, omega);
      w.step();
      CHECK(max_gap(w.state(), a) < 1e-14);
    }
  }
}

TEST_CASE("apply_step agrees with the streaming walker") {
  const CoinParams c = make_coin(0.3);
  const auto dist = PhaseDistribution::uniform_interval(0.0, 1.0);
  const PhaseSequence ph = sample_phases(dist, {-60, 61}, 9);
  WalkState s = basis_state(Spin::kDown, 1);
  Walker w(s, c, Regime::spatial(dist, 9), 25);
  for (int n = 0; n < 25; ++n) {
    s = apply_step(s, c, ph);
    w.step();
  }
  const WalkState ws = w.state();
  double gap = 0.0;
  for (std::int64_t m = s.offset(); m <= s.last_index(); ++m) gap = std::max(gap, std::abs(s.at(m) - ws.at(m)));
  CHECK(gap < 1e-14);
  CHECK_THROWS_AS(apply_step(basis_state(Spin::kUp, 40), c, ph), WindowError);
}

TEST_CASE("norm is conserved over long runs") {
  const CoinParams c = make_coin(std::sqrt(0.5));
  Walker w(basis_state(Spin::kUp, 0), c, Regime::spatial(PhaseDistribution::uniform_full(), 2), 500);
  for (int n = 0; n < 500; ++n) w.step();
  CHECK(std::abs(w.norm2() - 1.0) < 1e-12);
  CHECK_THROWS_AS(w.step(), std::out_of_range);
}

TEST_CASE("pure shift coin moves ballistically") {
  const CoinParams c = make_coin(1.0);
  const int n_list[] = {1, 2};
  const auto series = moment_series(basis_state(Spin::kUp, 0), c, Regime::deterministic(), n_list, 30);
  for (int n = 0; n <= 30; ++n) {
    CHECK(series[0].values[n] == doctest::Approx(n));
    CHECK(series[1].values[n] == doctest::Approx(double(n) * n));
  }
}

TEST_CASE("Konno walk distributions are gauge invariant") {
  const CoinParams c = make_coin(0.45);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PhaseSequence ph = sample_phases(PhaseDistribution::uniform_full(), {-50, 50}, seed);
    CHECK(konno_distribution_gap(c, ph, 20) < 1e-12);
  }
  const PhaseSequence narrow = sample_phases(PhaseDistribution::uniform_full(), {-10, 10}, 1);
  CHECK_THROWS_AS(konno_distribution_gap(c, narrow, 20), WindowError);
}

TEST_CASE("finite truncation is unitary and matches the band operator inside") {
  const CoinParams c = make_coin(0.55);
  const IndexRange w{-10, 14};
  const PhaseSequence ph = sample_phases(PhaseDistribution::uniform_full(), w, 17);
  const Eigen::MatrixXcd u = build_band_matrix(w, c, ph, Truncation::kFinite).matrix.to_dense();
  CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() < 1e-13);

  const Eigen::MatrixXcd ref =
      materialize(w, [&](std::int64_t m) { return band_column(m, normal_coin_matrix(c), ph); });
  const Eigen::MatrixXcd none = build_band_matrix(w, c, ph, Truncation::kNone).matrix.to_dense();
  // rows 2..size−3 only see columns inside the window
  for (Eigen::Index i = 2; i + 2 < u.rows(); ++i) {
    CHECK((none.row(i) - ref.row(i)).norm() < 1e-15);
    CHECK((u.row(i) - ref.row(i)).norm() < 1e-15);
  }
  const Eigen::MatrixXcd plus = build_band_matrix(w, c, ph, Truncation::kSemifinitePlus).matrix.to_dense();
  const Eigen::MatrixXcd minus = build_band_matrix(w, c, ph, Truncation::kSemifiniteMinus).matrix.to_dense();
  CHECK((plus.row(0) - u.row(0)).norm() < 1e-15);
  CHECK((plus.row(u.rows() - 2) - none.row(u.rows() - 2)).norm() < 1e-15);
  CHECK((minus.row(u.rows() - 2) - u.row(u.rows() - 2)).norm() < 1e-15);
  CHECK((minus.row(0) - none.row(0)).norm() < 1e-15);

  CHECK_THROWS_AS(build_band_matrix({-9, 14}, c, ph, Truncation::kFinite), WindowError);
  CHECK_THROWS_AS(build_band_matrix({-12, 14}, c, ph, Truncation::kFinite), WindowError);
}
