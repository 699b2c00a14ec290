#include "qwalk/greens_fm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "qwalk/banded.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/numeric_format.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/statistics.hpp"
#include "qwalk/transfer_lyapunov.hpp"

namespace qwalk {

namespace {

void require_resolvent_z(cplx z) {
  if (z == cplx{}) throw std::domain_error("resolvent requires z != 0");
  if (std::abs(std::abs(z) - 1.0) < kUnitCircleMargin) {
    throw NumericalError("|z| too close to the unit circle for a well-conditioned resolvent");
  }
}

BandMatrix shifted(const BandUnitary& u, cplx z) {
  BandMatrix a = u.matrix;
  for (std::size_t i = 0; i < a.size(); ++i) a.ref(i, i) -= z;
  return a;
}

}  // namespace

void validate(const GreensQuery& q) {
  require_resolvent_z(q.z);
  if (!q.window.contains(q.k) || !q.window.contains(q.l)) {
    throw WindowError("Green's function indices outside the window");
  }
}

std::vector<cplx> greens_column(cplx z, std::int64_t l, IndexRange window, const CoinParams& coin,
                                const PhaseSequence& phases, Truncation truncation, double* residual) {
  require_resolvent_z(z);
  if (!window.contains(l)) throw WindowError("greens_column: column outside the window");
  const BandUnitary u = build_band_matrix(window, coin, phases, truncation);
  const BandMatrix a = shifted(u, z);
  const BandLU lu(a);
  std::vector<cplx> g(window.size());
  g[static_cast<std::size_t>(l - window.first)] = 1.0;
  lu.solve_in_place(g);
  if (residual != nullptr) {
    std::vector<cplx> res = a.multiply(g);
    res[static_cast<std::size_t>(l - window.first)] -= 1.0;
    double worst = 0.0;
    for (const cplx& v : res) worst = std::max(worst, std::abs(v));
    *residual = worst;
  }
  return g;
}

cplx greens_direct(const GreensQuery& q, const CoinParams& coin, const PhaseSequence& phases) {
  validate(q);
  double residual = 0.0;
  const std::vector<cplx> g = greens_column(q.z, q.l, q.window, coin, phases, q.truncation, &residual);
  double scale = 1.0;
  for (const cplx& v : g) scale = std::max(scale, std::abs(v));
  if (residual > 1e-10 * scale) throw NumericalError("greens_direct: solver residual above 1e-10");
  return g[static_cast<std::size_t>(q.k - q.window.first)];
}

cplx greens_corner(cplx z, IndexRange window, const CoinParams& coin, const PhaseSequence& phases) {
  require_resolvent_z(z);
  const auto pa = generalized_eigenvector(z, coin, phases, window, Side::kPlus);
  const auto pb = generalized_eigenvector(z, coin, phases, window, Side::kMinus);
  auto a = [&](std::int64_t m) { return pa[static_cast<std::size_t>(m - window.first)]; };
  auto b = [&](std::int64_t m) { return pb[static_cast<std::size_t>(m - window.first)]; };
  const std::int64_t lo = window.first;
  const std::int64_t hi = window.last;
  const cplx t1 = a(hi - 1) * b(hi);
  const cplx t2 = b(hi - 1) * a(hi);
  const cplx den = t1 - t2;
  if (std::abs(den) <= 1e-12 * (std::abs(t1) + std::abs(t2))) {
    throw NumericalError("greens_corner: vanishing denominator (z near an eigenvalue)");
  }
  return -(1.0 / z) * b(hi - 1) * a(lo) / den;
}

cplx greens_formula(const GreensQuery& q, const CoinParams& coin, const PhaseSequence& phases) {
  validate(q);
  if (q.truncation != Truncation::kFinite) {
    throw std::invalid_argument("greens_formula: only the finite truncation is supported");
  }
  const IndexRange w = q.window;
  if (q.l < w.first + 1) {
    throw WindowError("greens_formula: column must satisfy 2n0+1 <= l <= 2m0");
  }
  if (q.k == w.first && q.l == w.last) return greens_corner(q.z, w, coin, phases);

  const auto pa = generalized_eigenvector(q.z, coin, phases, w, Side::kPlus);
  const auto pb = generalized_eigenvector(q.z, coin, phases, w, Side::kMinus);
  auto a = [&](std::int64_t m) { return pa[static_cast<std::size_t>(m - w.first)]; };
  auto b = [&](std::int64_t m) { return pb[static_cast<std::size_t>(m - w.first)]; };

  const std::int64_t even = q.l % 2 == 0 ? q.l : q.l + 1;  // 2n
  const cplx t1 = b(even - 1) * a(even);
  const cplx t2 = b(even) * a(even - 1);
  const cplx den = t1 - t2;
  if (std::abs(den) <= 1e-12 * (std::abs(t1) + std::abs(t2))) {
    throw NumericalError("greens_formula: vanishing denominator (z near an eigenvalue)");
  }
  // column 2n pairs with index 2n−1, column 2n−1 with index 2n
  const std::int64_t partner = q.l % 2 == 0 ? even - 1 : even;
  const cplx num = q.k <= even - 1 ? b(partner) * a(q.k) : b(q.k) * a(partner);
  return num / (q.z * den);
}

// ---------------------------------------------------------------------------

IndexRange padded_window(std::span<const std::pair<std::int64_t, std::int64_t>> pairs,
                         std::int64_t padding) {
  if (pairs.empty()) throw std::invalid_argument("padded_window: no pairs");
  std::int64_t lo = pairs.front().first;
  std::int64_t hi = lo;
  for (const auto& [k, l] : pairs) {
    lo = std::min({lo, k, l});
    hi = std::max({hi, k, l});
  }
  lo -= padding;
  hi += padding;
  // round outward to even endpoints
  if (lo % 2 != 0) --lo;
  if (hi % 2 != 0) ++hi;
  return {lo, hi};
}

std::vector<std::pair<std::int64_t, std::int64_t>> distance_pairs(std::span<const std::int64_t> distances,
                                                                  std::int64_t l) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  out.reserve(distances.size());
  for (std::int64_t d : distances) out.emplace_back(l + d, l);
  return out;
}

FractionalMomentEstimate fractional_moment(cplx z, double s,
                                           std::span<const std::pair<std::int64_t, std::int64_t>> pairs,
                                           const PhaseDistribution& dist, const CoinParams& coin,
                                           const FractionalMomentOptions& opt) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("fractional_moment: s must lie in (0,1)");
  if (opt.replicas < 1) throw std::invalid_argument("fractional_moment: replicas must be positive");
  if (pairs.empty()) throw std::invalid_argument("fractional_moment: empty pair list");
  require_resolvent_z(z);
  std::int64_t dmax = 0;
  for (const auto& [k, l] : pairs) dmax = std::max(dmax, std::abs(k - l));
  const IndexRange window = opt.window.empty() ? padded_window(pairs, 2 * dmax) : opt.window;
  for (const auto& [k, l] : pairs) {
    if (!window.contains(k) || !window.contains(l)) throw WindowError("fractional_moment: pair outside window");
  }

  std::map<std::int64_t, std::size_t> column_slot;
  for (const auto& [k, l] : pairs) column_slot.emplace(l, column_slot.size());

  const auto n_pairs = pairs.size();
  const auto reps = static_cast<std::size_t>(opt.replicas);
  std::vector<double> samples(n_pairs * reps);
  parallel_for(reps, opt.workers, [&](std::size_t rep) {
    const PhaseSequence phases = sample_phases(dist, window, derive_seed(opt.seed, rep));
    std::vector<std::vector<cplx>> cols(column_slot.size());
    for (const auto& [l, slot] : column_slot) cols[slot] = greens_column(z, l, window, coin, phases);
    for (std::size_t p = 0; p < n_pairs; ++p) {
      const auto& [k, l] = pairs[p];
      const cplx g = cols[column_slot.at(l)][static_cast<std::size_t>(k - window.first)];
      samples[p * reps + rep] = std::pow(std::abs(g), s);
    }
  });

  FractionalMomentEstimate est;
  est.z = z;
  est.s = s;
  est.replicas = opt.replicas;
  est.window = window;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const MeanStderr ms = mean_stderr(std::span<const double>(samples).subspan(p * reps, reps));
    est.rows.push_back({std::abs(pairs[p].first - pairs[p].second), pairs[p].first, pairs[p].second,
                        ms.mean, ms.stderr_});
  }
  return est;
}

DecayFit decay_fit(std::span<const FractionalMomentRow> rows) {
  struct Pool {
    double sum = 0.0;
    double var = 0.0;
    int count = 0;
  };
  std::map<std::int64_t, Pool> pooled;
  for (const auto& row : rows) {
    if (!(row.mean > 0.0)) throw NumericalError("decay_fit: nonpositive fractional-moment estimate");
    auto& p = pooled[row.distance];
    p.sum += row.mean;
    p.var += row.stderr_ * row.stderr_;
    ++p.count;
  }
  if (pooled.size() < 4) throw std::invalid_argument("decay_fit: need at least four distinct distances");

  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sigma;
  bool weighted = true;
  for (const auto& [d, p] : pooled) {
    const double mean = p.sum / p.count;
    const double se = std::sqrt(p.var) / p.count;
    x.push_back(static_cast<double>(d));
    y.push_back(std::log(mean));
    sigma.push_back(se / mean);
    if (!(se > 0.0)) weighted = false;
  }
  const std::size_t n = x.size();
  std::vector<double> w(n, 1.0);
  if (weighted) {
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / (sigma[i] * sigma[i]);
  }
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xbar = sx / sw;
  const double ybar = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    syy += w[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  const double slope = sxy / sxx;
  const double intercept = ybar - slope * xbar;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double res = y[i] - intercept - slope * x[i];
    chi2 += w[i] * res * res;
  }
  const double reduced = chi2 / static_cast<double>(n - 2);
  // absolute weights: inflate only when the scatter exceeds the quoted errors
  const double scale = weighted ? std::max(1.0, reduced) : reduced;
  const double slope_se = std::sqrt(scale / sxx);

  DecayFit fit;
  fit.alpha_hat = -slope;
  fit.C_hat = std::exp(intercept);
  fit.alpha_stderr = slope_se;
  fit.ci_low = fit.alpha_hat - 1.96 * slope_se;
  fit.ci_high = fit.alpha_hat + 1.96 * slope_se;
  fit.r_squared = syy > 0.0 ? 1.0 - chi2 / syy : 1.0;
  fit.points = static_cast<int>(n);
  return fit;
}

void write_fractional_moment_csv(std::ostream& os, const FractionalMomentEstimate& est) {
  os << "distance,s,re_z,im_z,mean,stderr,replicas\n";
  for (const auto& row : est.rows) {
    os << row.distance << ',' << fmt_double(est.s) << ',' << fmt_double(est.z.real()) << ','
       << fmt_double(est.z.imag()) << ',' << fmt_double(row.mean) << ',' << fmt_double(row.stderr_)
       << ',' << est.replicas << '\n';
  }
}

nlohmann::json to_json(const DecayFit& fit) {
  return nlohmann::json{{"C_hat", fit.C_hat},       {"alpha_hat", fit.alpha_hat},
                        {"alpha_stderr", fit.alpha_stderr}, {"ci_low", fit.ci_low},
                        {"ci_high", fit.ci_high},   {"r_squared", fit.r_squared},
                        {"points", fit.points}};
}

}  // namespace qwalk
