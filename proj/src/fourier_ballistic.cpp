#include "qwalk/fourier_ballistic.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "qwalk/errors.hpp"
#include "qwalk/numeric_format.hpp"

namespace qwalk {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_unitary(const Eigen::Matrix2cd& c) {
  if ((c.adjoint() * c - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ValidationError("coin matrix is not unitary");
  }
}

// f(x) = Σ_k ψ(k) e^{-ikx} as a 2-vector (↑, ↓).
Eigen::Vector2cd fourier_state(const WalkState& s, double x) {
  Eigen::Vector2cd f = Eigen::Vector2cd::Zero();
  for (std::int64_t m = s.offset(); m <= s.last_index(); ++m) {
    f(spin_of(m)) += s.at(m) * std::polar(1.0, -static_cast<double>(site_of(m)) * x);
  }
  return f;
}

double integrate(const Eigen::Matrix2cd& coin, const WalkState& initial, int grid) {
  double acc = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = kTwoPi * i / grid;
    const SymbolEigen e = symbol_eigen(x, coin);
    const Eigen::Vector2cd f = fourier_state(initial, x);
    for (int j = 0; j < 2; ++j) {
      const double v = e.group_velocity[static_cast<std::size_t>(j)];
      acc += v * v * (e.projector[static_cast<std::size_t>(j)] * f).squaredNorm();
    }
  }
  return acc / grid;
}

}  // namespace

Eigen::Matrix2cd symbol(double x, const Eigen::Matrix2cd& coin) {
  require_unitary(coin);
  Eigen::Matrix2cd v = coin;
  v.row(0) *= std::polar(1.0, -x);
  v.row(1) *= std::polar(1.0, x);
  return v;
}

SymbolEigen symbol_eigen(double x, const Eigen::Matrix2cd& coin) {
  const Eigen::Matrix2cd v = symbol(x, coin);
  SymbolEigen out;
  const cplx a = coin(0, 0);
  const cplx d = coin(1, 1);
  const bool diagonal = std::abs(v(0, 1)) < 1e-14 && std::abs(v(1, 0)) < 1e-14;
  if (diagonal) {
    // analytic branches of a diagonal symbol are its entries, even where they cross
    out.eigenvalue = {v(0, 0), v(1, 1)};
    out.group_velocity = {-1.0, 1.0};
    out.projector[0] << 1, 0, 0, 0;
    out.projector[1] << 0, 0, 0, 1;
    return out;
  }
  const cplx tr = v.trace();
  const cplx det = v.determinant();
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  out.eigenvalue = {0.5 * (tr + disc), 0.5 * (tr - disc)};
  // p(α, x) = α² − tr V(x) α + det C;  dα/dx = tr'(x) α / (2α − tr V(x))
  const cplx dtr = -kI * std::polar(1.0, -x) * a + kI * std::polar(1.0, x) * d;
  for (std::size_t j = 0; j < 2; ++j) {
    const cplx alpha = out.eigenvalue[j];
    const cplx dalpha = dtr * alpha / (2.0 * alpha - tr);
    out.group_velocity[j] = std::imag(dalpha / alpha);
    const cplx other = out.eigenvalue[1 - j];
    out.projector[j] = (v - other * Eigen::Matrix2cd::Identity()) / (alpha - other);
  }
  return out;
}

BandsData bands(const Eigen::Matrix2cd& coin, int grid_size) {
  if (grid_size < 16) throw std::invalid_argument("bands: grid_size must be at least 16");
  BandsData out;
  out.x.resize(static_cast<std::size_t>(grid_size));
  for (auto& v : out.eigenphase) v.resize(out.x.size());
  for (auto& v : out.group_velocity) v.resize(out.x.size());
  for (auto& v : out.projector) v.resize(out.x.size());
  std::array<double, 2> prev{};
  for (int i = 0; i < grid_size; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double x = kTwoPi * i / grid_size;
    out.x[ui] = x;
    SymbolEigen e = symbol_eigen(x, coin);
    std::array<double, 2> ph = {std::arg(e.eigenvalue[0]), std::arg(e.eigenvalue[1])};
    if (i > 0) {
      // nearest-phase matching against the previous grid point
      auto dist = [](double p, double q) { return std::abs(std::remainder(p - q, kTwoPi)); };
      const double keep = dist(ph[0], prev[0]) + dist(ph[1], prev[1]);
      const double swap = dist(ph[1], prev[0]) + dist(ph[0], prev[1]);
      if (swap < keep) {
        std::swap(ph[0], ph[1]);
        std::swap(e.group_velocity[0], e.group_velocity[1]);
        std::swap(e.projector[0], e.projector[1]);
      }
    }
    for (std::size_t j = 0; j < 2; ++j) {
      out.eigenphase[j][ui] = ph[j];
      out.group_velocity[j][ui] = e.group_velocity[j];
      out.projector[j][ui] = e.projector[j];
    }
    prev = ph;
  }
  return out;
}

void write_bands_csv(std::ostream& os, const BandsData& data) {
  os << "x,branch,eigenphase,group_velocity\n";
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      os << fmt_double(data.x[i]) << ',' << j << ',' << fmt_double(data.eigenphase[j][i]) << ','
         << fmt_double(data.group_velocity[j][i]) << '\n';
    }
  }
}

BallisticResult ballistic_constant(const Eigen::Matrix2cd& coin, const WalkState& initial,
                                   int grid_size) {
  require_unitary(coin);
  if (grid_size < 16) throw std::invalid_argument("ballistic_constant: grid_size must be at least 16");
  const double norm = initial.norm2();
  if (std::abs(norm - 1.0) > 1e-10) throw ValidationError("ballistic_constant: initial state not normalized");
  BallisticResult res;
  res.grid_size = grid_size;
  res.B = integrate(coin, initial, grid_size);
  res.quadrature_error = std::abs(res.B - integrate(coin, initial, grid_size / 2));
  return res;
}

}  // namespace qwalk
