#include "qwalk/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qwalk/errors.hpp"

namespace qwalk {

using cplx = std::complex<double>;

BandMatrix::BandMatrix(std::size_t n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), band_(static_cast<std::size_t>(kl + ku + 1) * n) {
  if (kl < 0 || ku < 0) throw std::invalid_argument("BandMatrix: negative bandwidth");
}

cplx BandMatrix::operator()(std::size_t i, std::size_t j) const noexcept {
  if (i >= n_ || j >= n_ || !in_band(i, j)) return {};
  const auto row = static_cast<std::size_t>(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j) + ku_);
  return band_[row + j * static_cast<std::size_t>(kl_ + ku_ + 1)];
}

cplx& BandMatrix::ref(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_ || !in_band(i, j)) throw std::out_of_range("BandMatrix: entry outside band");
  const auto row = static_cast<std::size_t>(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j) + ku_);
  return band_[row + j * static_cast<std::size_t>(kl_ + ku_ + 1)];
}

std::vector<cplx> BandMatrix::multiply(std::span<const cplx> x) const {
  if (x.size() != n_) throw std::invalid_argument("BandMatrix::multiply: size mismatch");
  std::vector<cplx> y(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t lo = j >= static_cast<std::size_t>(ku_) ? j - static_cast<std::size_t>(ku_) : 0;
    const std::size_t hi = std::min(n_ - 1, j + static_cast<std::size_t>(kl_));
    for (std::size_t i = lo; i <= hi; ++i) y[i] += (*this)(i, j) * x[j];
  }
  return y;
}

Eigen::MatrixXcd BandMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) {
      if (in_band(i, j)) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j);
    }
  }
  return d;
}

BandLU::BandLU(const BandMatrix& a)
    : n_(a.size()), kl_(a.kl()), ku_(a.ku() + a.kl()), ld_(2 * a.kl() + a.ku() + 1),
      lu_(static_cast<std::size_t>(ld_) * a.size()), piv_(a.size()) {
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) {
      if (a.in_band(i, j)) at(i, j) = a(i, j);
    }
  }
  const auto kl = static_cast<std::size_t>(kl_);
  const auto ku = static_cast<std::size_t>(ku_);
  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t last_row = std::min(n_ - 1, k + kl);
    std::size_t p = k;
    double best = std::abs(at(k, k));
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      if (std::abs(at(i, k)) > best) {
        best = std::abs(at(i, k));
        p = i;
      }
    }
    piv_[k] = p;
    if (best == 0.0) throw NumericalError("BandLU: singular matrix (zero pivot)");
    const std::size_t last_col = std::min(n_ - 1, k + ku);
    if (p != k) {
      for (std::size_t j = k; j <= last_col; ++j) std::swap(at(k, j), at(p, j));
    }
    const cplx inv = 1.0 / at(k, k);
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      const cplx f = at(i, k) * inv;
      at(i, k) = f;
      if (f == cplx{}) continue;
      for (std::size_t j = k + 1; j <= last_col; ++j) at(i, j) -= f * at(k, j);
    }
  }
}

void BandLU::solve_in_place(std::span<cplx> b) const {
  if (b.size() != n_) throw std::invalid_argument("BandLU::solve: size mismatch");
  const auto kl = static_cast<std::size_t>(kl_);
  const auto ku = static_cast<std::size_t>(ku_);
  for (std::size_t k = 0; k < n_; ++k) {
    if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
    const std::size_t last_row = std::min(n_ - 1, k + kl);
    for (std::size_t i = k + 1; i <= last_row; ++i) b[i] -= at(i, k) * b[k];
  }
  for (std::size_t kk = n_; kk-- > 0;) {
    const std::size_t last_col = std::min(n_ - 1, kk + ku);
    cplx s = b[kk];
    for (std::size_t j = kk + 1; j <= last_col; ++j) s -= at(kk, j) * b[j];
    b[kk] = s / at(kk, kk);
  }
}

std::vector<cplx> BandLU::solve(std::span<const cplx> b) const {
  std::vector<cplx> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

}  // namespace qwalk
