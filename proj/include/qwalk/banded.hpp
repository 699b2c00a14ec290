#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qwalk {

/// Square complex band matrix with kl sub- and ku super-diagonals (column-major band storage).
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(std::size_t n, int kl, int ku);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] int kl() const noexcept { return kl_; }
  [[nodiscard]] int ku() const noexcept { return ku_; }

  [[nodiscard]] bool in_band(std::size_t i, std::size_t j) const noexcept {
    const auto d = static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j);
    return d <= kl_ && -d <= ku_;
  }

  /// Entry (i, j); zero outside the band.
  [[nodiscard]] std::complex<double> operator()(std::size_t i, std::size_t j) const noexcept;
  /// Mutable reference; (i, j) must lie in the band.
  std::complex<double>& ref(std::size_t i, std::size_t j);

  [[nodiscard]] std::vector<std::complex<double>> multiply(
      std::span<const std::complex<double>> x) const;

  [[nodiscard]] Eigen::MatrixXcd to_dense() const;

 private:
  std::size_t n_ = 0;
  int kl_ = 0;
  int ku_ = 0;
  std::vector<std::complex<double>> band_;  // (kl+ku+1) x n
};

/// LU factorization with partial pivoting of a band matrix (fill-in widens the upper band by kl).
class BandLU {
 public:
  explicit BandLU(const BandMatrix& a);

  /// Solves A x = b in place. Throws NumericalError on a zero pivot.
  void solve_in_place(std::span<std::complex<double>> b) const;
  [[nodiscard]] std::vector<std::complex<double>> solve(std::span<const std::complex<double>> b) const;

 private:
  std::size_t n_;
  int kl_;
  int ku_;  // of the factor: original ku + kl
  int ld_;
  std::vector<std::complex<double>> lu_;
  std::vector<std::size_t> piv_;

  std::complex<double>& at(std::size_t i, std::size_t j) {
    return lu_[static_cast<std::size_t>(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j) + ku_) +
               j * static_cast<std::size_t>(ld_)];
  }
  [[nodiscard]] const std::complex<double>& at(std::size_t i, std::size_t j) const {
    return lu_[static_cast<std::size_t>(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j) + ku_) +
               j * static_cast<std::size_t>(ld_)];
  }
};

}  // namespace qwalk
