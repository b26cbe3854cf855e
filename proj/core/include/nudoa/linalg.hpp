// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nudoa {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const cplx> data() const noexcept { return data_; }

  std::vector<cplx> column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const cplx> values);

  /// Columns [first, first + count).
  ComplexMatrix columns(std::size_t first, std::size_t count) const;

  ComplexMatrix adjoint() const;
  double frobenius_norm() const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(cplx scale);

  friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
  friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
  friend ComplexMatrix operator*(ComplexMatrix lhs, cplx scale) { return lhs *= scale; }
  friend ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
  friend std::vector<cplx> operator*(const ComplexMatrix& lhs, std::span<const cplx> rhs);

  bool operator==(const ComplexMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// Real diagonal matrix stored by its diagonal.
class DiagonalMatrix {
 public:
  DiagonalMatrix() = default;
  explicit DiagonalMatrix(std::vector<double> diag) : diag_(std::move(diag)) {}

  std::size_t dim() const noexcept { return diag_.size(); }
  double operator[](std::size_t i) const { return diag_[i]; }
  double& operator[](std::size_t i) { return diag_[i]; }
  const std::vector<double>& diag() const noexcept { return diag_; }

  ComplexMatrix to_dense() const;

  bool operator==(const DiagonalMatrix&) const = default;

 private:
  std::vector<double> diag_;
};

/// Square complex matrix held Hermitian. Construction symmetrizes the input
/// as (H + H^H) / 2, so the diagonal is exactly real.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(ComplexMatrix m);

  std::size_t dim() const noexcept { return m_.rows(); }
  const cplx& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const ComplexMatrix& matrix() const noexcept { return m_; }

  /// Real diagonal entries.
  std::vector<double> diagonal() const;
  double frobenius_norm() const { return m_.frobenius_norm(); }

  /// H + shift * I.
  HermitianMatrix shifted(double shift) const;

  bool operator==(const HermitianMatrix&) const = default;

 private:
  ComplexMatrix m_;
};

/// Eigenvalues in ascending order with matching eigenvector columns.
struct EigenPairs {
  std::vector<double> values;
  ComplexMatrix vectors;
};

struct JacobiOptions {
  int max_sweeps = 100;
  /// Converged once the off-diagonal Frobenius mass drops below
  /// relative_tolerance * ||H||_F.
  double relative_tolerance = 1e-12;
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvector phase is normalized so that the largest-magnitude entry of each
/// vector is real and positive. Throws NumericalError (carrying the achieved
/// off-diagonal mass) when the sweep cap is hit before convergence.
EigenPairs eigh(const HermitianMatrix& h, const JacobiOptions& options = {});

/// Solves R u = lambda Q u for diagonal positive-definite Q by whitening:
/// standard ED of Q^{-1/2} R Q^{-1/2}, back-transform u = Q^{-1/2} v, then
/// rescale each u to unit Euclidean length. Distinct vectors stay
/// Q-orthogonal.
EigenPairs generalized_eigh(const HermitianMatrix& r, const DiagonalMatrix& q,
                            const JacobiOptions& options = {});

/// Orthonormal basis for the column span, by modified Gram-Schmidt with one
/// reorthogonalization pass. Throws NumericalError when a column is
/// numerically dependent on the previous ones.
ComplexMatrix orthonormalize(const ComplexMatrix& vectors);

/// U U^H for a matrix with orthonormal columns.
ComplexMatrix projector(const ComplexMatrix& basis);

/// x^H y
cplx inner(std::span<const cplx> x, std::span<const cplx> y);
double norm2(std::span<const cplx> x);

}  // namespace nudoa
