// SPDX-License-Identifier: Apache-2.0
#include "nudoa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nudoa/errors.hpp"

namespace nudoa {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw DomainError("ComplexMatrix: entry count " + std::to_string(data_.size()) +
                      " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<cplx> ComplexMatrix::column(std::size_t j) const {
  std::vector<cplx> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void ComplexMatrix::set_column(std::size_t j, std::span<const cplx> values) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

ComplexMatrix ComplexMatrix::columns(std::size_t first, std::size_t count) const {
  ComplexMatrix out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (const auto& z : data_) sum += std::norm(z);
  return std::sqrt(sum);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DomainError("ComplexMatrix: shape mismatch in +");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DomainError("ComplexMatrix: shape mismatch in -");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scale) {
  for (auto& z : data_) z *= scale;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.cols_ != rhs.rows_) throw DomainError("ComplexMatrix: shape mismatch in *");
  ComplexMatrix out(lhs.rows_, rhs.cols_);
  for (std::size_t i = 0; i < lhs.rows_; ++i) {
    for (std::size_t k = 0; k < lhs.cols_; ++k) {
      const cplx a = lhs(i, k);
      if (a == cplx{}) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

std::vector<cplx> operator*(const ComplexMatrix& lhs, std::span<const cplx> rhs) {
  if (lhs.cols_ != rhs.size()) throw DomainError("ComplexMatrix: shape mismatch in matrix-vector *");
  std::vector<cplx> out(lhs.rows_);
  for (std::size_t i = 0; i < lhs.rows_; ++i) {
    cplx acc{};
    for (std::size_t k = 0; k < lhs.cols_; ++k) acc += lhs(i, k) * rhs[k];
    out[i] = acc;
  }
  return out;
}

ComplexMatrix DiagonalMatrix::to_dense() const {
  ComplexMatrix m(dim(), dim());
  for (std::size_t i = 0; i < dim(); ++i) m(i, i) = diag_[i];
  return m;
}

HermitianMatrix::HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw DomainError("HermitianMatrix: input must be square and non-empty");
  }
  const std::size_t n = m_.rows();
  for (std::size_t i = 0; i < n; ++i) {
    m_(i, i) = m_(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx avg = 0.5 * (m_(i, j) + std::conj(m_(j, i)));
      m_(i, j) = avg;
      m_(j, i) = std::conj(avg);
    }
  }
}

std::vector<double> HermitianMatrix::diagonal() const {
  std::vector<double> d(dim());
  for (std::size_t i = 0; i < dim(); ++i) d[i] = m_(i, i).real();
  return d;
}

HermitianMatrix HermitianMatrix::shifted(double shift) const {
  ComplexMatrix m = m_;
  for (std::size_t i = 0; i < dim(); ++i) m(i, i) += shift;
  return HermitianMatrix(std::move(m));
}

cplx inner(std::span<const cplx> x, std::span<const cplx> y) {
  cplx acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

double norm2(std::span<const cplx> x) {
  double acc = 0.0;
  for (const auto& z : x) acc += std::norm(z);
  return std::sqrt(acc);
}

namespace {

double off_diagonal_mass(const ComplexMatrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

// Rotate the largest-magnitude entry of column j onto the positive real axis.
void normalize_phase(ComplexMatrix& v, std::size_t j) {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    const double mag = std::abs(v(i, j));
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  if (best_mag <= 0.0) return;
  const cplx unphase = std::conj(v(best, j)) / best_mag;
  for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) *= unphase;
  v(best, j) = best_mag;
}

EigenPairs sorted_pairs(std::vector<double> values, const ComplexMatrix& vectors) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  EigenPairs out;
  out.values.resize(values.size());
  out.vectors = ComplexMatrix(vectors.rows(), vectors.cols());
  for (std::size_t j = 0; j < order.size(); ++j) {
    out.values[j] = values[order[j]];
    for (std::size_t i = 0; i < vectors.rows(); ++i) out.vectors(i, j) = vectors(i, order[j]);
    normalize_phase(out.vectors, j);
  }
  return out;
}

}  // namespace

EigenPairs eigh(const HermitianMatrix& h, const JacobiOptions& options) {
  const std::size_t n = h.dim();
  ComplexMatrix a = h.matrix();
  ComplexMatrix w = ComplexMatrix::identity(n);
  const double threshold = options.relative_tolerance * h.frobenius_norm();

  double off = off_diagonal_mass(a);
  int sweep = 0;
  while (off > threshold) {
    if (sweep++ >= options.max_sweeps) {
      throw NumericalError("eigh: Jacobi did not converge in " + std::to_string(options.max_sweeps) +
                               " sweeps (off-diagonal mass " + std::to_string(off) + ")",
                           off);
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();

        // Strip the phase of a_pq, then a real symmetric Jacobi rotation.
        const cplx phase_conj = std::conj(apq) / mag;
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const cplx vpp = c;
        const cplx vpq = s;
        const cplx vqp = -s * phase_conj;
        const cplx vqq = c * phase_conj;

        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * vpp + akq * vqp;
          a(k, q) = akp * vpq + akq * vqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = std::conj(vpp) * apk + std::conj(vqp) * aqk;
          a(q, k) = std::conj(vpq) * apk + std::conj(vqq) * aqk;
        }
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (std::size_t k = 0; k < n; ++k) {
          const cplx wkp = w(k, p);
          const cplx wkq = w(k, q);
          w(k, p) = wkp * vpp + wkq * vqp;
          w(k, q) = wkp * vpq + wkq * vqq;
        }
      }
    }
    off = off_diagonal_mass(a);
  }

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i).real();
  return sorted_pairs(std::move(values), w);
}

EigenPairs generalized_eigh(const HermitianMatrix& r, const DiagonalMatrix& q, const JacobiOptions& options) {
  const std::size_t n = r.dim();
  if (q.dim() != n) {
    throw DomainError("generalized_eigh: dimension mismatch (" + std::to_string(n) + " vs " +
                      std::to_string(q.dim()) + ")");
  }
  std::vector<double> whiten(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(q[i] > 0.0)) throw DomainError("noise covariance not positive definite");
    whiten[i] = 1.0 / std::sqrt(q[i]);
  }

  ComplexMatrix c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c(i, j) = whiten[i] * r(i, j) * whiten[j];

  EigenPairs whitened = eigh(HermitianMatrix(std::move(c)), options);
  ComplexMatrix& v = whitened.vectors;
  for (std::size_t j = 0; j < n; ++j) {
    double len = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v(i, j) *= whiten[i];
      len += std::norm(v(i, j));
    }
    len = std::sqrt(len);
    for (std::size_t i = 0; i < n; ++i) v(i, j) /= len;
    normalize_phase(v, j);
  }
  return whitened;
}

ComplexMatrix orthonormalize(const ComplexMatrix& vectors) {
  constexpr double kDependenceTolerance = 1e-12;
  ComplexMatrix out = vectors;
  for (std::size_t j = 0; j < out.cols(); ++j) {
    std::vector<cplx> v = out.column(j);
    const double original = norm2(v);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const std::vector<cplx> qi = out.column(i);
        const cplx proj = inner(qi, v);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= proj * qi[k];
      }
    }
    const double remaining = norm2(v);
    if (original == 0.0 || remaining < kDependenceTolerance * original) {
      throw NumericalError("orthonormalize: column " + std::to_string(j) + " is numerically dependent",
                           original == 0.0 ? 0.0 : remaining / original);
    }
    for (auto& z : v) z /= remaining;
    out.set_column(j, v);
  }
  return out;
}

ComplexMatrix projector(const ComplexMatrix& basis) { return basis * basis.adjoint(); }

}  // namespace nudoa
