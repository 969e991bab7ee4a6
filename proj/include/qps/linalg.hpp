/* Copyright 2026 The QPS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef QPS_LINALG_HPP_
#define QPS_LINALG_HPP_

// Dense complex matrix primitives shared by every other header.

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qps/error.hpp"

namespace qps {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Default relative rank tolerance (relative to the largest eigen/singular
/// value).
inline constexpr double kRankTol = 1e-10;

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are sorted in
/// descending order; column j of `vectors` belongs to `values[j]`.
struct Spectrum {
  RealVector values;
  Matrix vectors;
};

inline double frobenius_norm(const Matrix& a) { return a.norm(); }

/// Largest singular value.
inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

inline double hermiticity_defect(const Matrix& a) {
  return (a - a.adjoint()).norm();
}

inline void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(Errc::DimensionMismatch,
                std::string(what) + " must be a non-empty square matrix");
  }
}

inline void require_same_shape(const Matrix& a, const Matrix& b,
                               const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(Errc::DimensionMismatch, std::string(what) +
                                             ": shapes " +
                                             std::to_string(a.rows()) + "x" +
                                             std::to_string(a.cols()) +
                                             " and " +
                                             std::to_string(b.rows()) + "x" +
                                             std::to_string(b.cols()));
  }
}

inline Matrix hermitian_part(const Matrix& a) {
  return 0.5 * (a + a.adjoint());
}

inline Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

/// |a><b|
inline Matrix outer(const Vector& a, const Vector& b) {
  return a * b.adjoint();
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Vector basis_vector(Eigen::Index dim, Eigen::Index index) {
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return v;
}

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

namespace detail {

// Rotate v so that its largest-magnitude component is real and nonnegative.
// Near-ties are resolved towards the lowest index so that roundoff does not
// flip the choice between runs.
inline void fix_phase(Eigen::Ref<Vector> v) {
  double largest = v.cwiseAbs().maxCoeff();
  if (largest == 0.0) return;
  Eigen::Index pick = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= largest * (1.0 - 1e-12)) {
      pick = i;
      break;
    }
  }
  v *= std::conj(v(pick)) / std::abs(v(pick));
}

}  // namespace detail

/// Hermitian eigendecomposition with descending eigenvalues and phase-fixed
/// eigenvectors.
inline Spectrum eig_hermitian(const Matrix& h) {
  require_square(h, "eig_hermitian input");
  double scale = std::max(1.0, h.norm());
  double defect = hermiticity_defect(h);
  if (!(defect < 1e-10 * scale)) {
    throw Error(Errc::NonHermitianInput,
                "||H - H^dagger||_F = " + std::to_string(defect));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::ConvergenceFailure,
                "Hermitian eigensolver did not converge");
  }
  const Eigen::Index n = h.rows();
  Spectrum out{RealVector(n), Matrix(n, n)};
  // Eigen returns ascending order.
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = solver.eigenvalues()(n - 1 - j);
    out.vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
    detail::fix_phase(out.vectors.col(j));
  }
  return out;
}

/// Reassemble V diag(f(lambda)) V^dagger.
template <typename F>
Matrix apply_spectral_function(const Spectrum& s, F&& f) {
  RealVector mapped = s.values.unaryExpr(std::forward<F>(f));
  return s.vectors * mapped.cast<cplx>().asDiagonal() * s.vectors.adjoint();
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues
/// in [-1e-8, 0) are treated as roundoff and clamped to zero.
inline Matrix sqrt_psd(const Matrix& e) {
  Spectrum s = eig_hermitian(e);
  double smallest = s.values.minCoeff();
  if (smallest < -1e-8) {
    throw Error(Errc::NotPsd,
                "minimum eigenvalue " + std::to_string(smallest));
  }
  // Eigenvalues within roundoff of zero map to zero, not to ~1e-8.
  double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                 std::max(1.0, s.values.cwiseAbs().maxCoeff());
  return apply_spectral_function(
      s, [floor](double v) { return v > floor ? std::sqrt(v) : 0.0; });
}

/// exp(-i t G) for Hermitian G.
inline Matrix expm_hermitian(const Matrix& g, double t) {
  Spectrum s = eig_hermitian(g);
  Vector phases(s.values.size());
  for (Eigen::Index j = 0; j < s.values.size(); ++j) {
    phases(j) = std::exp(-kI * t * s.values(j));
  }
  return s.vectors * phases.asDiagonal() * s.vectors.adjoint();
}

/// Orthogonal projector onto the column span of `columns`. Singular values
/// at or below rel_tol * (largest singular value), or below abs_tol, are
/// treated as zero. An all-zero input yields the zero projector.
inline Matrix span_projector(const Matrix& columns, double rel_tol = kRankTol,
                             double abs_tol = 0.0) {
  const Eigen::Index dim = columns.rows();
  if (columns.cols() == 0) return Matrix::Zero(dim, dim);
  Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU);
  const RealVector& sv = svd.singularValues();
  double cutoff = std::max(rel_tol * sv(0), abs_tol);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  Matrix u = svd.matrixU().leftCols(rank);
  return u * u.adjoint();
}

inline Matrix span_projector(std::span<const Vector> vectors,
                             double rel_tol = kRankTol, double abs_tol = 0.0) {
  if (vectors.empty()) {
    throw Error(Errc::DimensionMismatch, "span_projector needs vectors");
  }
  const Eigen::Index dim = vectors.front().size();
  Matrix stacked(dim, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != dim) {
      throw Error(Errc::DimensionMismatch,
                  "span_projector vectors have different dimensions");
    }
    stacked.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  return span_projector(stacked, rel_tol, abs_tol);
}

inline bool is_projector(const Matrix& p, double tol = 1e-10) {
  if (p.rows() != p.cols()) return false;
  return hermiticity_defect(p) < tol && (p * p - p).norm() < tol;
}

/// Number of eigenvalues above rel_tol * max(largest, 0).
inline Eigen::Index numerical_rank(const RealVector& descending,
                                   double rel_tol = kRankTol) {
  if (descending.size() == 0 || descending(0) <= 0.0) return 0;
  double cutoff = rel_tol * descending(0);
  Eigen::Index r = 0;
  while (r < descending.size() && descending(r) > cutoff) ++r;
  return r;
}

inline double trace_real(const Matrix& a) { return a.trace().real(); }

}  // namespace qps

#endif  // QPS_LINALG_HPP_
