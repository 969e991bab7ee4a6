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
#ifndef QPS_STATE_HPP_
#define QPS_STATE_HPP_

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qps/linalg.hpp"

namespace qps {

using Params = std::vector<double>;
using ParamSpan = std::span<const double>;

/// Central-difference settings. The step for parameter i is
/// relative_step * max(1, |x_i|).
struct FiniteDifference {
  double relative_step = 1e-5;
  bool richardson = false;

  double step_at(double xi) const {
    return relative_step * std::max(1.0, std::abs(xi));
  }
};

/// A family x -> rho(x) of density operators together with the way its
/// parameter derivatives are obtained (closed form or central difference).
class ParametricState {
 public:
  using Evaluator = std::function<Matrix(ParamSpan)>;
  using AnalyticDerivative = std::function<Matrix(ParamSpan, std::size_t)>;

  ParametricState(Eigen::Index dim, std::size_t num_params, Evaluator rho)
      : dim_(dim), num_params_(num_params), rho_(std::move(rho)) {
    if (dim <= 0 || num_params == 0) {
      throw Error(Errc::DimensionMismatch,
                  "ParametricState needs positive dim and num_params");
    }
  }

  [[nodiscard]] ParametricState with_analytic_derivative(
      AnalyticDerivative d) const {
    ParametricState copy = *this;
    copy.analytic_ = std::move(d);
    return copy;
  }

  /// Step settings for finite differences taken at fixed measurement
  /// (post-measurement states); an analytic provider, if any, is kept.
  [[nodiscard]] ParametricState with_step(FiniteDifference fd) const {
    ParametricState copy = *this;
    copy.fd_ = fd;
    return copy;
  }

  /// Switches to central differences (dropping any analytic provider).
  [[nodiscard]] ParametricState with_finite_difference(
      FiniteDifference fd) const {
    ParametricState copy = *this;
    copy.analytic_ = nullptr;
    copy.fd_ = fd;
    return copy;
  }

  [[nodiscard]] ParametricState with_domain(Params lower, Params upper) const {
    if (lower.size() != num_params_ || upper.size() != num_params_) {
      throw Error(Errc::DimensionMismatch, "domain bounds size");
    }
    ParametricState copy = *this;
    copy.lower_ = std::move(lower);
    copy.upper_ = std::move(upper);
    return copy;
  }

  Eigen::Index dim() const { return dim_; }
  std::size_t num_params() const { return num_params_; }
  const FiniteDifference& finite_difference() const { return fd_; }
  bool has_analytic_derivative() const { return static_cast<bool>(analytic_); }

  bool in_domain(ParamSpan x) const {
    if (x.size() != num_params_) return false;
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
    }
    return true;
  }

  /// Unvalidated evaluation; most callers want density_at().
  Matrix raw(ParamSpan x) const { return rho_(x); }
  Matrix raw_derivative(ParamSpan x, std::size_t i) const {
    return analytic_(x, i);
  }

 private:
  Eigen::Index dim_;
  std::size_t num_params_;
  Evaluator rho_;
  AnalyticDerivative analytic_;
  FiniteDifference fd_;
  Params lower_;
  Params upper_;
};

inline void require_params(const ParametricState& s, ParamSpan x) {
  if (x.size() != s.num_params()) {
    throw Error(Errc::DimensionMismatch,
                "expected " + std::to_string(s.num_params()) +
                    " parameters, got " + std::to_string(x.size()));
  }
}

/// Validates and returns rho(x): trace 1 and Hermitian within 1e-10,
/// eigenvalues >= -1e-9.
inline Matrix density_at(const ParametricState& s, ParamSpan x) {
  require_params(s, x);
  if (!s.in_domain(x)) {
    throw Error(Errc::InvalidState, "parameter outside the configured domain");
  }
  Matrix rho = s.raw(x);
  if (rho.rows() != s.dim() || rho.cols() != s.dim()) {
    throw Error(Errc::InvalidState, "evaluator returned wrong dimension");
  }
  if (!rho.allFinite()) {
    throw Error(Errc::InvalidState, "non-finite entries");
  }
  double herm = hermiticity_defect(rho);
  if (!(herm < 1e-10)) {
    throw Error(Errc::InvalidState,
                "hermiticity violated: " + std::to_string(herm));
  }
  cplx tr = rho.trace();
  if (!(std::abs(tr - 1.0) < 1e-10)) {
    throw Error(Errc::InvalidState,
                "trace violated: " + std::to_string(tr.real()));
  }
  rho = hermitian_part(rho);
  double smallest = eig_hermitian(rho).values.minCoeff();
  if (smallest < -1e-9) {
    throw Error(Errc::InvalidState,
                "positivity violated: min eigenvalue " +
                    std::to_string(smallest));
  }
  return rho;
}

inline Matrix density_at(const ParametricState& s, double x) {
  return density_at(s, ParamSpan(&x, 1));
}

namespace detail {

inline Params shifted(ParamSpan x, std::size_t i, double delta) {
  Params out(x.begin(), x.end());
  out[i] += delta;
  return out;
}

inline Matrix central_difference(const ParametricState& s, ParamSpan x,
                                 std::size_t i, double h) {
  Params xp = shifted(x, i, h);
  Params xm = shifted(x, i, -h);
  if (!s.in_domain(xp) || !s.in_domain(xm)) {
    throw Error(Errc::DomainEdge,
                "finite-difference stencil leaves the parameter domain");
  }
  return (density_at(s, xp) - density_at(s, xm)) / (2.0 * h);
}

}  // namespace detail

/// d rho / d x_i at x. Central difference uses the state's FiniteDifference
/// settings; with richardson = true the h and h/2 estimates are combined.
inline Matrix derivative_at(const ParametricState& s, ParamSpan x,
                            std::size_t i = 0) {
  require_params(s, x);
  if (i >= s.num_params()) {
    throw Error(Errc::IndexOutOfRange, "parameter index");
  }
  Matrix d;
  if (s.has_analytic_derivative()) {
    d = s.raw_derivative(x, i);
    if (d.rows() != s.dim() || d.cols() != s.dim()) {
      throw Error(Errc::InvalidState, "derivative has wrong dimension");
    }
  } else {
    const FiniteDifference& fd = s.finite_difference();
    double h = fd.step_at(x[i]);
    d = detail::central_difference(s, x, i, h);
    if (fd.richardson) {
      Matrix half = detail::central_difference(s, x, i, 0.5 * h);
      d = (4.0 * half - d) / 3.0;
    }
  }
  d = hermitian_part(d);
  if (!(std::abs(d.trace()) < 1e-8)) {
    throw Error(Errc::InvalidState, "derivative is not traceless");
  }
  return d;
}

inline Matrix derivative_at(const ParametricState& s, double x) {
  return derivative_at(s, ParamSpan(&x, 1), 0);
}

struct SpectralOptions {
  double rank_tol = kRankTol;  // relative to the largest eigenvalue
  double deg_tol = 1e-8;       // relative to the largest eigenvalue
};

/// Eigen-structure of rho(x): descending eigenvalues, the (global) rank,
/// support/kernel projectors and the degeneracy partition of the support.
struct SpectralData {
  RealVector eigenvalues;
  Matrix eigenvectors;
  Eigen::Index rank = 0;
  Matrix support_projector;
  Matrix kernel_projector;
  std::vector<std::vector<Eigen::Index>> degeneracy_groups;
  double degeneracy_threshold = 0.0;  // absolute |q_k - q_l| cutoff used

  Eigen::Index dim() const { return eigenvectors.rows(); }
  Matrix support() const { return eigenvectors.leftCols(rank); }
  RealVector support_eigenvalues() const { return eigenvalues.head(rank); }

  const std::vector<Eigen::Index>& group_of(Eigen::Index n) const {
    for (const auto& g : degeneracy_groups) {
      for (Eigen::Index m : g) {
        if (m == n) return g;
      }
    }
    throw Error(Errc::IndexOutOfRange,
                "eigenvector " + std::to_string(n) + " is not in the support");
  }

  Matrix group_projector(Eigen::Index n) const {
    Matrix p = Matrix::Zero(dim(), dim());
    for (Eigen::Index m : group_of(n)) {
      p += outer(eigenvectors.col(m), eigenvectors.col(m));
    }
    return p;
  }
};

namespace detail {

// Partition the first `count` descending eigenvalues into runs whose members
// lie within `threshold` of the run's first element.
inline std::vector<std::vector<Eigen::Index>> group_close(
    const RealVector& values, Eigen::Index count, double threshold) {
  std::vector<std::vector<Eigen::Index>> groups;
  for (Eigen::Index n = 0; n < count; ++n) {
    if (!groups.empty() &&
        std::abs(values(groups.back().front()) - values(n)) < threshold) {
      groups.back().push_back(n);
    } else {
      groups.push_back({n});
    }
  }
  return groups;
}

}  // namespace detail

inline SpectralData spectral_of(const Matrix& rho, SpectralOptions opts = {}) {
  Spectrum s = eig_hermitian(rho);
  SpectralData out;
  out.eigenvalues = s.values;
  out.eigenvectors = s.vectors;
  out.rank = numerical_rank(s.values, opts.rank_tol);
  Matrix v = out.support();
  out.support_projector = v * v.adjoint();
  out.kernel_projector = identity(rho.rows()) - out.support_projector;
  double top = s.values.size() > 0 ? std::max(0.0, s.values(0)) : 0.0;
  out.degeneracy_threshold = opts.deg_tol * top;
  out.degeneracy_groups =
      detail::group_close(s.values, out.rank, out.degeneracy_threshold);
  return out;
}

inline SpectralData spectral_at(const ParametricState& s, ParamSpan x,
                                SpectralOptions opts = {}) {
  return spectral_of(density_at(s, x), opts);
}

inline SpectralData spectral_at(const ParametricState& s, double x,
                                SpectralOptions opts = {}) {
  return spectral_at(s, ParamSpan(&x, 1), opts);
}

struct RankScan {
  Eigen::Index global_rank = 0;
  /// Grid points whose local rank is below the global rank.
  std::vector<double> deficient_points;
};

/// Global rank of a single-parameter family: the maximum local rank on the
/// grid, with the grid points where the rank drops reported.
inline RankScan global_rank_scan(const ParametricState& s,
                                 std::span<const double> grid,
                                 double rank_tol = kRankTol) {
  if (grid.empty()) {
    throw Error(Errc::DimensionMismatch, "global_rank_scan needs a grid");
  }
  std::vector<Eigen::Index> local;
  local.reserve(grid.size());
  RankScan out;
  for (double x : grid) {
    Eigen::Index r = spectral_at(s, x, {rank_tol, 1e-8}).rank;
    local.push_back(r);
    out.global_rank = std::max(out.global_rank, r);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (local[i] < out.global_rank) out.deficient_points.push_back(grid[i]);
  }
  return out;
}

enum class EigvecDerivative { FiniteDifference, Perturbative };

namespace detail {

// Rotate `moved` inside its column span to best match `reference`
// (orthogonal Procrustes).
inline Matrix procrustes_align(const Matrix& moved, const Matrix& reference) {
  Matrix overlap = moved.adjoint() * reference;
  Eigen::JacobiSVD<Matrix> svd(overlap,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  return moved * (svd.matrixU() * svd.matrixV().adjoint());
}

}  // namespace detail

/// Columns d phi_n / d x_param for the support eigenvectors n < rank.
///
/// FiniteDifference differentiates the eigenvectors at x +- h after aligning
/// them with the reference eigenvectors; near-degenerate clusters (gap below
/// 1e-6) are aligned as a block, so the within-cluster gauge does not blow
/// up. Perturbative uses first-order perturbation theory on d rho, which
/// leaves the within-group component at zero.
inline Matrix eigenvector_derivatives(
    const ParametricState& s, ParamSpan x, const SpectralData& sd,
    std::size_t param = 0,
    EigvecDerivative mode = EigvecDerivative::FiniteDifference) {
  require_params(s, x);
  const Eigen::Index r = sd.rank;
  const Eigen::Index d = sd.dim();
  Matrix out = Matrix::Zero(d, r);
  if (r == 0) return out;

  if (mode == EigvecDerivative::Perturbative) {
    Matrix drho = derivative_at(s, x, param);
    Matrix in_eigenbasis = sd.eigenvectors.adjoint() * drho * sd.eigenvectors;
    for (Eigen::Index n = 0; n < r; ++n) {
      const auto& group = sd.group_of(n);
      for (Eigen::Index m = 0; m < d; ++m) {
        if (std::find(group.begin(), group.end(), m) != group.end()) continue;
        double gap = sd.eigenvalues(n) - (m < r ? sd.eigenvalues(m) : 0.0);
        out.col(n) += sd.eigenvectors.col(m) * (in_eigenbasis(m, n) / gap);
      }
    }
    return out;
  }

  double h = s.finite_difference().step_at(x[param]);
  Params xp = detail::shifted(x, param, h);
  Params xm = detail::shifted(x, param, -h);
  if (!s.in_domain(xp) || !s.in_domain(xm)) {
    throw Error(Errc::DomainEdge,
                "finite-difference stencil leaves the parameter domain");
  }
  Spectrum plus = eig_hermitian(density_at(s, xp));
  Spectrum minus = eig_hermitian(density_at(s, xm));
  double cluster = std::max(sd.degeneracy_threshold, 1e-6);
  for (const auto& group : detail::group_close(sd.eigenvalues, r, cluster)) {
    Eigen::Index first = group.front();
    Eigen::Index width = static_cast<Eigen::Index>(group.size());
    Matrix ref = sd.eigenvectors.middleCols(first, width);
    Matrix vp = detail::procrustes_align(plus.vectors.middleCols(first, width),
                                         ref);
    Matrix vm = detail::procrustes_align(
        minus.vectors.middleCols(first, width), ref);
    out.middleCols(first, width) = (vp - vm) / (2.0 * h);
  }
  return out;
}

/// Generalized covariant derivative |D phi_n> = |d phi_n> - Pi_n |d phi_n>,
/// where Pi_n projects onto the degenerate eigenspace of q_n. For a
/// non-degenerate q_n this is the usual |d phi> - |phi><phi|d phi>.
inline Vector gen_cov_derivative(const SpectralData& sd, const Vector& dphi,
                                 Eigen::Index n) {
  if (n < 0 || n >= sd.rank) {
    throw Error(Errc::IndexOutOfRange,
                "index " + std::to_string(n) + " outside support of rank " +
                    std::to_string(sd.rank));
  }
  if (dphi.size() != sd.dim()) {
    throw Error(Errc::DimensionMismatch, "derivative column dimension");
  }
  Vector out = dphi;
  for (Eigen::Index m : sd.group_of(n)) {
    const auto phi = sd.eigenvectors.col(m);
    out -= phi * phi.dot(dphi);
  }
  return out;
}

/// All |D phi_n> as columns.
inline Matrix covariant_derivatives(const SpectralData& sd,
                                    const Matrix& derivatives) {
  if (derivatives.cols() != sd.rank || derivatives.rows() != sd.dim()) {
    throw Error(Errc::DimensionMismatch,
                "expected one derivative column per support eigenvector");
  }
  Matrix out(sd.dim(), sd.rank);
  for (Eigen::Index n = 0; n < sd.rank; ++n) {
    out.col(n) = gen_cov_derivative(sd, derivatives.col(n), n);
  }
  return out;
}

/// Projector onto span{Pi_k |D phi_n>}: the tangent space inside the
/// kernel. Directions with norm below abs_floor are finite-difference noise
/// and are dropped.
inline Matrix tangent_projector(
    const ParametricState& s, ParamSpan x, const SpectralData& sd,
    std::size_t param = 0,
    EigvecDerivative mode = EigvecDerivative::FiniteDifference,
    double abs_floor = 1e-7) {
  Matrix cov =
      covariant_derivatives(sd, eigenvector_derivatives(s, x, sd, param, mode));
  return span_projector(sd.kernel_projector * cov, kRankTol, abs_floor);
}

inline Matrix tangent_projector(const ParametricState& s, double x,
                                const SpectralData& sd) {
  return tangent_projector(s, ParamSpan(&x, 1), sd);
}

/// rho = sum_n p_n |psi_n><psi_n| with strictly positive weights and
/// normalized, linearly independent (not necessarily orthogonal) vectors.
struct ConvexDecomposition {
  RealVector weights;
  Matrix vectors;  // one column per term

  Matrix density() const {
    return vectors * weights.cast<cplx>().asDiagonal() * vectors.adjoint();
  }

  /// Throws BadDecomposition unless the decomposition is well formed and
  /// reconstructs rho within tol.
  void validate(const Matrix& rho, double tol = 1e-9) const {
    if (weights.size() != vectors.cols() || weights.size() == 0 ||
        vectors.rows() != rho.rows()) {
      throw Error(Errc::BadDecomposition, "shape mismatch");
    }
    if (weights.minCoeff() <= 0.0) {
      throw Error(Errc::BadDecomposition, "weights must be strictly positive");
    }
    if (std::abs(weights.sum() - 1.0) > tol) {
      throw Error(Errc::BadDecomposition, "weights do not sum to one");
    }
    for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
      if (std::abs(vectors.col(k).norm() - 1.0) > tol) {
        throw Error(Errc::BadDecomposition, "vectors must be normalized");
      }
    }
    Eigen::JacobiSVD<Matrix> svd(vectors);
    const RealVector& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= kRankTol * sv(0)) {
      throw Error(Errc::BadDecomposition, "vectors are linearly dependent");
    }
    double err = (density() - rho).norm();
    if (err > tol) {
      throw Error(Errc::BadDecomposition,
                  "reconstruction error " + std::to_string(err));
    }
  }
};

using ConvexDecompositionFamily =
    std::function<ConvexDecomposition(ParamSpan)>;

/// The spectral decomposition {q_n, phi_n}_{n < rank} as a family in x.
inline ConvexDecompositionFamily spectral_decomposition_family(
    const ParametricState& s, SpectralOptions opts = {}) {
  return [s, opts](ParamSpan x) {
    SpectralData sd = spectral_at(s, x, opts);
    return ConvexDecomposition{sd.support_eigenvalues(), sd.support()};
  };
}

}  // namespace qps

#endif  // QPS_STATE_HPP_
