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
#ifndef QPS_QFI_HPP_
#define QPS_QFI_HPP_

// Quantum and classical Fisher information.

#include <cmath>
#include <string>
#include <vector>

#include "qps/linalg.hpp"
#include "qps/povm.hpp"
#include "qps/state.hpp"

namespace qps {

/// Symmetric logarithmic derivative: the Hermitian L with
/// d rho = (L rho + rho L) / 2 on the support of rho. In rho's eigenbasis
/// L_kl = 2 (d rho)_kl / (q_k + q_l); blocks with q_k + q_l at or below
/// rank_tol * q_max are set to zero.
inline Matrix sld_general(const Matrix& rho, const Matrix& drho,
                          double rank_tol = kRankTol) {
  require_same_shape(rho, drho, "sld_general");
  if (hermiticity_defect(drho) > 1e-10 * std::max(1.0, drho.norm())) {
    throw Error(Errc::NonHermitianInput, "d rho is not Hermitian");
  }
  Spectrum s = eig_hermitian(rho);
  RealVector q = s.values.cwiseMax(0.0);
  double cutoff = rank_tol * std::max(q(0), 0.0);
  Matrix d = s.vectors.adjoint() * drho * s.vectors;
  Matrix l = Matrix::Zero(d.rows(), d.cols());
  for (Eigen::Index k = 0; k < d.rows(); ++k) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      double denom = q(k) + q(j);
      if (denom > cutoff && denom > 0.0) l(k, j) = 2.0 * d(k, j) / denom;
    }
  }
  return hermitian_part(s.vectors * l * s.vectors.adjoint());
}

/// Tr[rho L^2]. Values in [-1e-12, 0) are clamped to zero.
inline double qfi_from_sld(const Matrix& rho, const Matrix& sld) {
  require_same_shape(rho, sld, "qfi_from_sld");
  double value = (rho * sld * sld).trace().real();
  if (value < -1e-12) {
    throw Error(Errc::InvalidState,
                "negative quantum Fisher information " + std::to_string(value));
  }
  return std::max(value, 0.0);
}

inline double qfi(const Matrix& rho, const Matrix& drho,
                  double rank_tol = kRankTol) {
  return qfi_from_sld(rho, sld_general(rho, drho, rank_tol));
}

/// QFI of a pure state: 4 (<d psi|d psi> - |<psi|d psi>|^2).
inline double qfi_pure(const Vector& psi, const Vector& dpsi) {
  cplx overlap = psi.dot(dpsi);
  return 4.0 * (dpsi.squaredNorm() - std::norm(overlap));
}

/// Classical Fisher information (dp)^2 / p of one outcome.
inline double cfi_outcome(double p, double dp) {
  if (!(p > 1e-300)) {
    throw Error(Errc::ZeroProbability,
                "outcome probability " + std::to_string(p));
  }
  return dp * dp / p;
}

/// max_{k,l < rank} |<D phi_k | phi_l>|
inline double gencoder_residual(const SpectralData& sd, const Matrix& cov) {
  if (sd.rank == 0) return 0.0;
  return (cov.adjoint() * sd.support()).cwiseAbs().maxCoeff();
}

namespace detail {

inline Matrix covariant_checked(const SpectralData& sd,
                                const Matrix& derivatives, double tol) {
  Matrix cov = covariant_derivatives(sd, derivatives);
  double residual = gencoder_residual(sd, cov);
  if (!(residual < tol)) {
    throw Error(Errc::NotQuasiPure,
                "covariant-derivative residual " + std::to_string(residual));
  }
  return cov;
}

inline void require_quasi_pure_block(const SpectralData& sd,
                                     const Matrix& drho, double tol) {
  double residual =
      (sd.support_projector * drho * sd.support_projector).norm();
  if (!(residual < tol)) {
    throw Error(Errc::NotQuasiPure,
                "||Pi_r d rho Pi_r||_F = " + std::to_string(residual));
  }
}

inline Matrix sld_from_covariant(const SpectralData& sd, const Matrix& cov) {
  Matrix l = Matrix::Zero(sd.dim(), sd.dim());
  for (Eigen::Index n = 0; n < sd.rank; ++n) {
    l += outer(cov.col(n), sd.eigenvectors.col(n));
  }
  return 2.0 * (l + l.adjoint());
}

inline double qfi_from_covariant(const SpectralData& sd, const Matrix& cov) {
  double total = 0.0;
  for (Eigen::Index n = 0; n < sd.rank; ++n) {
    total += sd.eigenvalues(n) * cov.col(n).squaredNorm();
  }
  return 4.0 * total;
}

}  // namespace detail

/// Closed-form SLD of a quasi-pure state,
/// L = 2 sum_n (|D phi_n><phi_n| + |phi_n><D phi_n|).
/// This overload can only check the covariant-derivative orthogonality, so
/// eigenvalue drift goes unnoticed; pass d rho to check the full condition.
inline Matrix sld_quasipure(const SpectralData& sd, const Matrix& derivatives,
                            double tol = 1e-8) {
  return detail::sld_from_covariant(
      sd, detail::covariant_checked(sd, derivatives, tol));
}

inline Matrix sld_quasipure(const SpectralData& sd, const Matrix& derivatives,
                            const Matrix& drho, double tol = 1e-8) {
  detail::require_quasi_pure_block(sd, drho, tol);
  return sld_quasipure(sd, derivatives, tol);
}

/// 4 sum_n q_n <D phi_n|D phi_n>
inline double qfi_quasipure(const SpectralData& sd, const Matrix& derivatives,
                            double tol = 1e-8) {
  return detail::qfi_from_covariant(
      sd, detail::covariant_checked(sd, derivatives, tol));
}

inline double qfi_quasipure(const SpectralData& sd, const Matrix& derivatives,
                            const Matrix& drho, double tol = 1e-8) {
  detail::require_quasi_pure_block(sd, drho, tol);
  return qfi_quasipure(sd, derivatives, tol);
}

struct OutcomeFisher {
  std::string id;
  bool kept = true;
  double probability = 0.0;
  double cfi = 0.0;
  double post_qfi = 0.0;
  /// p < 1e-12: contributes nothing to the totals.
  bool negligible = false;
};

struct QfiReport {
  Matrix sld;
  double qfi = 0.0;
  std::vector<OutcomeFisher> per_outcome;
  /// sum_omega (cfi + p * post_qfi)
  double total_ensemble_qfi = 0.0;
  /// sum over kept outcomes of p * post_qfi
  double kept_post_qfi = 0.0;
};

/// Post-measurement state sigma(x|omega) for a measurement operator frozen
/// at its construction point.
inline MeasuredState measured_at(const ParametricState& s, ParamSpan x,
                                 const Matrix& m) {
  return apply_measurement(m, density_at(s, x));
}

/// d sigma(x|omega) / dx at fixed M, by central difference with the state's
/// step.
inline Matrix measured_derivative(const ParametricState& s, ParamSpan x,
                                  const Matrix& m, std::size_t param = 0) {
  const FiniteDifference& fd = s.finite_difference();
  auto estimate = [&](double h) {
    Params xp = detail::shifted(x, param, h);
    Params xm = detail::shifted(x, param, -h);
    if (!s.in_domain(xp) || !s.in_domain(xm)) {
      throw Error(Errc::DomainEdge,
                  "finite-difference stencil leaves the parameter domain");
    }
    return Matrix((measured_at(s, xp, m).sigma - measured_at(s, xm, m).sigma) /
                  (2.0 * h));
  };
  double h = fd.step_at(x[param]);
  Matrix d = estimate(h);
  if (fd.richardson) d = (4.0 * estimate(0.5 * h) - d) / 3.0;
  return hermitian_part(d);
}

/// Decomposes the information after measuring `povm` into per-outcome
/// classical and post-measurement quantum parts.
inline QfiReport ensemble_decomposition(const ParametricState& s, ParamSpan x,
                                        const Povm& povm,
                                        std::size_t param = 0) {
  validate_povm(povm);
  if (povm.dim() != s.dim()) {
    throw Error(Errc::InvalidPovm, "POVM dimension differs from the state");
  }
  QfiReport report;
  Matrix rho = density_at(s, x);
  Matrix drho = derivative_at(s, x, param);
  report.sld = sld_general(rho, drho);
  report.qfi = qfi_from_sld(rho, report.sld);

  for (const auto& e : povm.elements) {
    OutcomeFisher out;
    out.id = e.id;
    out.kept = e.kept;
    out.probability = std::max(0.0, (rho * e.effect).trace().real());
    if (out.probability < 1e-12) {
      out.negligible = true;
      report.per_outcome.push_back(out);
      continue;
    }
    double dp = (drho * e.effect).trace().real();
    out.cfi = cfi_outcome(out.probability, dp);
    Matrix m = measurement_from_povm(e.effect).m;
    Matrix sigma = apply_measurement(m, rho).sigma;
    Matrix dsigma = measured_derivative(s, x, m, param);
    out.post_qfi = qfi(sigma, dsigma);
    report.total_ensemble_qfi += out.cfi + out.probability * out.post_qfi;
    if (out.kept) report.kept_post_qfi += out.probability * out.post_qfi;
    report.per_outcome.push_back(out);
  }
  return report;
}

/// sum_n (I_cl[p_n] + p_n I_Q[psi_n]) - I_Q[rho] for a decomposition family,
/// all derivatives by central difference. Non-negative up to roundoff.
inline double convexity_gap(const ConvexDecompositionFamily& family,
                            const ParametricState& s, ParamSpan x,
                            std::size_t param = 0) {
  double h = s.finite_difference().step_at(x[param]);
  Params xp = detail::shifted(x, param, h);
  Params xm = detail::shifted(x, param, -h);
  ConvexDecomposition mid = family(x);
  ConvexDecomposition plus = family(xp);
  ConvexDecomposition minus = family(xm);
  mid.validate(density_at(s, x));
  plus.validate(density_at(s, xp));
  minus.validate(density_at(s, xm));
  if (plus.weights.size() != mid.weights.size() ||
      minus.weights.size() != mid.weights.size()) {
    throw Error(Errc::BadDecomposition,
                "decomposition size changes across the stencil");
  }
  double bound = 0.0;
  for (Eigen::Index n = 0; n < mid.weights.size(); ++n) {
    double dp = (plus.weights(n) - minus.weights(n)) / (2.0 * h);
    Matrix dproj = (outer(plus.vectors.col(n), plus.vectors.col(n)) -
                    outer(minus.vectors.col(n), minus.vectors.col(n))) /
                   (2.0 * h);
    // Gauge-free pure-state QFI: 2 Tr[(dP)^2].
    double pure = 2.0 * dproj.squaredNorm();
    bound += cfi_outcome(mid.weights(n), dp) + mid.weights(n) * pure;
  }
  return bound - qfi(density_at(s, x), derivative_at(s, x, param));
}

/// max_{k,l} |<D_i phi_k|D_j phi_l> - <D_j phi_k|D_i phi_l>| for one
/// parameter pair, given the covariant-derivative columns of each.
inline double partial_comm_pair(const Matrix& cov_i, const Matrix& cov_j) {
  if (cov_i.cols() == 0) return 0.0;
  Matrix a = cov_i.adjoint() * cov_j;
  Matrix b = cov_j.adjoint() * cov_i;
  return (a - b).cwiseAbs().maxCoeff();
}

/// Partial-commutativity residual of a multi-parameter quasi-pure state,
/// maximized over all parameter pairs. derivatives[i] holds the eigenvector
/// derivative columns for parameter i.
inline double partial_comm_residual(const ParametricState& s, ParamSpan x,
                                    const SpectralData& sd,
                                    const std::vector<Matrix>& derivatives,
                                    double tol = 1e-8) {
  if (s.num_params() < 2 || derivatives.size() < 2) {
    throw Error(Errc::NeedTwoParams,
                "partial commutativity needs at least two parameters");
  }
  if (derivatives.size() != s.num_params()) {
    throw Error(Errc::DimensionMismatch, "one derivative set per parameter");
  }
  std::vector<Matrix> cov;
  for (std::size_t i = 0; i < derivatives.size(); ++i) {
    detail::require_quasi_pure_block(sd, derivative_at(s, x, i), tol);
    cov.push_back(covariant_derivatives(sd, derivatives[i]));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < cov.size(); ++i) {
    for (std::size_t j = i + 1; j < cov.size(); ++j) {
      worst = std::max(worst, partial_comm_pair(cov[i], cov[j]));
    }
  }
  return worst;
}

inline double partial_comm_residual(
    const ParametricState& s, ParamSpan x, SpectralOptions opts = {},
    EigvecDerivative mode = EigvecDerivative::FiniteDifference) {
  if (s.num_params() < 2) {
    throw Error(Errc::NeedTwoParams,
                "partial commutativity needs at least two parameters");
  }
  SpectralData sd = spectral_at(s, x, opts);
  std::vector<Matrix> derivatives;
  for (std::size_t i = 0; i < s.num_params(); ++i) {
    derivatives.push_back(eigenvector_derivatives(s, x, sd, i, mode));
  }
  return partial_comm_residual(s, x, sd, derivatives);
}

}  // namespace qps

#endif  // QPS_QFI_HPP_
