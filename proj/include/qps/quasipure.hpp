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
#ifndef QPS_QUASIPURE_HPP_
#define QPS_QUASIPURE_HPP_

// Quasi-purity: Pi_r d rho Pi_r = 0, tested through four equivalent routes.
//
//   spectral   ||Pi_r d rho Pi_r||_F
//   eigen      every d q_n = 0, and each pair (k, l) is degenerate or has
//              <d phi_k|phi_l> = 0
//   gencoder   every d q_n = 0 and <D phi_k|phi_l> = 0 for all k, l
//   convex     <psi_k|d rho|psi_l> = 0 for a convex decomposition {psi_k}
//
// The eigen and gencoder routes differentiate eigenvalues and eigenvectors by
// central difference, independently of d rho, so the routes are genuinely
// separate numerical paths.

#include <optional>
#include <vector>

#include "qps/qfi.hpp"
#include "qps/state.hpp"

namespace qps {

struct QuasiPureTolerances {
  double quasi_pure = 1e-8;  // spectral residual and drift threshold
  double deg_tol = 1e-8;     // |q_k - q_l| below this counts as degenerate
  double ortho_tol = 1e-8;   // |<d phi_k|phi_l>| below this counts as zero
  double rank_tol = kRankTol;
};

inline double residual_spectral(const ParametricState& s, ParamSpan x,
                                std::size_t param = 0,
                                double rank_tol = kRankTol) {
  SpectralData sd = spectral_at(s, x, {rank_tol, 1e-8});
  Matrix drho = derivative_at(s, x, param);
  return (sd.support_projector * drho * sd.support_projector).norm();
}

inline double residual_spectral(const ParametricState& s, double x,
                                double rank_tol = kRankTol) {
  return residual_spectral(s, ParamSpan(&x, 1), 0, rank_tol);
}

struct PairCheck {
  Eigen::Index k = 0;
  Eigen::Index l = 0;
  double eigen_gap = 0.0;  // |q_k - q_l|
  double overlap = 0.0;    // |<d phi_k|phi_l>|
  bool passes = false;
};

struct QuasiPureReport {
  double residual_spectral = 0.0;
  double eigenvalue_drift = 0.0;  // max_n |d q_n|
  std::vector<PairCheck> pairwise;
  double gencoder_residual = 0.0;
  std::optional<double> convex_residual;

  bool verdict = false;  // residual_spectral < tolerance
  bool eigen_verdict = false;
  bool gencoder_verdict = false;
  std::optional<bool> convex_verdict;
  QuasiPureTolerances tolerances;

  bool criteria_agree() const {
    bool agree = verdict == eigen_verdict && verdict == gencoder_verdict;
    if (convex_verdict) agree = agree && *convex_verdict == verdict;
    return agree;
  }
};

/// Evaluates all quasi-purity criteria at x for parameter `param`. The
/// convex criterion is evaluated only when a decomposition is supplied; it
/// must reconstruct rho(x).
inline QuasiPureReport criteria_report(
    const ParametricState& s, ParamSpan x,
    const std::optional<ConvexDecomposition>& decomposition = std::nullopt,
    QuasiPureTolerances tols = {}, std::size_t param = 0) {
  QuasiPureReport report;
  report.tolerances = tols;
  Matrix rho = density_at(s, x);
  Matrix drho = derivative_at(s, x, param);
  SpectralData sd = spectral_of(rho, {tols.rank_tol, tols.deg_tol});
  const Eigen::Index r = sd.rank;

  report.residual_spectral =
      (sd.support_projector * drho * sd.support_projector).norm();
  report.verdict = report.residual_spectral < tols.quasi_pure;

  // Eigenvalue drift by central difference of the sorted spectrum.
  double h = s.finite_difference().step_at(x[param]);
  RealVector qp = eig_hermitian(density_at(s, detail::shifted(x, param, h))).values;
  RealVector qm = eig_hermitian(density_at(s, detail::shifted(x, param, -h))).values;
  for (Eigen::Index n = 0; n < r; ++n) {
    report.eigenvalue_drift =
        std::max(report.eigenvalue_drift, std::abs(qp(n) - qm(n)) / (2.0 * h));
  }
  const bool no_drift = report.eigenvalue_drift < tols.quasi_pure;

  Matrix derivs = eigenvector_derivatives(s, x, sd, param);
  Matrix overlaps = derivs.adjoint() * sd.support();  // <d phi_k|phi_l>
  bool pairs_pass = true;
  for (Eigen::Index k = 0; k < r; ++k) {
    for (Eigen::Index l = 0; l < r; ++l) {
      if (k == l) continue;
      PairCheck pc;
      pc.k = k;
      pc.l = l;
      pc.eigen_gap = std::abs(sd.eigenvalues(k) - sd.eigenvalues(l));
      pc.overlap = std::abs(overlaps(k, l));
      pc.passes = pc.eigen_gap < tols.deg_tol || pc.overlap < tols.ortho_tol;
      pairs_pass = pairs_pass && pc.passes;
      report.pairwise.push_back(pc);
    }
  }
  report.eigen_verdict = no_drift && pairs_pass;

  Matrix cov = covariant_derivatives(sd, derivs);
  report.gencoder_residual = gencoder_residual(sd, cov);
  report.gencoder_verdict =
      no_drift && report.gencoder_residual < tols.ortho_tol;

  if (decomposition) {
    decomposition->validate(rho);
    const Matrix& v = decomposition->vectors;
    double worst = (v.adjoint() * drho * v).cwiseAbs().maxCoeff();
    report.convex_residual = worst;
    report.convex_verdict = worst < tols.quasi_pure;
  }
  return report;
}

inline QuasiPureReport criteria_report(
    const ParametricState& s, double x,
    const std::optional<ConvexDecomposition>& decomposition = std::nullopt,
    QuasiPureTolerances tols = {}) {
  return criteria_report(s, ParamSpan(&x, 1), decomposition, tols, 0);
}

}  // namespace qps

#endif  // QPS_QUASIPURE_HPP_
