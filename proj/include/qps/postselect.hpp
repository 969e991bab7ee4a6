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
#ifndef QPS_POSTSELECT_HPP_
#define QPS_POSTSELECT_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "qps/povm.hpp"
#include "qps/qfi.hpp"
#include "qps/state.hpp"

namespace qps {

enum class NormKind { Frobenius, Spectral };

inline double matrix_norm(const Matrix& a, NormKind kind) {
  return kind == NormKind::Frobenius ? frobenius_norm(a) : spectral_norm(a);
}

/// Support and tangent projectors fixed at the prior-knowledge point x_star.
struct PostselectionFrame {
  Params x_star;
  Matrix support;
  Matrix tangent;
};

/// Frame built from the state itself: Pi_r from the spectrum at x_star and
/// Pi_t from the covariant derivatives of the support eigenvectors.
inline PostselectionFrame tangent_frame(
    const ParametricState& s, ParamSpan x_star, SpectralOptions opts = {},
    EigvecDerivative mode = EigvecDerivative::FiniteDifference) {
  SpectralData sd = spectral_at(s, x_star, opts);
  PostselectionFrame frame;
  frame.x_star.assign(x_star.begin(), x_star.end());
  frame.support = sd.support_projector;
  frame.tangent = tangent_projector(s, x_star, sd, 0, mode);
  return frame;
}

inline PostselectionFrame tangent_frame(const ParametricState& s,
                                        double x_star,
                                        SpectralOptions opts = {}) {
  return tangent_frame(s, ParamSpan(&x_star, 1), opts);
}

inline Povm tangent_binary_povm(const PostselectionFrame& frame,
                                double lambda) {
  PovmRequest req;
  req.mode = PovmMode::TangentBinary;
  req.support = frame.support;
  req.auxiliary = frame.tangent;
  req.lambdas = {lambda};
  req.x_star = frame.x_star;
  return build_povm(req);
}

struct PostselectionReport {
  double p_success = 0.0;
  Matrix sigma;
  Matrix dsigma;
  double eps0 = 0.0;  // ||sigma - rho||
  double eps1 = 0.0;  // ||d sigma - d rho / sqrt(lambda)||
  double qfi_rho = 0.0;
  double qfi_post = 0.0;
  double amplification_ratio = 0.0;  // lambda * qfi_post / qfi_rho
  NormKind norm_kind = NormKind::Frobenius;
};

/// Binary postselection with M = Pi_t + sqrt(lambda) Pi_r frozen at the
/// frame's x_star, evaluated at the true parameter x.
inline PostselectionReport postselection_report(const ParametricState& s,
                                                ParamSpan x,
                                                const PostselectionFrame& frame,
                                                double lambda,
                                                NormKind norm_kind) {
  Povm povm = tangent_binary_povm(frame, lambda);
  Matrix m = measurement_from_povm(povm.elements.front().effect).m;
  Matrix rho = density_at(s, x);
  Matrix drho = derivative_at(s, x, 0);

  PostselectionReport out;
  out.norm_kind = norm_kind;
  MeasuredState measured = apply_measurement(m, rho);
  out.p_success = measured.probability;
  out.sigma = measured.sigma;
  out.dsigma = measured_derivative(s, x, m, 0);
  out.eps0 = matrix_norm(out.sigma - rho, norm_kind);
  out.eps1 = matrix_norm(out.dsigma - drho / std::sqrt(lambda), norm_kind);
  out.qfi_rho = qfi(rho, drho);
  out.qfi_post = qfi(out.sigma, out.dsigma);
  out.amplification_ratio =
      out.qfi_rho > 0.0 ? lambda * out.qfi_post / out.qfi_rho : 0.0;
  return out;
}

inline PostselectionReport postselection_report(const ParametricState& s,
                                                double x,
                                                const PostselectionFrame& frame,
                                                double lambda,
                                                NormKind norm_kind) {
  return postselection_report(s, ParamSpan(&x, 1), frame, lambda, norm_kind);
}

struct SaturationThreshold {
  double critical_photon_number = 0.0;  // N_cr = T * gamma
  double lambda_max = 1.0;              // min(1, T * gamma / N)
  bool advantageous = false;            // N > N_cr
};

/// Detector-saturation threshold for N photons collected over duration T
/// with detection rate gamma.
inline SaturationThreshold saturation_threshold(double photons,
                                                double duration,
                                                double rate) {
  if (!(photons > 0.0 && duration > 0.0 && rate > 0.0)) {
    throw Error(Errc::NonPositiveInput,
                "photon number, duration and rate must be positive");
  }
  SaturationThreshold out;
  out.critical_photon_number = duration * rate;
  out.lambda_max = std::min(1.0, out.critical_photon_number / photons);
  out.advantageous = photons > out.critical_photon_number;
  return out;
}

}  // namespace qps

#endif  // QPS_POSTSELECT_HPP_
