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

// Walks through the two-qubit example: QFI, quasi-purity, the tangent-space
// POVM and the amplified post-selected QFI.

#include <cstdio>

#include "qps/qps.hpp"

int main() {
  const double q1 = 0.3;
  const double x = 0.2;
  const double lambda = 1e-4;

  qps::ParametricState state = qps::two_qubit_state(q1);
  qps::Matrix rho = qps::density_at(state, x);
  qps::Matrix drho = qps::derivative_at(state, x);
  std::printf("QFI                    %.10f\n", qps::qfi(rho, drho));
  std::printf("||Pi_r d rho Pi_r||    %.3e\n", qps::residual_spectral(state, x));

  qps::PostselectionFrame frame = qps::tangent_frame(state, x);
  qps::PostselectionReport rep =
      qps::postselection_report(state, x, frame, lambda, qps::NormKind::Spectral);
  std::printf("success probability    %.6e\n", rep.p_success);
  std::printf("post-selected QFI      %.4f\n", rep.qfi_post);
  std::printf("lambda * QFI_post / QFI %.8f\n", rep.amplification_ratio);
  return 0;
}
