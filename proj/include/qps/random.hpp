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
#ifndef QPS_RANDOM_HPP_
#define QPS_RANDOM_HPP_

// Seeded random instances for property checks. Every generator takes the
// engine by reference; nothing here keeps global state.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qps/apps.hpp"
#include "qps/povm.hpp"
#include "qps/state.hpp"

namespace qps {

using Rng = std::mt19937_64;

inline Matrix random_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      double re = normal(rng);
      double im = normal(rng);
      a(i, j) = cplx(re, im);
    }
  }
  return a;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phases of R's
/// diagonal divided out).
inline Matrix random_unitary(Eigen::Index dim, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_ginibre(dim, dim, rng));
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

inline Matrix random_hermitian(Eigen::Index dim, Rng& rng) {
  Matrix a = random_ginibre(dim, dim, rng);
  return 0.5 * (a + a.adjoint());
}

/// Uniform point on the open probability simplex, sorted descending.
inline RealVector random_probabilities(Eigen::Index count, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  RealVector p(count);
  for (Eigen::Index i = 0; i < count; ++i) p(i) = expo(rng) + 1e-3;
  p /= p.sum();
  std::sort(p.data(), p.data() + count, std::greater<>());
  return p;
}

/// Random density matrix of the given rank with non-degenerate spectrum.
inline Matrix random_density(Eigen::Index dim, Eigen::Index rank, Rng& rng) {
  Matrix v = random_unitary(dim, rng).leftCols(rank);
  RealVector p = random_probabilities(rank, rng);
  return v * p.cast<cplx>().asDiagonal() * v.adjoint();
}

/// Random POVM with `outcomes` full-rank effects: E_w = S^{-1/2} A_w S^{-1/2}
/// with A_w = B_w B_w^dagger and S = sum_w A_w.
inline Povm random_povm(Eigen::Index dim, std::size_t outcomes, Rng& rng) {
  std::vector<Matrix> raw;
  Matrix total = Matrix::Zero(dim, dim);
  for (std::size_t w = 0; w < outcomes; ++w) {
    Matrix b = random_ginibre(dim, dim, rng);
    raw.push_back(b * b.adjoint());
    total += raw.back();
  }
  Matrix inv_root =
      apply_spectral_function(eig_hermitian(hermitian_part(total)),
                              [](double v) { return 1.0 / std::sqrt(v); });
  Povm povm;
  for (std::size_t w = 0; w < outcomes; ++w) {
    PovmElement e;
    e.id = "w" + std::to_string(w);
    e.effect = hermitian_part(inv_root * raw[w] * inv_root);
    e.kept = w == 0;
    povm.elements.push_back(e);
  }
  // Absorb the remaining roundoff into the last effect.
  Matrix sum = Matrix::Zero(dim, dim);
  for (std::size_t w = 0; w + 1 < outcomes; ++w) sum += povm.elements[w].effect;
  povm.elements.back().effect = hermitian_part(identity(dim) - sum);
  return povm;
}

/// Random orthogonal projector of the given rank.
inline Matrix random_projector(Eigen::Index dim, Eigen::Index rank, Rng& rng) {
  Matrix v = random_unitary(dim, rng).leftCols(rank);
  return v * v.adjoint();
}

/// Full-rank family whose eigenvalues and eigenvectors both move:
/// rho(x) = W(x) diag(softmax(a + b x)) W(x)^dagger, W(x) = exp(-i G x) V.
/// Generically not quasi-pure.
inline ParametricState random_mixed_family(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RealVector a(dim), b(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    a(i) = normal(rng);
    b(i) = normal(rng);
  }
  Matrix g = random_hermitian(dim, rng);
  Matrix v = random_unitary(dim, rng);
  auto rho = [a, b, g, v](ParamSpan x) -> Matrix {
    RealVector logits = a + b * x[0];
    RealVector w = (logits.array() - logits.maxCoeff()).exp();
    w /= w.sum();
    Matrix u = expm_hermitian(g, x[0]) * v;
    return u * w.cast<cplx>().asDiagonal() * u.adjoint();
  };
  return ParametricState(dim, 1, rho);
}

/// U(x) rho_i U(x)^dagger with U(x) = exp(-i G x), random G and a random
/// rank-`rank` initial state.
inline ParametricState random_unitary_family(Eigen::Index dim,
                                             Eigen::Index rank, Rng& rng) {
  Matrix rho_i = random_density(dim, rank, rng);
  return unitary_state(exponential_family(random_hermitian(dim, rng)), rho_i);
}

/// Ancilla protocol instance: random rank-`rank` state in dimension `dim`,
/// random generators (one per parameter, commuting when `commuting`), and an
/// ancilla of dimension `rank`.
inline ParametricState random_ancilla_family(Eigen::Index dim,
                                             Eigen::Index rank, Rng& rng,
                                             std::size_t num_params = 1,
                                             bool commuting = true) {
  Matrix rho_i = random_density(dim, rank, rng);
  std::vector<Matrix> gens;
  if (commuting) {
    Matrix w = random_unitary(dim, rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < num_params; ++i) {
      RealVector diag(dim);
      for (Eigen::Index k = 0; k < dim; ++k) diag(k) = normal(rng);
      gens.push_back(w * diag.cast<cplx>().asDiagonal() * w.adjoint());
    }
  } else {
    for (std::size_t i = 0; i < num_params; ++i) {
      gens.push_back(random_hermitian(dim, rng));
    }
  }
  return ancilla_state(rho_i, exponential_family(gens), rank);
}

}  // namespace qps

#endif  // QPS_RANDOM_HPP_
