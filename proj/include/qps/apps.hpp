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
#ifndef QPS_APPS_HPP_
#define QPS_APPS_HPP_

// Ready-made state families: two incoherent point sources imaged through a
// Gaussian point-spread function, unitary encoding of a mixed probe, and the
// ancilla-correlated version of the latter.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qps/postselect.hpp"
#include "qps/qfi.hpp"
#include "qps/state.hpp"

namespace qps {

// ---------------------------------------------------------------------------
// Two point sources in the Hermite-Gaussian basis.

struct SuperresConfig {
  double q = 0.3;           // relative intensity of the source at +x/2
  double sigma = 1.0;       // point-spread width
  Eigen::Index n_max = 30;  // number of Hermite-Gaussian modes kept
};

/// Hermite-Gaussian coefficients of the PSF displaced by `shift`:
/// c_n = exp(-a^2/2) a^n / sqrt(n!), a = shift / (2 sigma).
inline Vector displaced_gaussian(double shift, double sigma,
                                 Eigen::Index n_max) {
  double a = shift / (2.0 * sigma);
  Vector c(n_max);
  c(0) = std::exp(-0.5 * a * a);
  for (Eigen::Index n = 1; n < n_max; ++n) {
    c(n) = c(n - 1) * (a / std::sqrt(static_cast<double>(n)));
  }
  double tail = 1.0 - c.squaredNorm();
  if (tail > 1e-12) {
    throw Error(Errc::TruncationInsufficient,
                "tail mass " + std::to_string(tail) + " beyond " +
                    std::to_string(n_max) + " modes");
  }
  return c;
}

/// d/d shift of displaced_gaussian: (sqrt(n) c_{n-1} - a c_n) / (2 sigma).
inline Vector displaced_gaussian_derivative(double shift, double sigma,
                                            Eigen::Index n_max) {
  double a = shift / (2.0 * sigma);
  Vector c = displaced_gaussian(shift, sigma, n_max);
  Vector d(n_max);
  for (Eigen::Index n = 0; n < n_max; ++n) {
    cplx lower = n > 0 ? std::sqrt(static_cast<double>(n)) * c(n - 1) : 0.0;
    d(n) = (lower - a * c(n)) / (2.0 * sigma);
  }
  return d;
}

namespace detail {

inline void validate(const SuperresConfig& cfg) {
  if (!(cfg.q > 0.0 && cfg.q < 1.0)) {
    throw Error(Errc::InvalidConfig, "q must lie in (0, 1)");
  }
  if (!(cfg.sigma > 0.0)) {
    throw Error(Errc::NonPositiveInput, "sigma must be positive");
  }
  if (cfg.n_max < 2) {
    throw Error(Errc::DimensionTooSmall, "need at least two modes");
  }
}

}  // namespace detail

/// rho(x) = q |psi+><psi+| + (1-q) |psi-><psi-| with psi+- the PSF displaced
/// by +-x/2. Derivatives are analytic.
inline ParametricState superres_state(const SuperresConfig& cfg) {
  detail::validate(cfg);
  auto rho = [cfg](ParamSpan x) -> Matrix {
    Vector plus = displaced_gaussian(0.5 * x[0], cfg.sigma, cfg.n_max);
    Vector minus = displaced_gaussian(-0.5 * x[0], cfg.sigma, cfg.n_max);
    return cfg.q * outer(plus, plus) + (1.0 - cfg.q) * outer(minus, minus);
  };
  auto drho = [cfg](ParamSpan x, std::size_t) -> Matrix {
    Vector plus = displaced_gaussian(0.5 * x[0], cfg.sigma, cfg.n_max);
    Vector minus = displaced_gaussian(-0.5 * x[0], cfg.sigma, cfg.n_max);
    Vector dplus =
        0.5 * displaced_gaussian_derivative(0.5 * x[0], cfg.sigma, cfg.n_max);
    Vector dminus =
        -0.5 * displaced_gaussian_derivative(-0.5 * x[0], cfg.sigma, cfg.n_max);
    Matrix a = cfg.q * outer(dplus, plus) + (1.0 - cfg.q) * outer(dminus, minus);
    return a + a.adjoint();
  };
  return ParametricState(cfg.n_max, 1, rho).with_analytic_derivative(drho);
}

/// The defining two-term decomposition {q, psi+; 1-q, psi-}. Only valid for
/// x != 0, where psi+ and psi- are linearly independent.
inline ConvexDecompositionFamily superres_decomposition(
    const SuperresConfig& cfg) {
  detail::validate(cfg);
  return [cfg](ParamSpan x) {
    ConvexDecomposition dec;
    dec.weights = RealVector(2);
    dec.weights << cfg.q, 1.0 - cfg.q;
    dec.vectors = Matrix(cfg.n_max, 2);
    dec.vectors.col(0) = displaced_gaussian(0.5 * x[0], cfg.sigma, cfg.n_max);
    dec.vectors.col(1) = displaced_gaussian(-0.5 * x[0], cfg.sigma, cfg.n_max);
    dec.vectors.col(0).normalize();
    dec.vectors.col(1).normalize();
    return dec;
  };
}

/// Momentum operator in the Hermite-Gaussian basis:
/// <m|P|n> = (i / 2 sigma) (sqrt(n+1) delta_{m,n+1} - sqrt(n) delta_{m,n-1}).
inline Matrix momentum_matrix(double sigma, Eigen::Index n_max) {
  if (n_max < 2) throw Error(Errc::DimensionTooSmall, "need n_max >= 2");
  if (!(sigma > 0.0)) throw Error(Errc::NonPositiveInput, "sigma");
  Matrix p = Matrix::Zero(n_max, n_max);
  for (Eigen::Index n = 0; n + 1 < n_max; ++n) {
    double amp = std::sqrt(static_cast<double>(n + 1)) / (2.0 * sigma);
    p(n + 1, n) = kI * amp;
    p(n, n + 1) = -kI * amp;
  }
  return p;
}

struct SuperresTheory {
  double eps0 = 0.0;
  double eps1 = 0.0;
};

/// Leading-order (small x) postselection errors in the Frobenius norm for
/// the Rayleigh-limit POVM |HG1><HG1| + lambda |HG0><HG0|.
inline SuperresTheory superres_theory(double x, double q, double lambda,
                                      double sigma) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(Errc::LambdaOutOfRange,
                "lambda must lie in (0, 1), got " + std::to_string(lambda));
  }
  double sl = std::sqrt(lambda);
  SuperresTheory t;
  t.eps0 = std::abs(2.0 * q - 1.0) * (1.0 - sl) * x /
           (2.0 * std::sqrt(2.0) * sl * sigma);
  t.eps1 = std::sqrt(2.0 - 4.0 * sl + 3.0 * lambda) * x /
           (8.0 * lambda * sigma * sigma);
  return t;
}

/// Frame at the Rayleigh limit x_star -> 0: support |HG0>, tangent |HG1>.
inline PostselectionFrame superres_rayleigh_frame(const SuperresConfig& cfg) {
  detail::validate(cfg);
  PostselectionFrame frame;
  frame.x_star = {0.0};
  Vector e0 = basis_vector(cfg.n_max, 0);
  Vector e1 = basis_vector(cfg.n_max, 1);
  frame.support = outer(e0, e0);
  frame.tangent = outer(e1, e1);
  return frame;
}

/// |QFI(n_max) - QFI(2 n_max)| at x.
inline double superres_truncation_defect(const SuperresConfig& cfg, double x) {
  SuperresConfig doubled = cfg;
  doubled.n_max = 2 * cfg.n_max;
  ParametricState a = superres_state(cfg);
  ParametricState b = superres_state(doubled);
  return std::abs(qfi(density_at(a, x), derivative_at(a, x)) -
                  qfi(density_at(b, x), derivative_at(b, x)));
}

// ---------------------------------------------------------------------------
// Unitary encoding.

/// x -> U(x). When `generators` is non-empty the family is
/// exp(-i sum_i x_i G_i) with pairwise commuting G_i, which enables closed
/// form derivatives.
struct UnitaryFamily {
  Eigen::Index dim = 0;
  std::size_t num_params = 1;
  std::function<Matrix(ParamSpan)> unitary;
  std::vector<Matrix> generators;
};

/// exp(-i sum_i x_i G_i). Non-commuting generators are accepted, but then
/// derivatives fall back to central differences.
inline UnitaryFamily exponential_family(std::vector<Matrix> generators) {
  if (generators.empty()) {
    throw Error(Errc::DimensionMismatch, "need at least one generator");
  }
  const Eigen::Index dim = generators.front().rows();
  for (const auto& g : generators) {
    require_square(g, "generator");
    if (g.rows() != dim) throw Error(Errc::DimensionMismatch, "generator size");
    if (hermiticity_defect(g) > 1e-12 * std::max(1.0, g.norm())) {
      throw Error(Errc::NonHermitianInput, "generator must be Hermitian");
    }
  }
  bool commuting = true;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    for (std::size_t j = i + 1; j < generators.size(); ++j) {
      Matrix c = generators[i] * generators[j] - generators[j] * generators[i];
      commuting = commuting && c.norm() < 1e-12;
    }
  }
  UnitaryFamily f;
  f.dim = dim;
  f.num_params = generators.size();
  f.unitary = [generators](ParamSpan x) {
    Matrix total = Matrix::Zero(generators.front().rows(),
                                generators.front().cols());
    for (std::size_t i = 0; i < generators.size(); ++i) {
      total += x[i] * generators[i];
    }
    return expm_hermitian(total, 1.0);
  };
  if (commuting) f.generators = std::move(generators);
  return f;
}

inline UnitaryFamily exponential_family(const Matrix& generator) {
  return exponential_family(std::vector<Matrix>{generator});
}

/// U(x) (x) I_ancilla
inline UnitaryFamily with_ancilla(const UnitaryFamily& f,
                                  Eigen::Index ancilla_dim) {
  UnitaryFamily out;
  out.dim = f.dim * ancilla_dim;
  out.num_params = f.num_params;
  Matrix id = identity(ancilla_dim);
  out.unitary = [f, id](ParamSpan x) { return kron(f.unitary(x), id); };
  for (const auto& g : f.generators) out.generators.push_back(kron(g, id));
  return out;
}

/// H(x) = i (d U^dagger / dx) U(x) by central difference with step h.
inline Matrix generator_at(const UnitaryFamily& f, ParamSpan x, double h,
                           std::size_t param = 0) {
  Params xp = detail::shifted(x, param, h);
  Params xm = detail::shifted(x, param, -h);
  Matrix du = (f.unitary(xp) - f.unitary(xm)) / (2.0 * h);
  return hermitian_part(kI * du.adjoint() * f.unitary(x));
}

inline Matrix generator_at(const UnitaryFamily& f, double x, double h = 1e-5) {
  return generator_at(f, ParamSpan(&x, 1), h, 0);
}

/// rho(x) = U(x) rho_i U(x)^dagger.
inline ParametricState unitary_state(const UnitaryFamily& f,
                                     const Matrix& rho_initial) {
  require_square(rho_initial, "initial state");
  if (rho_initial.rows() != f.dim) {
    throw Error(Errc::DimensionMismatch, "initial state dimension");
  }
  auto rho = [f, rho_initial](ParamSpan x) -> Matrix {
    Matrix u = f.unitary(x);
    return u * rho_initial * u.adjoint();
  };
  ParametricState s(f.dim, f.num_params, rho);
  if (!f.generators.empty()) {
    s = s.with_analytic_derivative([f, rho_initial](ParamSpan x,
                                                    std::size_t i) -> Matrix {
      Matrix u = f.unitary(x);
      Matrix r = u * rho_initial * u.adjoint();
      const Matrix& g = f.generators[i];
      return -kI * (g * r - r * g);
    });
  }
  return s;
}

/// QFI of U(x) rho_i U(x)^dagger from the initial spectrum and the local
/// generator H:
///   4 [ sum_k q_k Var_k(H) - sum_{k != l, q_k = q_l} q_k |<phi_k|H|phi_l>|^2 ].
/// Every pair with distinct eigenvalues must satisfy <phi_k|H|phi_l> = 0.
inline double qfi_unitary_mixed(const SpectralData& initial, const Matrix& h,
                                double deg_tol = 1e-8,
                                double ortho_tol = 1e-8) {
  if (h.rows() != initial.dim()) {
    throw Error(Errc::DimensionMismatch, "generator dimension");
  }
  const Eigen::Index r = initial.rank;
  Matrix phi = initial.support();
  Matrix h_sub = phi.adjoint() * h * phi;
  Matrix h2_sub = phi.adjoint() * h * h * phi;
  double total = 0.0;
  for (Eigen::Index k = 0; k < r; ++k) {
    double qk = initial.eigenvalues(k);
    double mean = h_sub(k, k).real();
    total += qk * (h2_sub(k, k).real() - mean * mean);
    for (Eigen::Index l = 0; l < r; ++l) {
      if (l == k) continue;
      double gap = std::abs(qk - initial.eigenvalues(l));
      double coupling = std::abs(h_sub(k, l));
      if (gap < deg_tol) {
        total -= qk * coupling * coupling;
      } else if (coupling >= ortho_tol) {
        throw Error(Errc::NotQuasiPure,
                    "pair (" + std::to_string(k) + ", " + std::to_string(l) +
                        ") has distinct eigenvalues and |<k|H|l>| = " +
                        std::to_string(coupling));
      }
    }
  }
  return 4.0 * total;
}

// ---------------------------------------------------------------------------
// The two-qubit example: U(x) = exp(-i x sigma_x (x) sigma_x) acting on
// q1 |00><00| + (1 - q1) |01><01|. Basis order is |00>, |01>, |10>, |11>.

inline Matrix two_qubit_initial(double q1) {
  if (!(q1 > 0.0 && q1 < 1.0)) {
    throw Error(Errc::InvalidConfig, "q1 must lie in (0, 1)");
  }
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = q1;
  rho(1, 1) = 1.0 - q1;
  return rho;
}

inline UnitaryFamily two_qubit_family() {
  return exponential_family(kron(pauli_x(), pauli_x()));
}

inline ParametricState two_qubit_state(double q1) {
  return unitary_state(two_qubit_family(), two_qubit_initial(q1));
}

// ---------------------------------------------------------------------------
// Ancilla protocol.

/// Control-sum gate on C^{d_r} (x) C^{d_a}: |n>|k> -> |n>|n + k - 1 mod d_a>
/// with 1-based labels.
inline Matrix cs_gate(Eigen::Index support_rank, Eigen::Index ancilla_dim) {
  if (support_rank < 1 || ancilla_dim < support_rank) {
    throw Error(Errc::DimensionTooSmall,
                "ancilla dimension " + std::to_string(ancilla_dim) +
                    " is smaller than the support rank " +
                    std::to_string(support_rank));
  }
  const Eigen::Index dim = support_rank * ancilla_dim;
  Matrix gate = Matrix::Zero(dim, dim);
  for (Eigen::Index n = 0; n < support_rank; ++n) {
    for (Eigen::Index k = 0; k < ancilla_dim; ++k) {
      gate(n * ancilla_dim + (n + k) % ancilla_dim, n * ancilla_dim + k) = 1.0;
    }
  }
  return gate;
}

/// sum_n q_n |phi_n><phi_n| (x) |n><n|, prepared by applying the control-sum
/// gate (conditioned on the eigenbasis of rho_i) to rho_i (x) |1><1|.
inline Matrix ancilla_initial(const Matrix& rho_initial,
                              Eigen::Index ancilla_dim,
                              SpectralOptions opts = {}) {
  SpectralData sd = spectral_of(rho_initial, opts);
  const Eigen::Index d = sd.dim();
  Matrix gate = cs_gate(sd.rank, ancilla_dim);
  Matrix id_a = identity(ancilla_dim);
  Matrix lift = kron(sd.support(), id_a);
  Matrix full = lift * gate * lift.adjoint() + kron(sd.kernel_projector, id_a);
  Vector first = basis_vector(ancilla_dim, 0);
  Matrix start = kron(rho_initial, outer(first, first));
  (void)d;
  return hermitian_part(full * start * full.adjoint());
}

/// U(x) (x) I applied to the ancilla-correlated initial state.
inline ParametricState ancilla_state(const Matrix& rho_initial,
                                     const UnitaryFamily& f,
                                     Eigen::Index ancilla_dim,
                                     SpectralOptions opts = {}) {
  return unitary_state(with_ancilla(f, ancilla_dim),
                       ancilla_initial(rho_initial, ancilla_dim, opts));
}

}  // namespace qps

#endif  // QPS_APPS_HPP_
