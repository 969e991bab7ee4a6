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
#ifndef QPS_POVM_HPP_
#define QPS_POVM_HPP_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qps/linalg.hpp"

namespace qps {

/// One POVM effect E_omega. `kept` marks outcomes in the postselected set;
/// lambda/mu record the construction weights (0 where not applicable).
struct PovmElement {
  std::string id;
  Matrix effect;
  bool kept = true;
  double lambda = 0.0;
  double mu = 0.0;
};

struct Povm {
  std::vector<PovmElement> elements;
  std::vector<double> x_star;

  Eigen::Index dim() const {
    return elements.empty() ? 0 : elements.front().effect.rows();
  }

  /// ||sum_omega E_omega - I||_F
  double completeness_defect() const {
    if (elements.empty()) return 0.0;
    Matrix sum = Matrix::Zero(dim(), dim());
    for (const auto& e : elements) sum += e.effect;
    return (sum - identity(dim())).norm();
  }

  double min_eigenvalue() const {
    double lowest = 0.0;
    bool first = true;
    for (const auto& e : elements) {
      double v = eig_hermitian(e.effect).values.minCoeff();
      lowest = first ? v : std::min(lowest, v);
      first = false;
    }
    return lowest;
  }
};

/// Throws InvalidPovm unless the effects are PSD (1e-12) and complete
/// (1e-12, scaled by sqrt(dim)).
inline void validate_povm(const Povm& povm, double tol = 1e-12) {
  if (povm.elements.empty()) {
    throw Error(Errc::InvalidPovm, "POVM has no elements");
  }
  for (const auto& e : povm.elements) {
    if (e.effect.rows() != povm.dim() || e.effect.cols() != povm.dim()) {
      throw Error(Errc::InvalidPovm, "effect " + e.id + " has wrong shape");
    }
    if (hermiticity_defect(e.effect) > tol * std::max(1.0, e.effect.norm())) {
      throw Error(Errc::InvalidPovm, "effect " + e.id + " is not Hermitian");
    }
  }
  double defect = povm.completeness_defect();
  double scale = std::sqrt(static_cast<double>(povm.dim()));
  if (!(defect < tol * scale)) {
    throw Error(Errc::InvalidPovm,
                "sum of effects differs from identity by " +
                    std::to_string(defect));
  }
  double lowest = povm.min_eigenvalue();
  if (lowest < -tol) {
    throw Error(Errc::InvalidPovm,
                "effect has negative eigenvalue " + std::to_string(lowest));
  }
}

enum class PovmMode {
  KernelBinary,   // E = Pi_k + lambda Pi_r
  TangentBinary,  // E = Pi_t + lambda Pi_r
  Multi,          // E_w = mu_w Pi_aux + lambda_w Pi_r
  MultiParam,     // E_w = mu_w I + (lambda_w - mu_w) Pi_r
  Pure,           // E = |psi_perp><psi_perp| + lambda |psi><psi|
};

struct PovmRequest {
  PovmMode mode = PovmMode::TangentBinary;
  Matrix support;    // Pi_r at x_star
  Matrix auxiliary;  // Pi_k, Pi_t or |psi_perp><psi_perp| depending on mode
  std::vector<double> lambdas;
  std::vector<double> mus;  // Multi / MultiParam; empty means equal weights
  /// Optional PSD operator supported in the complement of
  /// support + auxiliary, added to the (single) kept element.
  std::optional<Matrix> extra;
  std::vector<double> x_star;
};

namespace detail {

inline void require_projector(const Matrix& p, const char* name,
                              Eigen::Index dim) {
  if (p.rows() != dim || p.cols() != dim) {
    throw Error(Errc::DimensionMismatch, std::string(name) + " shape");
  }
  if (!is_projector(p, 1e-10)) {
    throw Error(Errc::NotAProjector, std::string(name) + " is not a projector");
  }
}

inline void require_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(Errc::LambdaOutOfRange,
                "lambda must lie in (0, 1), got " + std::to_string(lambda));
  }
}

}  // namespace detail

/// Builds the lossless postselection POVM of the requested mode. The discard
/// element E_x = I - sum of kept elements is always appended and checked to
/// be PSD.
inline Povm build_povm(const PovmRequest& req) {
  const Eigen::Index dim = req.support.rows();
  detail::require_projector(req.support, "support projector", dim);
  if (req.mode != PovmMode::MultiParam) {
    detail::require_projector(req.auxiliary, "auxiliary projector", dim);
  }
  if (req.lambdas.empty()) {
    throw Error(Errc::LambdaOutOfRange, "no lambda given");
  }
  for (double l : req.lambdas) detail::require_lambda(l);

  const bool multi =
      req.mode == PovmMode::Multi ||
      (req.mode == PovmMode::MultiParam && req.lambdas.size() > 1);
  if (!multi && req.lambdas.size() != 1) {
    throw Error(Errc::LambdaOutOfRange, "binary modes take a single lambda");
  }
  std::vector<double> mus = req.mus;
  if (multi) {
    if (mus.empty()) {
      mus.assign(req.lambdas.size(), 1.0 / static_cast<double>(req.lambdas.size()));
    }
    if (mus.size() != req.lambdas.size()) {
      throw Error(Errc::DimensionMismatch, "mu and lambda counts differ");
    }
    double total = 0.0;
    for (double m : mus) {
      if (m < 0.0) throw Error(Errc::IncompletePovm, "negative mu");
      total += m;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw Error(Errc::IncompletePovm, "mu weights must sum to one");
    }
  }
  if (req.mode == PovmMode::Pure) {
    if (std::abs(trace_real(req.support) - 1.0) > 1e-10 ||
        std::abs(trace_real(req.auxiliary) - 1.0) > 1e-10) {
      throw Error(Errc::NotAProjector,
                  "pure mode needs rank-one state and direction projectors");
    }
  }

  Povm povm;
  povm.x_star = req.x_star;
  const Matrix id = identity(dim);
  switch (req.mode) {
    case PovmMode::KernelBinary:
    case PovmMode::TangentBinary:
    case PovmMode::Pure: {
      double l = req.lambdas.front();
      povm.elements.push_back({"keep", req.auxiliary + l * req.support, true, l, 1.0});
      break;
    }
    case PovmMode::Multi:
      for (std::size_t w = 0; w < req.lambdas.size(); ++w) {
        povm.elements.push_back({"keep" + std::to_string(w),
                                 mus[w] * req.auxiliary + req.lambdas[w] * req.support,
                                 true, req.lambdas[w], mus[w]});
      }
      break;
    case PovmMode::MultiParam:
      if (!multi) {
        double l = req.lambdas.front();
        povm.elements.push_back({"keep", id + (l - 1.0) * req.support, true, l, 1.0});
      } else {
        for (std::size_t w = 0; w < req.lambdas.size(); ++w) {
          povm.elements.push_back(
              {"keep" + std::to_string(w),
               mus[w] * id + (req.lambdas[w] - mus[w]) * req.support, true,
               req.lambdas[w], mus[w]});
        }
      }
      break;
  }

  if (req.extra) {
    const Matrix& extra = *req.extra;
    if (extra.rows() != dim || extra.cols() != dim) {
      throw Error(Errc::DimensionMismatch, "extra operand shape");
    }
    if (eig_hermitian(extra).values.minCoeff() < -1e-12) {
      throw Error(Errc::NotPsd, "extra operand must be PSD");
    }
    Matrix covered = req.support;
    if (req.mode != PovmMode::MultiParam) covered += req.auxiliary;
    if ((covered * extra).norm() > 1e-10) {
      throw Error(Errc::IncompletePovm,
                  "extra operand must live outside support and tangent space");
    }
    if (povm.elements.size() != 1) {
      throw Error(Errc::IncompletePovm,
                  "extra operand only applies to a single kept element");
    }
    povm.elements.front().effect += extra;
  }

  Matrix discard = id;
  for (const auto& e : povm.elements) discard -= e.effect;
  discard = hermitian_part(discard);
  double lowest = eig_hermitian(discard).values.minCoeff();
  if (lowest < -1e-12) {
    throw Error(Errc::IncompletePovm,
                "discard element has eigenvalue " + std::to_string(lowest));
  }
  povm.elements.push_back({"discard", discard, false, 0.0, 0.0});
  return povm;
}

/// M = U sqrt(E), so that M^dagger M = E.
struct MeasurementOperator {
  Matrix m;
  Matrix unitary_part;
};

inline MeasurementOperator measurement_from_povm(
    const Matrix& effect, const std::optional<Matrix>& unitary = std::nullopt) {
  require_square(effect, "effect");
  Matrix root = sqrt_psd(effect);
  Matrix u = unitary.value_or(identity(effect.rows()));
  if (u.rows() != effect.rows() || u.cols() != effect.cols()) {
    throw Error(Errc::DimensionMismatch, "unitary part shape");
  }
  double defect = (u.adjoint() * u - identity(u.rows())).norm();
  if (defect > 1e-10) {
    throw Error(Errc::NotUnitary,
                "||U^dagger U - I||_F = " + std::to_string(defect));
  }
  return {u * root, u};
}

struct MeasuredState {
  Matrix sigma;
  double probability = 0.0;
};

/// sigma = M rho M^dagger / p with p = Tr[M rho M^dagger].
inline MeasuredState apply_measurement(const Matrix& m, const Matrix& rho) {
  require_same_shape(m, rho, "apply_measurement");
  Matrix num = m * rho * m.adjoint();
  double p = trace_real(num);
  if (!(p > 1e-14)) {
    throw Error(Errc::ZeroSuccessProbability,
                "success probability " + std::to_string(p));
  }
  return {hermitian_part(num / p), p};
}

}  // namespace qps

#endif  // QPS_POVM_HPP_
