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
#ifndef QPS_VERIFY_HPP_
#define QPS_VERIFY_HPP_

// Randomized cross-module property suites. Trial t of suite s draws from an
// engine seeded with {seed, s, t}, so any counterexample can be replayed in
// isolation.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qps/postselect.hpp"
#include "qps/qfi.hpp"
#include "qps/quasipure.hpp"
#include "qps/random.hpp"

namespace qps {

struct Counterexample {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  std::string message;
  std::vector<std::pair<std::string, double>> values;
};

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t passed = 0;
  std::optional<Counterexample> first_failure;

  bool ok() const { return passed == trials; }
};

struct VerifyOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 7;
  /// Negative control: perturb one POVM effect so completeness fails.
  bool inject_broken_povm = false;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;

  bool all_passed() const {
    for (const auto& s : suites) {
      if (!s.ok()) return false;
    }
    return true;
  }
};

inline Rng trial_rng(std::uint64_t seed, std::uint64_t suite,
                     std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(suite),
                    static_cast<std::uint32_t>(trial)};
  return Rng(seq);
}

/// Outcome of one trial: empty on success, otherwise the failure details.
struct TrialFailure {
  std::string message;
  std::vector<std::pair<std::string, double>> values;
};
using TrialCheck = std::function<std::optional<TrialFailure>(Rng&, std::size_t)>;

inline SuiteResult run_suite(const std::string& name, std::uint64_t suite_id,
                             const VerifyOptions& opts, const TrialCheck& check) {
  SuiteResult result;
  result.name = name;
  result.trials = opts.trials;
  for (std::size_t t = 0; t < opts.trials; ++t) {
    Rng rng = trial_rng(opts.seed, suite_id, t);
    std::optional<TrialFailure> failure;
    try {
      failure = check(rng, t);
    } catch (const std::exception& e) {
      failure = TrialFailure{e.what(), {}};
    }
    if (!failure) {
      ++result.passed;
    } else if (!result.first_failure) {
      result.first_failure = Counterexample{name, opts.seed, t,
                                            failure->message, failure->values};
    }
  }
  return result;
}

namespace detail {

inline Eigen::Index pick(Rng& rng, Eigen::Index lo, Eigen::Index hi) {
  return std::uniform_int_distribution<Eigen::Index>(lo, hi)(rng);
}

inline double pick_x(Rng& rng) {
  return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
}

}  // namespace detail

/// Post-measurement information never exceeds the QFI of the state.
inline SuiteResult inequality_suite(const VerifyOptions& opts) {
  return run_suite(
      "postselection_inequality", 1, opts,
      [](Rng& rng, std::size_t t) -> std::optional<TrialFailure> {
        Eigen::Index dim = detail::pick(rng, 2, 4);
        ParametricState s = t % 2 == 0
                                ? random_mixed_family(dim, rng)
                                : random_unitary_family(
                                      dim, detail::pick(rng, 1, dim), rng);
        Povm povm = random_povm(dim, detail::pick(rng, 2, 4), rng);
        double x = detail::pick_x(rng);
        QfiReport rep = ensemble_decomposition(s, ParamSpan(&x, 1), povm);
        double p_total = 0.0;
        for (const auto& o : rep.per_outcome) p_total += o.probability;
        double slack = 1e-8 * std::max(1.0, rep.qfi);
        if (rep.total_ensemble_qfi > rep.qfi + slack ||
            std::abs(p_total - 1.0) > 1e-10) {
          return TrialFailure{"post-measurement information exceeds the QFI",
                              {{"dim", double(dim)},
                               {"x", x},
                               {"qfi", rep.qfi},
                               {"total_ensemble_qfi", rep.total_ensemble_qfi},
                               {"probability_sum", p_total}}};
        }
        return std::nullopt;
      });
}

/// Spectral, eigen, covariant-derivative and convex criteria agree; half of
/// the trials use the ancilla construction (quasi-pure by design).
inline SuiteResult criteria_suite(const VerifyOptions& opts) {
  return run_suite(
      "criteria_equivalence", 2, opts,
      [](Rng& rng, std::size_t t) -> std::optional<TrialFailure> {
        Eigen::Index dim = detail::pick(rng, 2, 4);
        bool quasi_pure = t % 2 == 0;
        ParametricState s =
            quasi_pure ? random_ancilla_family(
                             dim, detail::pick(rng, 1, std::min<Eigen::Index>(dim, 3)), rng)
                       : random_mixed_family(dim, rng);
        double x = detail::pick_x(rng);
        ParamSpan xs(&x, 1);
        SpectralData sd = spectral_at(s, xs);
        ConvexDecomposition dec{sd.support_eigenvalues(), sd.support()};
        QuasiPureReport rep = criteria_report(s, xs, dec);
        if (!rep.criteria_agree() || rep.verdict != quasi_pure) {
          return TrialFailure{
              "quasi-purity criteria disagree",
              {{"dim", double(dim)},
               {"x", x},
               {"expected", quasi_pure ? 1.0 : 0.0},
               {"residual_spectral", rep.residual_spectral},
               {"eigenvalue_drift", rep.eigenvalue_drift},
               {"gencoder_residual", rep.gencoder_residual},
               {"convex_residual", rep.convex_residual.value_or(-1.0)}}};
        }
        return std::nullopt;
      });
}

/// Closed-form SLD and QFI of quasi-pure states agree with the general ones.
inline SuiteResult quasipure_qfi_suite(const VerifyOptions& opts) {
  return run_suite(
      "quasipure_qfi", 3, opts,
      [](Rng& rng, std::size_t) -> std::optional<TrialFailure> {
        Eigen::Index dim = detail::pick(rng, 2, 4);
        Eigen::Index rank =
            detail::pick(rng, 1, std::min<Eigen::Index>(dim, 3));
        ParametricState s = random_ancilla_family(dim, rank, rng);
        double x = detail::pick_x(rng);
        ParamSpan xs(&x, 1);
        Matrix rho = density_at(s, xs);
        Matrix drho = derivative_at(s, xs);
        SpectralData sd = spectral_of(rho);
        Matrix dphi = eigenvector_derivatives(s, xs, sd, 0);
        Matrix general = sld_general(rho, drho);
        double q_general = qfi_from_sld(rho, general);
        Matrix closed = sld_quasipure(sd, dphi, drho);
        double q_closed = qfi_quasipure(sd, dphi, drho);
        double scale = std::max(1.0, q_general);
        double sld_err = (closed - general).norm() / std::max(1.0, general.norm());
        if (std::abs(q_closed - q_general) > 1e-7 * scale || sld_err > 1e-7) {
          return TrialFailure{"closed forms disagree with the general SLD",
                              {{"dim", double(dim)},
                               {"rank", double(rank)},
                               {"x", x},
                               {"qfi_general", q_general},
                               {"qfi_quasipure", q_closed},
                               {"sld_relative_error", sld_err}}};
        }
        return std::nullopt;
      });
}

/// Every construction mode yields a complete PSD POVM with M^dagger M = E.
inline SuiteResult povm_suite(const VerifyOptions& opts) {
  return run_suite(
      "povm_validity", 4, opts,
      [&opts](Rng& rng, std::size_t t) -> std::optional<TrialFailure> {
        Eigen::Index dim = detail::pick(rng, 2, 6);
        Eigen::Index rank = detail::pick(rng, 1, dim - 1);
        Matrix basis = random_unitary(dim, rng);
        Matrix v = basis.leftCols(rank);
        Matrix support = v * v.adjoint();
        Matrix kernel = identity(dim) - support;
        std::uniform_real_distribution<double> lam(1e-4, 0.999);
        PovmRequest req;
        req.support = support;
        switch (t % 4) {
          case 0:
            req.mode = PovmMode::KernelBinary;
            req.auxiliary = kernel;
            req.lambdas = {lam(rng)};
            break;
          case 1: {
            req.mode = PovmMode::TangentBinary;
            Eigen::Index tr = detail::pick(rng, 1, dim - rank);
            Matrix w = basis.middleCols(rank, tr);
            req.auxiliary = w * w.adjoint();
            req.lambdas = {lam(rng)};
            break;
          }
          case 2:
            req.mode = PovmMode::Multi;
            req.auxiliary = kernel;
            req.lambdas = {0.5 * lam(rng), 0.5 * lam(rng)};
            break;
          default:
            req.mode = PovmMode::MultiParam;
            req.lambdas = {0.5 * lam(rng), 0.5 * lam(rng)};
            break;
        }
        Povm povm = build_povm(req);
        if (opts.inject_broken_povm && t == 0) {
          povm.elements.front().effect *= 1.01;
        }
        validate_povm(povm);
        Matrix u = random_unitary(dim, rng);
        for (const auto& e : povm.elements) {
          MeasurementOperator m = measurement_from_povm(e.effect, u);
          double err = (m.m.adjoint() * m.m - e.effect).norm();
          if (err > 1e-10) {
            return TrialFailure{"M^dagger M differs from E",
                                {{"dim", double(dim)}, {"error", err}}};
          }
        }
        return std::nullopt;
      });
}

/// The tangent-space POVM at x_star = x keeps all the information of a
/// quasi-pure state.
inline SuiteResult saturation_suite(const VerifyOptions& opts) {
  return run_suite(
      "lossless_saturation", 5, opts,
      [](Rng& rng, std::size_t) -> std::optional<TrialFailure> {
        Eigen::Index dim = detail::pick(rng, 2, 4);
        Eigen::Index rank =
            detail::pick(rng, 1, std::min<Eigen::Index>(dim, 3));
        ParametricState s = random_ancilla_family(dim, rank, rng);
        double x = detail::pick_x(rng);
        double lambda = std::pow(10.0, -double(detail::pick(rng, 1, 3)));
        PostselectionFrame frame = tangent_frame(s, x);
        QfiReport rep = ensemble_decomposition(
            s, ParamSpan(&x, 1), tangent_binary_povm(frame, lambda));
        double rel = std::abs(rep.kept_post_qfi - rep.qfi) /
                     std::max(1e-300, rep.qfi);
        if (rel > 1e-5) {
          return TrialFailure{"postselection lost information",
                              {{"dim", double(dim)},
                               {"rank", double(rank)},
                               {"x", x},
                               {"lambda", lambda},
                               {"qfi", rep.qfi},
                               {"kept_post_qfi", rep.kept_post_qfi}}};
        }
        return std::nullopt;
      });
}

inline VerifyReport verify_suite(const VerifyOptions& opts) {
  if (opts.trials == 0) {
    throw Error(Errc::InvalidConfig, "trials must be at least 1");
  }
  VerifyReport report;
  report.suites.push_back(inequality_suite(opts));
  report.suites.push_back(criteria_suite(opts));
  report.suites.push_back(quasipure_qfi_suite(opts));
  report.suites.push_back(povm_suite(opts));
  report.suites.push_back(saturation_suite(opts));
  return report;
}

}  // namespace qps

#endif  // QPS_VERIFY_HPP_
