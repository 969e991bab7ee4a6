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

#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qps/apps.hpp"
#include "qps/quasipure.hpp"
#include "qps/random.hpp"
#include "qps/sweep.hpp"

namespace qps {
namespace {

TEST(ResidualSpectral, PureFamiliesVanish) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    ParametricState s = random_unitary_family(2 + t % 4, 1, rng);
    EXPECT_LT(residual_spectral(s, 0.05 * t), 1e-10);
  }
}

TEST(ResidualSpectral, TwoQubitOnGrid) {
  ParametricState s = two_qubit_state(0.3);
  EXPECT_LT(residual_spectral(s, 0.7), 1e-10);
  for (int i = 0; i < 20; ++i) {
    EXPECT_LT(residual_spectral(s, -1.0 + 0.1 * i), 1e-10);
  }
}

TEST(ResidualSpectral, SuperresMatchesGaussianMoments) {
  ParametricState s = superres_state({0.3, 1.0, 30});
  for (double x : {0.2, 0.5, 1.0}) {
    EXPECT_NEAR(residual_spectral(s, x), oracle::source_block_norm(x, 0.3, 1.0), 1e-6)
        << "x = " << x;
  }
}

TEST(ResidualSpectral, InvariantUnderFixedUnitary) {
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    ParametricState s = random_mixed_family(3, rng);
    Matrix w = random_unitary(3, rng);
    ParametricState rotated(3, 1, [s, w](ParamSpan x) {
      return Matrix(w * density_at(s, x) * w.adjoint());
    });
    EXPECT_NEAR(residual_spectral(s, 0.3), residual_spectral(rotated, 0.3), 1e-10);
  }
}

// Near the Rayleigh limit the second eigenvalue is O(x^2). Counting it as
// kernel (loose rank tolerance) leaves a residual linear in x; keeping it,
// the eigenbasis rotation makes the residual tend to |2q - 1| / (2 sqrt2).
TEST(ResidualSpectral, SuperresVanishesLinearlyAtRayleighLimit) {
  ParametricState s = superres_state({});
  std::vector<double> xs, ys;
  for (int i = 1; i <= 10; ++i) {
    double x = 1e-3 * i;
    xs.push_back(x);
    ys.push_back(residual_spectral(s, x, 1e-3));
  }
  // y = a + b x
  Eigen::MatrixXd a(xs.size(), 2);
  Eigen::VectorXd b(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = xs[i];
    b(i) = ys[i];
  }
  Eigen::Vector2d fit = a.colPivHouseholderQr().solve(b);
  EXPECT_GT(fit(1), 0.0);
  // |d q_2 / dx| = q (1 - q) (x / 2) exp(-x^2 / 4): linear up to O(x^2).
  EXPECT_NEAR(fit(1), 0.3 * 0.7 / 2.0, 1e-5);
  EXPECT_LT(std::abs(fit(0)), 1e-8);
}

TEST(ResidualSpectral, SuperresFullSupportMatchesBlockOracle) {
  ParametricState s = superres_state({});
  for (double x : {1e-3, 0.1, 0.5}) {
    EXPECT_NEAR(residual_spectral(s, x), oracle::source_block_norm(x, 0.3, 1.0), 1e-6);
  }
  EXPECT_NEAR(residual_spectral(s, 1e-3), 0.4 / (2.0 * std::sqrt(2.0)), 1e-6);
}

TEST(CriteriaReport, SuperresConvexResidualVanishesLinearly) {
  SuperresConfig cfg;
  ParametricState s = superres_state(cfg);
  for (double x : {1e-4, 1e-3, 1e-2}) {
    Params xs = {x};
    QuasiPureReport rep = criteria_report(s, xs, superres_decomposition(cfg)(xs));
    oracle::SourceBlock g = oracle::source_block(x, cfg.q, cfg.sigma);
    EXPECT_NEAR(*rep.convex_residual,
                std::max({std::abs(g.pp), std::abs(g.mm), std::abs(g.pm)}), 1e-9);
    EXPECT_NEAR(*rep.convex_residual / x, 0.7 / 4.0, 1e-3);
  }
}

TEST(CriteriaReport, AncillaInstanceIsQuasiPure) {
  Rng rng(3);
  ParametricState s = random_ancilla_family(4, 3, rng);
  Params x = {0.25};
  SpectralData sd = spectral_at(s, x);
  QuasiPureReport rep =
      criteria_report(s, x, ConvexDecomposition{sd.support_eigenvalues(), sd.support()});
  EXPECT_TRUE(rep.verdict);
  EXPECT_TRUE(rep.criteria_agree());
  EXPECT_LT(rep.residual_spectral, 1e-9);
  EXPECT_LT(rep.eigenvalue_drift, 1e-9);
  EXPECT_LT(rep.gencoder_residual, 1e-9);
  EXPECT_LT(*rep.convex_residual, 1e-9);
  EXPECT_EQ(rep.pairwise.size(), 6u);
  for (const auto& p : rep.pairwise) EXPECT_LT(p.overlap, 1e-9);
}

TEST(CriteriaReport, SuperresSourceDecomposition) {
  SuperresConfig cfg;
  ParametricState s = superres_state(cfg);
  double x = 0.5;
  Params xs = {x};
  QuasiPureReport rep = criteria_report(s, xs, superres_decomposition(cfg)(xs));
  oracle::SourceBlock g = oracle::source_block(x, cfg.q, cfg.sigma);
  double expected = std::max({std::abs(g.pp), std::abs(g.mm), std::abs(g.pm)});
  ASSERT_TRUE(rep.convex_residual.has_value());
  EXPECT_NEAR(*rep.convex_residual, expected, 1e-6);
  EXPECT_FALSE(rep.verdict);
  EXPECT_TRUE(rep.criteria_agree());
}

TEST(CriteriaReport, SourceMatrixElements) {
  SuperresConfig cfg;
  double x = 0.5;
  Params xs = {x};
  ParametricState s = superres_state(cfg);
  ConvexDecomposition dec = superres_decomposition(cfg)(xs);
  Matrix g = dec.vectors.adjoint() * derivative_at(s, xs) * dec.vectors;
  oracle::SourceBlock o = oracle::source_block(x, cfg.q, cfg.sigma);
  EXPECT_NEAR(std::abs(g(0, 0) - o.pp), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(g(1, 1) - o.mm), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(g(0, 1) - o.pm), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(g(1, 0) - o.pm), 0.0, 1e-6);
}

TEST(CriteriaReport, SuperresApproximatelyQuasiPureNearRayleighLimit) {
  QuasiPureTolerances loose;
  loose.quasi_pure = 1e-3;
  loose.rank_tol = 1e-3;
  SuperresConfig cfg;
  Params xs = {1e-4};
  QuasiPureReport rep =
      criteria_report(superres_state(cfg), xs, superres_decomposition(cfg)(xs), loose);
  EXPECT_TRUE(rep.verdict);
  EXPECT_TRUE(rep.criteria_agree());
  // The exact rank-two support does not see the approximation.
  EXPECT_FALSE(criteria_report(superres_state(cfg), 1e-4).verdict);
  EXPECT_EQ(rep.tolerances.quasi_pure, 1e-3);
}

TEST(CriteriaReport, VerdictsAgreeOnRandomFamilies) {
  Rng rng(4);
  for (int t = 0; t < 40; ++t) {
    bool quasi = t % 2 == 0;
    ParametricState s = quasi ? random_ancilla_family(3, 1 + t % 3, rng)
                              : random_mixed_family(3, rng);
    Params x = {0.1};
    SpectralData sd = spectral_at(s, x);
    QuasiPureReport rep =
        criteria_report(s, x, ConvexDecomposition{sd.support_eigenvalues(), sd.support()});
    EXPECT_EQ(rep.verdict, quasi);
    EXPECT_TRUE(rep.criteria_agree()) << "trial " << t;
  }
}

TEST(CriteriaReport, NonQuasiPureUnitaryFamily) {
  // A mixed, non-degenerate initial state rotated by a generic generator.
  Rng rng(5);
  ParametricState s = random_unitary_family(3, 2, rng);
  Params x = {0.3};
  QuasiPureReport rep = criteria_report(s, x);
  EXPECT_FALSE(rep.verdict);
  EXPECT_FALSE(rep.eigen_verdict);
  EXPECT_FALSE(rep.gencoder_verdict);
  EXPECT_LT(rep.eigenvalue_drift, 1e-8);  // unitary: spectrum is fixed
}

TEST(CriteriaReport, RejectsBadDecomposition) {
  ParametricState s = two_qubit_state(0.3);
  ConvexDecomposition wrong{RealVector::Constant(1, 1.0), Matrix(basis_vector(4, 2))};
  try {
    criteria_report(s, 0.2, wrong);
    FAIL() << "expected BadDecomposition";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BadDecomposition);
  }
}

}  // namespace
}  // namespace qps
