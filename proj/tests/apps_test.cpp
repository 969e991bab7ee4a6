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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qps/apps.hpp"
#include "qps/quasipure.hpp"
#include "qps/random.hpp"

namespace qps {
namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no qps::Error thrown";
  return Errc::InvalidConfig;
}

double qfi_at(const ParametricState& s, double x) {
  return qfi(density_at(s, x), derivative_at(s, x));
}

TEST(DisplacedGaussian, MatchesQuadrature) {
  for (double d : {-0.5, 0.05, 0.25, 1.0}) {
    Vector c = displaced_gaussian(d, 1.0, 30);
    for (int n = 0; n < 6; ++n) {
      EXPECT_NEAR(c(n).real(), oracle::displaced_coefficient(n, d, 1.0), 1e-9)
          << "d=" << d << " n=" << n;
      EXPECT_EQ(c(n).imag(), 0.0);
    }
  }
}

TEST(DisplacedGaussian, DerivativeMatchesDifference) {
  const double d = 0.3, h = 1e-5;
  Vector fd = (displaced_gaussian(d + h, 1.0, 30) - displaced_gaussian(d - h, 1.0, 30)) /
              (2.0 * h);
  EXPECT_LT((displaced_gaussian_derivative(d, 1.0, 30) - fd).norm(), 1e-9);
}

TEST(DisplacedGaussian, TruncationInsufficient) {
  EXPECT_EQ(code_of([] { displaced_gaussian(10.0, 1.0, 5); }),
            Errc::TruncationInsufficient);
  SuperresConfig cfg;
  cfg.n_max = 4;
  ParametricState s = superres_state(cfg);
  EXPECT_EQ(code_of([&] { density_at(s, 3.0); }), Errc::TruncationInsufficient);
}

TEST(SuperresState, CoincidentSourcesArePure) {
  ParametricState s = superres_state({});
  Matrix rho = density_at(s, 0.0);
  Vector e0 = basis_vector(30, 0);
  EXPECT_LT((rho - outer(e0, e0)).norm(), 1e-15);
  EXPECT_EQ(spectral_at(s, 0.0).rank, 1);
}

TEST(SuperresState, SourceOverlap) {
  Vector plus = displaced_gaussian(0.25, 1.0, 30);
  Vector minus = displaced_gaussian(-0.25, 1.0, 30);
  double overlap = plus.dot(minus).real();
  EXPECT_NEAR(overlap, 0.969233, 1e-6);
  EXPECT_NEAR(overlap, oracle::source_overlap(0.5, 1.0), 1e-9);
  EXPECT_NEAR(overlap, std::exp(-0.5 * 0.5 / 8.0), 1e-12);
}

TEST(SuperresState, EigenvaluesMatchTwoSourceFormula) {
  SuperresConfig cfg;
  ParametricState s = superres_state(cfg);
  for (double x : {0.1, 0.5, 1.0}) {
    auto [hi, lo] = oracle::two_source_eigenvalues(cfg.q, oracle::source_overlap(x, 1.0));
    SpectralData sd = spectral_at(s, x);
    ASSERT_EQ(sd.rank, 2);
    EXPECT_NEAR(sd.eigenvalues(0), hi, 1e-9);
    EXPECT_NEAR(sd.eigenvalues(1), lo, 1e-9);
  }
}

TEST(SuperresState, QfiIndependentOfIntensityAndSeparation) {
  for (double q : {0.1, 0.3, 0.5}) {
    SuperresConfig cfg;
    cfg.q = q;
    ParametricState s = superres_state(cfg);
    for (double x : {0.05, 0.1, 0.25, 0.5, 0.75, 1.0}) {
      EXPECT_NEAR(qfi_at(s, x), 0.25, 1e-6) << "q=" << q << " x=" << x;
    }
  }
  SuperresConfig wide;
  wide.sigma = 2.0;
  EXPECT_NEAR(qfi_at(superres_state(wide), 0.5), 1.0 / 16.0, 1e-6);
}

TEST(SuperresState, AnalyticDerivativeMatchesDifference) {
  SuperresConfig cfg;
  ParametricState analytic = superres_state(cfg);
  ParametricState numeric = analytic.with_finite_difference({1e-5, false});
  for (double x : {0.05, 0.5}) {
    EXPECT_LT((derivative_at(analytic, x) - derivative_at(numeric, x)).norm(), 1e-9);
  }
}

TEST(SuperresState, SourceMatrixElements) {
  SuperresConfig cfg;
  for (double x : {0.1, 0.5, 1.0}) {
    ParametricState s = superres_state(cfg);
    Matrix drho = derivative_at(s, x);
    Vector plus = displaced_gaussian(0.5 * x, 1.0, 30);
    Vector minus = displaced_gaussian(-0.5 * x, 1.0, 30);
    oracle::SourceBlock b = oracle::source_block(x, cfg.q, 1.0);
    EXPECT_NEAR(std::abs(plus.dot(drho * plus) - cplx(b.pp)), 0.0, 1e-6);
    EXPECT_NEAR(std::abs(minus.dot(drho * minus) - cplx(b.mm)), 0.0, 1e-6);
    EXPECT_NEAR(std::abs(plus.dot(drho * minus) - cplx(b.pm)), 0.0, 1e-6);
  }
}

TEST(SuperresState, TruncationDoublingIsStable) {
  SuperresConfig cfg;
  for (double x : {1e-3, 0.05, 0.5, 1.0}) {
    EXPECT_LT(superres_truncation_defect(cfg, x), 1e-8) << x;
  }
}

TEST(SuperresState, ConfigValidation) {
  SuperresConfig bad_q;
  bad_q.q = 1.0;
  EXPECT_EQ(code_of([&] { superres_state(bad_q); }), Errc::InvalidConfig);
  SuperresConfig bad_sigma;
  bad_sigma.sigma = 0.0;
  EXPECT_EQ(code_of([&] { superres_state(bad_sigma); }), Errc::NonPositiveInput);
  SuperresConfig small;
  small.n_max = 1;
  EXPECT_EQ(code_of([&] { superres_state(small); }), Errc::DimensionTooSmall);
}

TEST(MomentumMatrix, Elements) {
  Matrix p = momentum_matrix(1.0, 30);
  EXPECT_LT(hermiticity_defect(p), 1e-15);
  EXPECT_EQ(std::abs(p(0, 0)), 0.0);
  EXPECT_NEAR(std::abs(p(0, 1) - cplx(0.0, -0.5)), 0.0, 1e-15);
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      EXPECT_NEAR(p(m, n).imag(), oracle::momentum_element_imag(m, n, 1.0), 1e-8)
          << m << "," << n;
      EXPECT_EQ(p(m, n).real(), 0.0);
    }
  }
  EXPECT_EQ(code_of([] { momentum_matrix(1.0, 1); }), Errc::DimensionTooSmall);
}

TEST(MomentumMatrix, SecondMomentAndPureQfi) {
  for (double sigma : {0.5, 1.0, 2.0}) {
    Matrix p = momentum_matrix(sigma, 30);
    Vector e0 = basis_vector(30, 0);
    double second = e0.dot(p * p * e0).real();
    EXPECT_NEAR(second, 1.0 / (4.0 * sigma * sigma), 1e-14);
    EXPECT_NEAR(second, oracle::momentum_second_moment(sigma), 1e-9);
    // A single source displaced by x: |psi(x)> = exp(-i P x)|psi0>.
    ParametricState single =
        unitary_state(exponential_family(p), outer(e0, e0));
    EXPECT_NEAR(qfi_at(single, 0.0), 1.0 / (sigma * sigma), 1e-10);
  }
}

TEST(SuperresTheory, Values) {
  SuperresTheory zero = superres_theory(0.0, 0.3, 0.01, 1.0);
  EXPECT_EQ(zero.eps0, 0.0);
  EXPECT_EQ(zero.eps1, 0.0);
  EXPECT_EQ(superres_theory(0.3, 0.5, 0.2, 1.0).eps0, 0.0);
  SuperresTheory t = superres_theory(1e-3, 0.3, 0.01, 1.0);
  // Arithmetic: 0.4 * 0.9 / (2 sqrt2 * 0.1) and sqrt(1.63) / 0.08.
  EXPECT_NEAR(t.eps0, 0.36 / (0.2 * std::sqrt(2.0)) * 1e-3, 1e-15);
  EXPECT_NEAR(t.eps0, 1.27279e-3, 1e-8);
  EXPECT_NEAR(t.eps1, std::sqrt(1.63) / 0.08 * 1e-3, 1e-15);
  EXPECT_NEAR(t.eps1, 1.59589e-2, 1e-7);
  EXPECT_EQ(code_of([] { superres_theory(1e-3, 0.3, 1.0, 1.0); }),
            Errc::LambdaOutOfRange);
}

TEST(GeneratorAt, SingleQubit) {
  UnitaryFamily f = exponential_family(pauli_z());
  for (double x : {0.0, 0.4, 2.0}) {
    Matrix h = generator_at(f, x);
    EXPECT_LT((h + pauli_z()).norm(), 5e-9);
    EXPECT_LT(hermiticity_defect(h), 1e-8);
  }
}

TEST(GeneratorAt, ConstantUnitaryHasNoGenerator) {
  Rng rng(20);
  Matrix u = random_unitary(3, rng);
  UnitaryFamily f;
  f.dim = 3;
  f.unitary = [u](ParamSpan) { return u; };
  EXPECT_LT(generator_at(f, 0.7).norm(), 1e-14);
}

TEST(GeneratorAt, TwoQubitDoesNotCoupleInitialStates) {
  Matrix h = generator_at(two_qubit_family(), 0.3);
  EXPECT_LT(std::abs(h(0, 1)), 1e-12);
  EXPECT_LT((h + kron(pauli_x(), pauli_x())).norm(), 5e-9);
}

TEST(QfiUnitaryMixed, TwoQubitIsFour) {
  for (double q1 : {0.1, 0.3, 0.7}) {
    SpectralData sd = spectral_of(two_qubit_initial(q1));
    for (double x : {0.0, 0.3, 1.1}) {
      Matrix h = generator_at(two_qubit_family(), x);
      EXPECT_NEAR(qfi_unitary_mixed(sd, h), 4.0, 1e-8);
      EXPECT_NEAR(qfi_at(two_qubit_state(q1), x), 4.0, 1e-8);
    }
  }
}

TEST(QfiUnitaryMixed, PureStateIsFourVariance) {
  Rng rng(21);
  for (int t = 0; t < 10; ++t) {
    Matrix rho = random_density(4, 1, rng);
    Matrix g = random_hermitian(4, rng);
    SpectralData sd = spectral_of(rho);
    Vector psi = sd.support().col(0);
    double mean = psi.dot(g * psi).real();
    double var = psi.dot(g * g * psi).real() - mean * mean;
    EXPECT_NEAR(qfi_unitary_mixed(sd, g), 4.0 * var, 1e-10);
  }
}

TEST(QfiUnitaryMixed, DegeneratePairMatchesGeneralSld) {
  Rng rng(22);
  Matrix v = random_unitary(4, rng);
  RealVector q(4);
  q << 0.5, 0.5, 0.0, 0.0;
  Matrix rho = v * q.cast<cplx>().asDiagonal() * v.adjoint();
  Matrix g = random_hermitian(4, rng);
  SpectralData sd = spectral_of(rho);
  ASSERT_EQ(sd.rank, 2);
  Matrix phi = sd.support();
  ASSERT_GT(std::abs(phi.col(0).dot(g * phi.col(1))), 1e-3);
  ParametricState s = unitary_state(exponential_family(g), rho);
  // The local generator of exp(-i g x) is -g; QFI is sign-invariant.
  EXPECT_NEAR(qfi_unitary_mixed(sd, -g), qfi_at(s, 0.0), 1e-7);
  EXPECT_NEAR(qfi_unitary_mixed(sd, g), qfi_at(s, 0.0), 1e-7);
}

TEST(QfiUnitaryMixed, RejectsCoupledNonDegeneratePair) {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 0.7;
  rho(1, 1) = 0.3;
  try {
    qfi_unitary_mixed(spectral_of(rho), pauli_x());
    FAIL() << "expected NotQuasiPure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotQuasiPure);
    EXPECT_NE(std::string(e.what()).find("pair (0, 1)"), std::string::npos);
  }
}

TEST(QfiUnitaryMixed, TwoQubitQuasiPureOnGrid) {
  ParametricState s = two_qubit_state(0.3);
  for (int i = 0; i < 20; ++i) {
    double x = -1.0 + 0.1 * i;
    EXPECT_LT(residual_spectral(s, x), 1e-10) << x;
  }
}

TEST(CsGate, Mapping) {
  Matrix cs = cs_gate(2, 2);
  // Basis index n * d_a + k with 0-based labels.
  EXPECT_EQ(cs(0, 0), cplx(1.0));  // |phi1>|1> -> |phi1>|1>
  EXPECT_EQ(cs(3, 2), cplx(1.0));  // |phi2>|1> -> |phi2>|2>
  EXPECT_EQ(cs(2, 3), cplx(1.0));  // |phi2>|2> wraps to |phi2>|1>
  for (auto [r, a] : {std::pair{1, 1}, {2, 3}, {3, 3}, {3, 5}}) {
    Matrix g = cs_gate(r, a);
    EXPECT_LT((g.adjoint() * g - identity(r * a)).norm(), 1e-12);
  }
  EXPECT_EQ(code_of([] { cs_gate(3, 2); }), Errc::DimensionTooSmall);
}

TEST(AncillaState, CorrelatedInitialState) {
  Rng rng(23);
  Matrix rho_i = random_density(4, 3, rng);
  SpectralData sd = spectral_of(rho_i);
  Matrix sigma = ancilla_initial(rho_i, 3);
  Matrix expected = Matrix::Zero(12, 12);
  for (Eigen::Index n = 0; n < 3; ++n) {
    Vector branch = kron(sd.support().col(n), basis_vector(3, n));
    expected += sd.eigenvalues(n) * outer(branch, branch);
  }
  EXPECT_LT((sigma - expected).norm(), 1e-12);
  EXPECT_EQ(code_of([&] { ancilla_initial(rho_i, 2); }), Errc::DimensionTooSmall);
}

TEST(AncillaState, QuasiPureForRandomInstances) {
  Rng rng(24);
  for (int t = 0; t < 10; ++t) {
    Matrix rho_i = random_density(4, 3, rng);
    ParametricState s = ancilla_state(rho_i, exponential_family(random_hermitian(4, rng)), 3);
    for (double x : {-0.5, 0.0, 0.8}) {
      EXPECT_LT(residual_spectral(s, x), 1e-9);
      EXPECT_TRUE(criteria_report(s, x).verdict);
    }
  }
}

TEST(AncillaState, QfiIsWeightedBranchQfi) {
  Rng rng(25);
  for (int t = 0; t < 10; ++t) {
    Matrix rho_i = random_density(4, 3, rng);
    Matrix g = random_hermitian(4, rng);
    ParametricState s = ancilla_state(rho_i, exponential_family(g), 3);
    SpectralData sd = spectral_of(rho_i);
    double x = 0.3;
    double expected = 0.0;
    for (Eigen::Index n = 0; n < 3; ++n) {
      Vector phi = expm_hermitian(g, x) * sd.support().col(n);
      Vector dphi = -kI * (g * phi);
      expected += sd.eigenvalues(n) * qfi_pure(phi, dphi);
    }
    EXPECT_NEAR(qfi_at(s, x), expected, 1e-8 * std::max(1.0, expected));
  }
}

TEST(AncillaState, PureInitialStateStaysPure) {
  Rng rng(26);
  Matrix rho_i = random_density(3, 1, rng);
  Matrix g = random_hermitian(3, rng);
  ParametricState s = ancilla_state(rho_i, exponential_family(g), 1);
  Matrix sigma = density_at(s, 0.4);
  EXPECT_NEAR((sigma * sigma).trace().real(), 1.0, 1e-12);
  Vector psi = spectral_of(rho_i).support().col(0);
  double mean = psi.dot(g * psi).real();
  double var = psi.dot(g * g * psi).real() - mean * mean;
  EXPECT_NEAR(qfi_at(s, 0.4), 4.0 * var, 1e-8);
}

TEST(AncillaState, CommutingGeneratorsHaveNoPartialCommutator) {
  Rng rng(27);
  for (int t = 0; t < 10; ++t) {
    ParametricState s = random_ancilla_family(3, 2, rng, 2, true);
    std::vector<double> x = {0.2, -0.4};
    EXPECT_LT(partial_comm_residual(s, x), 1e-9);
  }
}

}  // namespace
}  // namespace qps
