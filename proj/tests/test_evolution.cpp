// Copyright 2026 The fluxsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fluxsim/evolution.hpp"
#include "fluxsim/optimize.hpp"

namespace fluxsim {
namespace {

MatrixXcd random_hermitian(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (m + m.adjoint());
}

TimeDependentHamiltonian driven_three_level(TimeDependentHamiltonian::Reference ref) {
  TimeDependentHamiltonian h;
  h.h0 = MatrixXcd::Zero(3, 3);
  h.h0(1, 1) = 1.2;
  h.h0(2, 2) = 2.1;
  MatrixXcd op = MatrixXcd::Zero(3, 3);
  op(0, 1) = cplx(0.0, -0.7);
  op(1, 0) = cplx(0.0, 0.7);
  op(1, 2) = 1.0;
  op(2, 1) = 1.0;
  MatrixXcd flux = MatrixXcd::Zero(3, 3);
  flux(1, 1) = 0.4;
  flux(2, 2) = 0.9;
  h.ops = {op, flux};
  h.coefficients = [](double t, double* c) {
    c[0] = 0.08 * std::sin(kPi * t / 6.0) * std::cos(kTwoPi * 1.2 * t);
    c[1] = 0.3 * std::tanh(t - 2.0) - 0.2 * std::exp(-(t - 4.0) * (t - 4.0));
  };
  h.reference = ref;
  return h;
}

TEST(Evolve, FreeEvolutionClosedForm) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 9.0);
  for (auto ref : {TimeDependentHamiltonian::Reference::kStatic,
                   TimeDependentHamiltonian::Reference::kFrozen}) {
    TimeDependentHamiltonian h;
    VectorXd e(6);
    for (int i = 0; i < 6; ++i) e(i) = u(rng);
    h.h0 = e.cast<cplx>().asDiagonal();
    h.reference = ref;
    const MatrixXcd got = propagator(h, 0.0, 10.0);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        const cplx want = i == j ? std::polar(1.0, -kTwoPi * e(i) * 10.0) : cplx(0.0);
        EXPECT_LT(std::abs(got(i, j) - want), 1e-9);
      }
  }
}

TEST(Evolve, NormAndUnitarity) {
  std::mt19937_64 rng(2);
  TimeDependentHamiltonian h;
  h.h0 = random_hermitian(rng, 8, 1.0);
  h.ops = {random_hermitian(rng, 8, 0.3)};
  h.coefficients = [](double t, double* c) { c[0] = std::sin(3.0 * t) + 0.5 * std::cos(7.1 * t); };
  for (auto ref : {TimeDependentHamiltonian::Reference::kStatic,
                   TimeDependentHamiltonian::Reference::kFrozen}) {
    h.reference = ref;
    std::vector<double> stops;
    for (int k = 1; k <= 12; ++k) stops.push_back(0.5 * k);
    const auto states = evolve(h, MatrixXcd::Identity(8, 8), 0.0, stops);
    for (const auto& s : states) {
      for (int j = 0; j < 8; ++j) EXPECT_NEAR(s.col(j).norm(), 1.0, 1e-9);
      EXPECT_LT(unitarity_defect(s), 1e-8);
    }
  }
}

TEST(Evolve, StaticAndFrozenAgreeWithTrotter) {
  const MatrixXcd psi0 = MatrixXcd::Identity(3, 3);
  const auto hs = driven_three_level(TimeDependentHamiltonian::Reference::kStatic);
  const auto hf = driven_three_level(TimeDependentHamiltonian::Reference::kFrozen);
  const MatrixXcd us = evolve(hs, psi0, 0.0, 6.0);
  const MatrixXcd uf = evolve(hf, psi0, 0.0, 6.0);
  const MatrixXcd ut = evolve_trotter(hs, psi0, 0.0, 6.0, 1e-3);
  EXPECT_LT((us - uf).cwiseAbs().maxCoeff(), 1e-8);
  // Midpoint products carry O(dt^2) error.
  EXPECT_LT((us - ut).cwiseAbs().maxCoeff(), 1e-5);
  const MatrixXcd ut2 = evolve_trotter(hs, psi0, 0.0, 6.0, 5e-4);
  EXPECT_LT((us - ut2).cwiseAbs().maxCoeff(), 0.3 * (us - ut).cwiseAbs().maxCoeff());
}

TEST(Evolve, TighterTolerancesConverge) {
  const auto h = driven_three_level(TimeDependentHamiltonian::Reference::kFrozen);
  EvolutionOptions tight;
  tight.rel_tol = 5e-11;
  tight.abs_tol = 5e-13;
  const MatrixXcd a = propagator(h, 0.0, 6.0);
  const MatrixXcd b = propagator(h, 0.0, 6.0, tight);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-8);
}

// Two-level rotating-wave oracle: diag(0, ω) driven by Ω cos(2πωt) X
// gives P1 = sin²(π Ω t), period 1/Ω = 1/(2 Ω̃) with Ω̃ = Ω/2.
TEST(Evolve, RabiPeriodWeakDrive) {
  const double omega = 1.0;
  const double drive = 0.004;
  TimeDependentHamiltonian h;
  h.h0 = MatrixXcd::Zero(2, 2);
  h.h0(1, 1) = omega;
  MatrixXcd x = MatrixXcd::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  h.ops = {x};
  h.coefficients = [&](double t, double* c) { c[0] = drive * std::cos(kTwoPi * omega * t); };
  MatrixXcd psi0 = MatrixXcd::Zero(2, 1);
  psi0(0, 0) = 1.0;
  auto p1 = [&](double t) { return std::norm(evolve(h, psi0, 0.0, t)(1, 0)); };
  const double half = 0.5 / drive;
  const ScalarMin peak = brent_minimize([&](double t) { return -p1(t); }, 0.8 * half, 1.2 * half, 30);
  const double period = 2.0 * peak.x;
  EXPECT_NEAR(period / (1.0 / (2.0 * (drive / 2.0))), 1.0, 0.01);
  EXPECT_GT(-peak.f, 0.99);
}

TEST(Evolve, StepUnderflowCarriesTime) {
  TimeDependentHamiltonian h;
  h.h0 = MatrixXcd::Zero(2, 2);
  MatrixXcd x = MatrixXcd::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  h.ops = {x};
  h.coefficients = [](double t, double* c) { c[0] = 1e4 * std::cos(1e4 * t); };
  EvolutionOptions o;
  o.min_step = 1e-3;
  try {
    propagator(h, 0.0, 1.0, o);
    FAIL() << "expected a step-size underflow";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("t = "), std::string::npos);
  }
}

TEST(Evolve, RejectsBadInput) {
  TimeDependentHamiltonian h;
  h.h0 = MatrixXcd::Identity(2, 2);
  MatrixXcd bad = MatrixXcd::Zero(2, 1);
  bad(0, 0) = 2.0;
  EXPECT_THROW(evolve(h, bad, 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(evolve(h, MatrixXcd::Identity(3, 3), 0.0, 1.0), InvalidArgument);
  EvolutionOptions loose;
  loose.rel_tol = 1e-5;
  EXPECT_THROW(propagator(h, 0.0, 1.0, loose), InvalidArgument);
  EXPECT_THROW(evolve(h, MatrixXcd::Identity(2, 2), 1.0, std::vector<double>{0.5}), InvalidArgument);
}

TEST(HermitianExp, MatchesTaylorForSmallStep) {
  std::mt19937_64 rng(3);
  const MatrixXcd h = random_hermitian(rng, 4, 1.0);
  const double t = 1e-4;
  const MatrixXcd a = -kI * kTwoPi * t * h;
  const MatrixXcd taylor = MatrixXcd::Identity(4, 4) + a + 0.5 * a * a + a * a * a / 6.0;
  EXPECT_LT((hermitian_exp(h, t) - taylor).cwiseAbs().maxCoeff(), 1e-12);
}

}  // namespace
}  // namespace fluxsim
