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
#include <unsupported/Eigen/MatrixFunctions>

#include "fluxsim/device.hpp"
#include "fluxsim/hamiltonian.hpp"

namespace fluxsim {
namespace {

FluxoniumParams qa(double phi = 0.5) {
  FluxoniumParams p = device_qubit_a();
  p.phi_ext = phi;
  return p;
}

double w10(const FluxoniumParams& p) { return transition_frequencies(p).omega10; }

// Spectrum in the Fock basis of the E_J = 0 oscillator, truncated after
// exponentiation. Independent of the grid discretization.
VectorXd oscillator_basis_energies(const FluxoniumParams& p, int keep) {
  const int big = 260;
  MatrixXcd a = MatrixXcd::Zero(big, big);
  for (int k = 1; k < big; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const double phi_zpf = std::pow(8.0 * p.ec / p.el, 0.25) / std::sqrt(2.0);
  MatrixXcd theta = phi_zpf * (a + a.adjoint());
  MatrixXcd eip = (kI * theta).exp();
  MatrixXcd cos_t = 0.5 * (eip + eip.adjoint());
  MatrixXcd sin_t = -0.5 * kI * (eip - eip.adjoint());
  const double s = kTwoPi * p.phi_ext;
  // cos(phi) with phi = theta - s
  MatrixXcd cos_phi = std::cos(s) * cos_t + std::sin(s) * sin_t;
  MatrixXcd h = -p.ej * cos_phi;
  const double wp = std::sqrt(8.0 * p.ec * p.el);
  for (int k = 0; k < big; ++k) h(k, k) += wp * (k + 0.5);
  const int n = 180;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.topLeftCorner(n, n));
  return es.eigenvalues().head(keep);
}

TEST(Hamiltonian, HarmonicLimitSpacing) {
  for (double phi : {0.0, 0.13, 0.5, 0.77}) {
    FluxoniumParams p{1.398, 0.523, 0.0, phi};
    VectorXd e = solve_fluxonium(p, 6).energies;
    const double expected = std::sqrt(8.0 * p.ec * p.el);
    EXPECT_NEAR(expected, 2.4186, 1e-4);
    for (int k = 0; k < 5; ++k)
      EXPECT_NEAR((e(k + 1) - e(k)) / expected, 1.0, 1e-6) << "level " << k;
  }
}

TEST(Hamiltonian, HarmonicLimitFluxIndependent) {
  const double ref = w10({1.398, 0.523, 0.0, 0.5});
  for (double phi : {0.0, 0.13, 0.31, 0.77, 1.42}) {
    double w = w10({1.398, 0.523, 0.0, phi});
    EXPECT_NEAR(w / ref, 1.0, 1e-9) << "phi " << phi;
  }
}

TEST(Hamiltonian, DeviceQubitAFrequencies) {
  TransitionFrequencies t = transition_frequencies(qa());
  EXPECT_NEAR(t.omega10, 1.09, 0.010);
  EXPECT_NEAR(t.omega21, 3.02, 0.010);
}

TEST(Hamiltonian, DeviceQubitAAnharmonicity) {
  EXPECT_NEAR(transition_frequencies(qa()).anharmonicity, 1.771, 0.02);
}

TEST(Hamiltonian, DeviceQubitBFrequencies) {
  TransitionFrequencies t = transition_frequencies(device_qubit_b());
  EXPECT_NEAR(t.omega10, 1.33, 0.010);
  EXPECT_NEAR(t.omega21, 3.20, 0.010);
}

TEST(Hamiltonian, DeviceSpectrumRegressionAnchors) {
  TransitionFrequencies a = transition_frequencies(qa());
  TransitionFrequencies b = transition_frequencies(device_qubit_b());
  EXPECT_NEAR(a.omega10, 1.0574866, 1e-6);
  EXPECT_NEAR(a.omega21, 3.0632585, 1e-6);
  EXPECT_NEAR(b.omega10, 1.3130912, 1e-6);
  EXPECT_NEAR(b.omega21, 3.2006046, 1e-6);
}

TEST(Hamiltonian, MatchesOscillatorBasisOracle) {
  for (const FluxoniumParams& p : {qa(), qa(0.43), device_qubit_b()}) {
    VectorXd grid = lowest_energies(p, 4);
    VectorXd fock = oscillator_basis_energies(p, 4);
    for (int k = 1; k < 4; ++k)
      EXPECT_NEAR(grid(k) - grid(0), fock(k) - fock(0), 1e-6) << "level " << k;
  }
}

TEST(Hamiltonian, GridConvergence) {
  FluxGrid fine;
  fine.n_points = 1601;
  double coarse = w10(qa());
  double refined = transition_frequencies(qa(), fine).omega10;
  EXPECT_LT(std::abs(coarse - refined), 1e-6);
}

TEST(Hamiltonian, WallTailsNegligible) {
  for (const FluxoniumParams& p : {qa(), device_qubit_b()}) {
  Eigenbasis b = solve_fluxonium(p, 3);
  for (int i = 0; i < 3; ++i) {
    VectorXd psi = b.states.col(i) / std::sqrt(FluxGrid{}.step());
    EXPECT_LT(std::abs(psi(0)), 1e-10) << "level " << i;
    EXPECT_LT(std::abs(psi(psi.size() - 1)), 1e-10) << "level " << i;
  }
  }
}

TEST(Hamiltonian, BuildRejectsNonFinite) {
  EXPECT_THROW(build_hamiltonian({NAN, 0.5, 2.0, 0.5}), InvalidArgument);
  EXPECT_THROW(build_hamiltonian({1.0, 0.5, 2.0, INFINITY}), InvalidArgument);
  EXPECT_THROW(build_hamiltonian({-1.0, 0.5, 2.0, 0.5}), InvalidArgument);
  FluxGrid even;
  even.n_points = 800;
  EXPECT_THROW(build_hamiltonian(qa(), even), InvalidArgument);
}

TEST(Hamiltonian, BuildIsSymmetricPentadiagonal) {
  FluxGrid g;
  g.n_points = 201;
  MatrixXd h = build_hamiltonian(qa(), g);
  EXPECT_EQ(h.rows(), 201);
  EXPECT_EQ((h - h.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(h(0, 3), 0.0);
  EXPECT_NE(h(0, 2), 0.0);
}

TEST(Eigensolve, IdentityScaledIsDegenerateButOrthonormal) {
  FluxGrid g;
  g.n_points = 201;
  MatrixXd h = 3.5 * MatrixXd::Identity(201, 201);
  Eigenbasis b = eigensolve(h, 6, g);
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(b.energies(i), 3.5, 1e-12);
    EXPECT_TRUE(b.degenerate[i]);
  }
  MatrixXd gram = b.states.transpose() * b.states;
  EXPECT_LT((gram - MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Eigensolve, RejectsBadLevelCount) {
  FluxGrid g;
  g.n_points = 201;
  MatrixXd h = MatrixXd::Identity(201, 201);
  EXPECT_THROW(eigensolve(h, 0, g), InvalidArgument);
  EXPECT_THROW(eigensolve(h, 202, g), InvalidArgument);
}

TEST(Eigensolve, SweetSpotParitySelection) {
  Eigenbasis b = solve_fluxonium(qa(), 8);
  EXPECT_LT(std::abs(b.n_mat(0, 2)), 1e-8);
  EXPECT_GT(std::abs(b.n_mat(0, 1)), 0.1);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if ((i + j) % 2 == 0) {
        EXPECT_LT(std::abs(b.n_mat(i, j)), 1e-8) << i << "," << j;
      }
}

TEST(Eigensolve, OrthonormalAndHermitian) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    FluxoniumParams p{0.8 + u(rng), 0.3 + 0.5 * u(rng), 1.0 + 3.0 * u(rng), u(rng)};
    Eigenbasis b = solve_fluxonium(p, 10);
    MatrixXd gram = b.states.transpose() * b.states;
    EXPECT_LT((gram - MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((b.n_mat - b.n_mat.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((b.phi_mat - b.phi_mat.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    for (int i = 0; i + 1 < 10; ++i) EXPECT_LE(b.energies(i), b.energies(i + 1));
  }
}

TEST(Eigensolve, SignConventionIsReproducible) {
  Eigenbasis b1 = solve_fluxonium(qa(0.47), 5);
  Eigenbasis b2 = solve_fluxonium(qa(0.47), 5);
  EXPECT_EQ((b1.n_mat - b2.n_mat).cwiseAbs().maxCoeff(), 0.0);
  for (int i = 0; i < 5; ++i) {
    const VectorXd v = b1.states.col(i);
    const double peak = v.cwiseAbs().maxCoeff();
    for (int k = 0; k < v.size(); ++k)
      if (std::abs(v(k)) > 1e-6 * peak) {
        EXPECT_GT(v(k), 0.0);
        break;
      }
  }
}

TEST(Eigensolve, BandedAndDenseAgree) {
  VectorXd banded = lowest_energies(qa(0.44), 6);
  VectorXd dense = solve_fluxonium(qa(0.44), 6).energies;
  EXPECT_LT((banded - dense).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Spectrum, SymmetricAboutHalfFlux) {
  EXPECT_NEAR(w10(qa(0.42)) / w10(qa(0.58)), 1.0, 1e-9);
  EXPECT_NEAR(w10(qa(0.31)) / w10(qa(0.69)), 1.0, 1e-9);
}

TEST(Spectrum, PeriodicInFlux) {
  for (double phi : {0.1, 0.42, 0.5, 0.66}) {
    double w = w10(qa(phi));
    EXPECT_NEAR(w10(qa(phi + 1.0)) / w, 1.0, 1e-9);
    EXPECT_NEAR(w10(qa(phi - 2.0)) / w, 1.0, 1e-9);
  }
}

TEST(FluxSensitivity, ZeroAtSweetSpot) {
  EXPECT_LT(std::abs(flux_sensitivity(qa())), 1e-4);
}

TEST(FluxSensitivity, AntisymmetricAboutHalfFlux) {
  double lo = flux_sensitivity(qa(0.45));
  double hi = flux_sensitivity(qa(0.55));
  EXPECT_NEAR(lo / -hi, 1.0, 1e-6);
  EXPECT_GT(std::abs(lo), 0.1);
}

TEST(FluxSensitivity, MatchesFivePointStencil) {
  const double h = 2e-4, x = 0.48;
  double oracle = (w10(qa(x - 2 * h)) - 8 * w10(qa(x - h)) + 8 * w10(qa(x + h)) -
                   w10(qa(x + 2 * h))) / (12 * h);
  EXPECT_NEAR(flux_sensitivity(qa(x)) / oracle, 1.0, 1e-6);
  EXPECT_THROW(flux_sensitivity(qa(x), {}, 1e-2), InvalidArgument);
}

std::vector<SpectrumPoint> synthetic_data(const FluxoniumParams& truth, double noise_ghz,
                                          unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, noise_ghz);
  std::vector<SpectrumPoint> data;
  for (int i = 0; i < 15; ++i) {
    double phi = 0.38 + 0.24 * i / 14.0;
    FluxoniumParams p = truth;
    p.phi_ext = phi;
    TransitionFrequencies t = transition_frequencies(p);
    Transition label = i % 3 == 2 ? Transition::kOmega20 : Transition::kOmega10;
    double f = label == Transition::kOmega10 ? t.omega10 : t.omega20;
    data.push_back({phi, label, f + (noise_ghz > 0 ? n(rng) : 0.0)});
  }
  return data;
}

TEST(FitSpectrum, RoundTripFromPerturbedGuess) {
  const FluxoniumParams truth = qa();
  auto data = synthetic_data(truth, 1e-6, 5);
  FluxoniumParams guess{truth.ec * 1.2, truth.el * 0.8, truth.ej * 1.2, 0.5};
  SpectrumFit fit = fit_spectrum(data, guess);
  EXPECT_NEAR(fit.params.ec / truth.ec, 1.0, 0.01);
  EXPECT_NEAR(fit.params.el / truth.el, 1.0, 0.01);
  EXPECT_NEAR(fit.params.ej / truth.ej, 1.0, 0.01);
  EXPECT_LT(fit.rms, 1e-5);
}

TEST(FitSpectrum, DataAtGuessNeedsNoIterations) {
  auto data = synthetic_data(qa(), 0.0, 1);
  SpectrumFit fit = fit_spectrum(data, qa());
  EXPECT_EQ(fit.iterations, 0);
  EXPECT_LT(fit.rms, 1e-9);
}

TEST(FitSpectrum, RejectsUnderdeterminedData) {
  std::vector<SpectrumPoint> one{{0.5, Transition::kOmega10, 1.09}};
  EXPECT_THROW(fit_spectrum(one, qa()), InvalidArgument);
  auto narrow = synthetic_data(qa(), 0.0, 1);
  for (auto& d : narrow) d.phi_ext = 0.5 + 0.01 * (d.phi_ext - 0.5);
  EXPECT_THROW(fit_spectrum(narrow, qa()), InvalidArgument);
}

TEST(Coupled, UncoupledEigenvaluesAreSums) {
  CoupledModel m(device_system(0.0));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.hamiltonian(0.5, 0.5));
  std::vector<double> sums;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      sums.push_back(m.basis_a().energies(i) + m.basis_b().energies(j));
  std::sort(sums.begin(), sums.end());
  for (int k = 0; k < 64; ++k) EXPECT_NEAR(es.eigenvalues()(k), sums[k], 1e-10);
}

TEST(Coupled, HermitianForRandomInputs) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    CoupledSystem s = device_system(0.3 * u(rng), 5);
    CoupledModel m(s);
    MatrixXcd h = m.hamiltonian_complex(0.4 + 0.2 * u(rng), 0.4 + 0.2 * u(rng));
    EXPECT_EQ(h.rows(), 25);
    EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Coupled, FluxOffsetMatchesDirectSolve) {
  CoupledModel m(device_system(0.0, 12));
  double truncated = bare_frequency(m, 0, 0.53);
  EXPECT_NEAR(truncated, w10(qa(0.53)), 1e-6);
}

TEST(Coupled, DimensionGuard) {
  EXPECT_THROW(CoupledModel(device_system(0.1, 65)), InvalidArgument);
  EXPECT_THROW(CoupledModel(device_system(0.1, 3)), InvalidArgument);
}

TEST(Exchange, UncoupledSplittingVanishes) {
  CoupledModel m(device_system(0.0));
  EXPECT_LT(exchange_splitting(m).splitting_mhz, 1e-6);
}

TEST(Exchange, CalibratedCouplingReproducesSplitting) {
  double jc = calibrate_coupling(device_system(0.0), kExchangeSplittingMhz);
  EXPECT_NEAR(jc, kCalibratedJcGhz, 1e-6);
  CoupledModel m(device_system(kCalibratedJcGhz));
  EXPECT_NEAR(exchange_splitting(m).splitting_mhz, 11.2, 0.1);
}

TEST(Exchange, SplittingFollowsHyperbola) {
  CoupledModel m(device_system());
  ExchangeSplitting ex = exchange_splitting(m);
  const double g = ex.splitting_mhz;
  const double w0 = bare_frequency(m, 0, ex.phi_a_minimum);
  for (double d : {-4e-3, -2e-3, -1e-3, 5e-4, 1.5e-3, 3e-3}) {
    double phi = ex.phi_a_minimum + d;
    double delta = 1e3 * (bare_frequency(m, 0, phi) - w0);
    if (std::abs(delta) > 30.0) continue;
    double expected = std::sqrt(g * g + delta * delta);
    EXPECT_NEAR(single_excitation_gap_mhz(m, phi) / expected, 1.0, 0.01) << "delta " << delta;
  }
}

TEST(ZZ, VanishesWithoutCoupling) {
  EXPECT_LT(std::abs(zz_rate(CoupledModel(device_system(0.0)))), 1e-10);
}

TEST(ZZ, CalibratedDeviceAnchor) {
  double zz = zz_rate(CoupledModel(device_system()));
  EXPECT_NEAR(zz, -0.22504, 1e-4);
  EXPECT_GT(std::abs(zz), kReportedZzMhz / 3.0);
  EXPECT_LT(std::abs(zz), kReportedZzMhz * 3.0);
}

}  // namespace
}  // namespace fluxsim
