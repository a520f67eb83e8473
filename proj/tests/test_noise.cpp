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
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "fluxsim/device.hpp"
#include "fluxsim/noise.hpp"
#include "fluxsim/optimize.hpp"

namespace fluxsim {
namespace {

// Γφ2,R (1/µs) of Q_A at Φ_ext = 0.48 for A_R = 4.3 µΦ0, f_ir = 1 Hz; regression anchor.
constexpr double kRamseyAnchor = 0.27643031048772188;

Matrix2cd random_density(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix2cd a;
  a << cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
  Matrix2cd rho = a * a.adjoint();
  return rho / rho.trace();
}

TEST(CoherenceLimit, Endpoints) {
  EXPECT_DOUBLE_EQ(coherence_limit_fidelity(0.0, 50.0, 30.0), 1.0);
  EXPECT_NEAR(coherence_limit_fidelity(1e12, 50.0, 30.0), 0.5, 1e-15);
}

TEST(CoherenceLimit, DeviceValues) {
  EXPECT_NEAR(coherence_limit_fidelity(10.0, 57.0, 17.0), 0.99977, 5e-6);
  EXPECT_NEAR(coherence_limit_fidelity(10.0, 80.0, 30.0), 0.99987, 5e-6);
}

TEST(CoherenceLimit, Monotone) {
  double prev = 1.0;
  for (double t = 0.0; t < 1e5; t += 937.0) {
    const double f = coherence_limit_fidelity(t, 40.0, 20.0);
    EXPECT_LE(f, prev);
    prev = f;
    EXPECT_LE(f, coherence_limit_fidelity(t, 41.0, 20.0));
    EXPECT_LE(f, coherence_limit_fidelity(t, 40.0, 21.0));
  }
}

TEST(BlochRedfield, GroundStateFixed) {
  Matrix2cd g = Matrix2cd::Zero();
  g(0, 0) = 1.0;
  EXPECT_LT((bloch_redfield_apply(g, 1e4, 50.0, 30.0) - g).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BlochRedfield, ExcitedDecaysToInverseE) {
  Matrix2cd e = Matrix2cd::Zero();
  e(1, 1) = 1.0;
  EXPECT_NEAR(bloch_redfield_apply(e, 50e3, 50.0, 30.0)(1, 1).real(), std::exp(-1.0), 1e-15);
}

TEST(BlochRedfield, TraceAndPositivity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double t1 = 1.0 + 100.0 * u(rng);
    const double t2 = 2.0 * t1 * u(rng) + 1e-3;
    const Matrix2cd out = bloch_redfield_apply(random_density(rng), 1e4 * u(rng), t1, t2);
    EXPECT_NEAR(out.trace().real(), 1.0, 1e-15);
    EXPECT_NEAR(out.trace().imag(), 0.0, 1e-15);
    Eigen::SelfAdjointEigenSolver<Matrix2cd> es(out);
    EXPECT_GE(es.eigenvalues()(0), -1e-14);
  }
}

TEST(BlochRedfield, RejectsInvalidState) {
  Matrix2cd bad = Matrix2cd::Identity();
  EXPECT_THROW(bloch_redfield_apply(bad, 1.0, 10.0, 10.0), InvalidArgument);
  Matrix2cd neg;
  neg << 1.5, 0.0, 0.0, -0.5;
  EXPECT_THROW(bloch_redfield_apply(neg, 1.0, 10.0, 10.0), InvalidArgument);
  Matrix2cd g = Matrix2cd::Zero();
  g(0, 0) = 1.0;
  EXPECT_THROW(bloch_redfield_apply(g, 1.0, 10.0, 30.0), InvalidArgument);
}

// Monte-Carlo Haar average of <ψ|E_t(ψ)|ψ>.
TEST(BlochRedfield, HaarAverageMatchesCoherenceLimit) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  const double t = 5000.0, t1 = 20.0, t2 = 12.0;
  double acc = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    Eigen::Vector2cd psi(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)));
    psi.normalize();
    const Matrix2cd rho = psi * psi.adjoint();
    acc += (psi.adjoint() * bloch_redfield_apply(rho, t, t1, t2) * psi)(0, 0).real();
  }
  EXPECT_NEAR(acc / n, coherence_limit_fidelity(t, t1, t2), 1e-3);
}

TEST(EchoRate, ZeroAtSweetSpotAndLinear) {
  EXPECT_EQ(echo_gaussian_rate(5.9, 0.0), 0.0);
  EXPECT_NEAR(echo_gaussian_rate(11.8, 2.0), 2.0 * echo_gaussian_rate(5.9, 2.0), 1e-15);
  // A = 1 µΦ0, slope 1 GHz/Φ0: 1e-6 sqrt(ln 2) 2π 1e3 per µs.
  EXPECT_NEAR(echo_gaussian_rate(1.0, 1.0), 1e-3 * std::sqrt(std::log(2.0)) * kTwoPi, 1e-18);
}

TEST(EchoRate, GrowsAwayFromSweetSpot) {
  double prev = 0.0;
  for (double phi : {0.5, 0.495, 0.49, 0.48, 0.47}) {
    FluxoniumParams p = device_qubit_a();
    p.phi_ext = phi;
    const double rate = echo_gaussian_rate(5.9, flux_sensitivity(p));
    if (phi < 0.5) EXPECT_GT(rate, prev);
    prev = rate;
  }
}

double ramsey_by_bisection(double a, double slope, double f_ir) {
  const double lo = 1.0001 * kTwoPi * f_ir * 1e-6;
  auto g = [&](double x) { return x - ramsey_rhs(x, a, slope, f_ir); };
  // Stable branch: above the echo rate the residual is increasing.
  double hi = echo_gaussian_rate(a, slope);
  while (g(hi) < 0) hi *= 2.0;
  double start = echo_gaussian_rate(a, slope);
  if (g(start) > 0) start = std::max(lo, start * 0.5);
  return bisect_root(g, start, hi, 1e-16);
}

TEST(RamseyRate, FixedPointAndBisectionOracle) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ua(1.0, 10.0), us(0.1, 20.0), uf(0.1, 10.0);
  for (int k = 0; k < 100; ++k) {
    const double a = ua(rng), s = us(rng), f = uf(rng);
    const RamseyRate r = ramsey_gaussian_rate(a, s, f);
    EXPECT_NEAR(ramsey_rhs(r.rate, a, s, f) / r.rate, 1.0, 1e-10);
    EXPECT_NEAR(ramsey_by_bisection(a, s, f) / r.rate, 1.0, 1e-9);
    if (std::log(r.rate * 1e6 / (kTwoPi * f)) > std::log(2.0))
      EXPECT_GT(r.rate, echo_gaussian_rate(a, s));
  }
}

TEST(RamseyRate, DeviceAnchor) {
  FluxoniumParams p = device_qubit_a();
  p.phi_ext = 0.48;
  const double slope = flux_sensitivity(p);
  const RamseyRate r = ramsey_gaussian_rate(4.3, slope, 1.0);
  EXPECT_NEAR(r.rate, kRamseyAnchor, 1e-9 * kRamseyAnchor);
  EXPECT_NEAR(ramsey_by_bisection(4.3, slope, 1.0) / r.rate, 1.0, 1e-9);
}

TEST(RamseyRate, RejectsZeroSlope) {
  EXPECT_THROW(ramsey_gaussian_rate(4.3, 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(ramsey_gaussian_rate(4.3, 1e-9, 1.0), NumericalError);
}

TEST(Visibility, Limits) {
  EXPECT_DOUBLE_EQ(t2_visibility(0.0, 0.1, 0.2, 0.3, 0.4, 0.1), 0.5);
  EXPECT_NEAR(t2_visibility(3.0, 0.1, 0.2, 0.0, 1.0, 0.0), std::exp(-0.15 - 0.6), 1e-15);
}

TEST(Visibility, FitRoundTrip) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> ug1(1.0 / 100.0, 1.0 / 30.0), ugp1(0.005, 0.05), ugp2(0.01, 0.08);
  for (int k = 0; k < 100; ++k) {
    const double g1 = ug1(rng), gp1 = ugp1(rng), gp2 = ugp2(rng);
    std::vector<double> t, v;
    for (int i = 0; i < 120; ++i) {
      t.push_back(0.5 * i);
      v.push_back(t2_visibility(t.back(), g1, gp1, gp2, 0.45, 0.5));
    }
    const VisibilityFit f = fit_t2_visibility(t, v, g1);
    EXPECT_TRUE(f.converged);
    EXPECT_NEAR(f.gamma_phi1 / gp1, 1.0, 1e-6);
    EXPECT_NEAR(f.gamma_phi2 / gp2, 1.0, 1e-6);
  }
}

TEST(DielectricT1, ZeroLossTangentHasNoBound) {
  EXPECT_FALSE(dielectric_t1(1.0, 2.0, 1.4, 0.0, 0.03).has_value());
  EXPECT_THROW(dielectric_t1(1.0, 2.0, 1.4, 1e-6, 0.0), InvalidArgument);
}

TEST(DielectricT1, LinearInLossTangent) {
  const double a = *dielectric_t1(1.0, 2.0, 1.4, 2e-6, 1e-4);
  const double b = *dielectric_t1(1.0, 2.0, 1.4, 1e-6, 1e-4);
  EXPECT_NEAR(b / a, 2.0, 1e-12);
  // Cold limit: Γ1 = ω²/(8π E_C) tanδ φ01².
  const double rate = std::pow(kTwoPi, 2) / (8.0 * kPi * 1.4) * 1e-6 * 4.0;
  EXPECT_NEAR(b, 1e-3 / rate, 1e-9 * b);
}

TEST(DielectricT1, DeviceBand) {
  const double t1 = *dielectric_t1(device_qubit_a(), 1.7e-6, 0.030);
  EXPECT_GE(t1, 40.0);
  EXPECT_LE(t1, 90.0);
}

TEST(LossTangent, Values) {
  EXPECT_NEAR(loss_tangent(1.09, 80.0), 1.8e-6, 0.05e-6);
  EXPECT_NEAR(loss_tangent(1.09, 160.0), 0.5 * loss_tangent(1.09, 80.0), 1e-20);
  EXPECT_NEAR(loss_tangent(1.0 / kTwoPi, 1.0), 1e-3, 1e-18);
}

TEST(Thermal, DeviceTemperature) {
  EXPECT_NEAR(effective_temperature_mk(0.1354, 1.09), 28.0, 0.5);
}

TEST(Thermal, InverseAndLimits) {
  EXPECT_EQ(thermal_population(0.0, 1.0), 0.0);
  EXPECT_LT(thermal_population(1.0, 1.0), 1e-20);
  for (double p : {1e-4, 0.01, 0.1354, 0.3, 0.49})
    EXPECT_NEAR(thermal_population(effective_temperature_mk(p, 1.09), 1.09), p, 1e-12);
  EXPECT_THROW(effective_temperature_mk(0.5, 1.0), InvalidArgument);
}

std::vector<double> mixture(std::mt19937_64& rng, int n, double p1, double x0, double x1, double s) {
  std::bernoulli_distribution pick(p1);
  std::normal_distribution<double> g(0.0, s);
  std::vector<double> out(n);
  for (double& x : out) x = (pick(rng) ? x1 : x0) + g(rng);
  return out;
}

TEST(DoubleGaussian, RecoversPopulation) {
  std::mt19937_64 rng(15);
  const Histogram h = make_histogram(mixture(rng, 100000, 0.1354, -1.0, 1.0, 0.3), 80, -2.5, 2.5);
  const DoubleGaussianFit f = fit_double_gaussian(h);
  EXPECT_FALSE(f.degenerate);
  EXPECT_NEAR(f.p1, 0.1354, 0.005);
  EXPECT_NEAR(f.x0, -1.0, 0.01);
  EXPECT_NEAR(f.x1, 1.0, 0.02);
}

TEST(DoubleGaussian, EqualWeights) {
  std::mt19937_64 rng(16);
  const Histogram h = make_histogram(mixture(rng, 100000, 0.5, -1.0, 1.0, 0.3), 80, -2.5, 2.5);
  EXPECT_NEAR(fit_double_gaussian(h).p1, 0.5, 0.01);
}

TEST(DoubleGaussian, SingleModeFlagged) {
  std::mt19937_64 rng(17);
  const Histogram h = make_histogram(mixture(rng, 100000, 0.0, 0.2, 0.2, 0.3), 80, -2.5, 2.5);
  EXPECT_TRUE(fit_double_gaussian(h).degenerate);
}

TEST(IswapBudget, DeviceInputs) {
  const IswapBudget b = iswap_error_budget(50.0, {60.0, 30.0, 57.0, 13.0, 1.0});
  EXPECT_NEAR(b.total, 3.24e-3, 0.005e-3);
  EXPECT_NEAR(b.total / 3.14e-3, 1.0, 0.05);
  ASSERT_EQ(b.components.size(), 5u);
  EXPECT_NEAR(b.components[3], 50.0 / 13000.0 / 3.0, 1e-18);
}

TEST(IswapBudget, Limits) {
  EXPECT_EQ(iswap_error_budget(0.0, {60.0, 30.0, 57.0, 13.0, 1.0}).total, 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(iswap_error_budget(50.0, {inf, inf, inf, inf, inf}).total, 0.0);
}

}  // namespace
}  // namespace fluxsim
