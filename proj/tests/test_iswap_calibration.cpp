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

#include "fluxsim/device.hpp"
#include "fluxsim/frame.hpp"
#include "fluxsim/iswap_calibration.hpp"

namespace fluxsim {
namespace {

IswapCalibrationOptions model_options() {
  IswapCalibrationOptions o;
  o.amplitude0 = 0.0606;
  o.duration0 = 45.5;
  return o;
}

TEST(SwapAngle, Estimators) {
  EXPECT_NEAR(swap_angle(1.0, 0.0, SwapEstimator::kPopulationRatio), 0.5 * kPi, 1e-15);
  EXPECT_NEAR(swap_angle(1.0, 0.0, SwapEstimator::kAmplitudeRatio), 0.5 * kPi, 1e-15);
  const double th = 0.3;
  const double ps = std::pow(std::sin(th), 2), pt = std::pow(std::cos(th), 2);
  EXPECT_NEAR(swap_angle(ps, pt, SwapEstimator::kAmplitudeRatio), th, 1e-14);
  EXPECT_NEAR(swap_angle(ps, pt, SwapEstimator::kPopulationRatio), std::atan(ps / pt), 1e-14);
  EXPECT_THROW(swap_angle(-0.1, 0.5, SwapEstimator::kAmplitudeRatio), InvalidArgument);
}

TEST(ExchangeGateModel, OptimumIsIswap) {
  const ExchangeGateModel m;
  EXPECT_LT((m.gate(m.optimal_amplitude, m.optimal_duration) - iswap_unitary()).norm(), 1e-12);
  const Matrix4cd u = m.gate(0.0613, 38.0);
  EXPECT_LT((u.adjoint() * u - Matrix4cd::Identity()).norm(), 1e-12);
}

TEST(CalibrateIswap, IdealModelHasNoPhases) {
  const IswapCalibration c = calibrate_iswap(ExchangeGateModel{}, model_options());
  EXPECT_LT(c.swap_deviation, 1e-3);
  EXPECT_NEAR(c.gamma, 0.0, 1e-3);
  EXPECT_NEAR(c.chi, 0.0, 1e-3);
  EXPECT_NEAR(c.phi, 0.0, 1e-3);
  EXPECT_NEAR(c.amplitude, 0.06, 1e-4);
  EXPECT_NEAR(c.duration, 47.0, 0.05);
  EXPECT_GT(c.fidelity, 0.9999);
}

TEST(CalibrateIswap, RecoversInjectedPhases) {
  ExchangeGateModel m;
  m.chi = 0.02;
  IswapCalibration c = calibrate_iswap(m, model_options());
  EXPECT_NEAR(c.chi, 0.02, 1e-3);
  EXPECT_NEAR(c.gamma, 0.0, 1e-3);

  m.gamma = -0.035;
  m.phi = 0.07;
  c = calibrate_iswap(m, model_options());
  EXPECT_NEAR(c.chi, 0.02, 1e-3);
  EXPECT_NEAR(c.gamma, -0.035, 1e-3);
  EXPECT_NEAR(c.phi, 0.07, 1e-3);
  EXPECT_LT(c.swap_deviation, 1e-3);
}

TEST(CalibrateIswap, EstimatorsAgreeOnOptimum) {
  IswapCalibrationOptions o = model_options();
  const IswapCalibration lit = calibrate_iswap(ExchangeGateModel{}, o);
  o.estimator = SwapEstimator::kAmplitudeRatio;
  const IswapCalibration amp = calibrate_iswap(ExchangeGateModel{}, o);
  EXPECT_NEAR(lit.amplitude, amp.amplitude, 2e-5);
  EXPECT_NEAR(lit.duration, amp.duration, 0.02);
  EXPECT_LT(amp.swap_deviation, 1e-3);
}

TEST(CalibrateIswap, LowContrastAborts) {
  IswapCalibrationOptions o = model_options();
  o.amplitude0 = 0.09;
  EXPECT_THROW(calibrate_iswap(ExchangeGateModel{}, o), NumericalError);
  o = model_options();
  o.amplitude0 = 0.0;
  EXPECT_THROW(calibrate_iswap(ExchangeGateModel{}, o), InvalidArgument);
}

TEST(MeasureIswapPhases, RejectsOddRepetitions) {
  EXPECT_THROW(measure_iswap_phases(iswap_unitary(), {1, 3}), InvalidArgument);
  EXPECT_THROW(measure_iswap_phases(iswap_unitary(), {2}), InvalidArgument);
}

TEST(MeasureIswapPhases, RandomPhasesRoundTrip) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int trial = 0; trial < 20; ++trial) {
    const double g = u(rng), x = u(rng), p = u(rng);
    const IswapPhases ph = measure_iswap_phases(iswap_with_phases(g, x, p), {2, 4, 6, 8, 10});
    EXPECT_NEAR(ph.gamma, g, 1e-10);
    EXPECT_NEAR(ph.chi, x, 1e-10);
    EXPECT_NEAR(ph.phi, p, 1e-10);
  }
}

TEST(MeasureIswapPhases, PhasesRemovedByFrameCorrection) {
  const double g = 0.031, x = -0.012, p = 0.044;
  const IswapPhases ph = measure_iswap_phases(iswap_with_phases(g, x, p), {2, 4, 6, 8});
  // Physical gate = Z(-χ-γ, χ-γ) iSWAP Z'(ϕ) at τ = 0 with Δ = 0.
  FrameState s = frame_update(FrameState{}, FrameEvent::iswap(0.0, ph.gamma, ph.chi));
  Matrix4cd cz = Matrix4cd::Identity();
  cz(3, 3) = std::polar(1.0, -ph.phi);
  const Matrix4cd logical =
      frame_phase_matrix(s.phi1, s.phi2).adjoint() * iswap_with_phases(g, x, p);
  EXPECT_LT((logical - iswap_unitary() * cz).norm(), 1e-9);
}

TEST(CalibrateIswap, DeviceClosedLoop) {
  const IswapSimulator sim(device_system());
  const FluxPulse base;
  const PulsedGateSource source(sim, base);
  const IswapCalibration c = calibrate_iswap(source, iswap_options_for(sim, base));
  EXPECT_LT(c.swap_deviation, 1e-3);
  EXPECT_GE(c.fidelity, 0.9995);
  EXPECT_LT(c.leakage, 1e-5);
  EXPECT_NEAR(c.duration, 47.0, 1.5);
  for (const CalibrationReport& r : c.reports) EXPECT_TRUE(std::isfinite(r.residual)) << r.name;
}

}  // namespace
}  // namespace fluxsim
