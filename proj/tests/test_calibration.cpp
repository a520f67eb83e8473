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

#include "fluxsim/calibration.hpp"
#include "fluxsim/device.hpp"

namespace fluxsim {
namespace {

// Two-level Q_A with a slow pulse: close to the ideal rotating-wave qubit.
SingleQubitSimulator slow_two_level(double duration = 40.0) {
  return SingleQubitSimulator(DrivenQubit(device_qubit_a(), 2), duration);
}

SingleQubitSimulator device_sim() { return SingleQubitSimulator(DrivenQubit(device_qubit_a(), 5), 10.0); }

TEST(AmplitudeSignal, VanishesWithoutError) {
  for (int n = 0; n < 30; ++n) EXPECT_EQ(amplitude_signal(n, 0.0), 0.0);
  EXPECT_NEAR(amplitude_signal(0, 0.2), -std::sin(0.1), 1e-15);
  EXPECT_NEAR(amplitude_signal(3, 0.02), std::sin(0.07), 1e-15);
}

TEST(CalibrateDetuning, ZeroShiftGivesZero) {
  SingleQubitSimulator sim = slow_two_level(100.0);
  const DetuningCalibration c = calibrate_detuning(sim, sim.qubit().pi_amplitude(100.0));
  EXPECT_TRUE(c.common_peak);
  EXPECT_NEAR(c.detuning_mhz, 0.0, 0.05);
  EXPECT_TRUE(std::isfinite(c.report.residual));
}

TEST(CalibrateDetuning, RecoversInjectedFrameShift) {
  for (double f0 : {1.5, -2.7}) {
    SingleQubitSimulator sim = slow_two_level(100.0);
    SingleQubitInjection inj;
    inj.frame_shift_mhz = f0;
    sim.set_injection(inj);
    const DetuningCalibration c = calibrate_detuning(sim, sim.qubit().pi_amplitude(100.0));
    EXPECT_TRUE(c.common_peak);
    EXPECT_NEAR(c.detuning_mhz, -f0, 0.05) << f0;
    EXPECT_EQ(sim.detuning_mhz(), c.detuning_mhz);
  }
}

TEST(CalibrateDetuning, DeviceQubitHasOneCommonPeak) {
  SingleQubitSimulator sim = device_sim();
  const DetuningCalibration c = calibrate_detuning(sim, sim.qubit().pi_amplitude(10.0));
  EXPECT_TRUE(c.common_peak);
  ASSERT_EQ(c.peak_mhz.size(), 3u);
  for (double p : c.p0_at_peak) EXPECT_GT(p, 0.99);
  EXPECT_LT(c.detuning_mhz, -1.0);
  EXPECT_GT(c.detuning_mhz, -15.0);
}

TEST(CalibrateDetuning, SecondPassDoesNotMove) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 2; ++trial) {
    SingleQubitSimulator sim = slow_two_level(100.0);
    SingleQubitInjection inj;
    inj.frame_shift_mhz = u(rng);
    sim.set_injection(inj);
    const double a = sim.qubit().pi_amplitude(100.0);
    const double e0 = std::abs(inj.frame_shift_mhz);
    DetuningOptions opt;
    const double e1 = std::abs(calibrate_detuning(sim, a, opt).detuning_mhz + inj.frame_shift_mhz);
    opt.center_mhz = sim.detuning_mhz();
    opt.span_mhz = 4.0;
    const double e2 = std::abs(calibrate_detuning(sim, a, opt).detuning_mhz + inj.frame_shift_mhz);
    EXPECT_LT(e1, e0 / 5.0);
    EXPECT_LT(e2, 0.05);
  }
}

TEST(CalibrateAmplitude, RecoversInjectedError) {
  SingleQubitSimulator sim = slow_two_level();
  const double a = sim.qubit().pi_amplitude(40.0);
  const double base = calibrate_amplitude(sim, a).epsilon;
  SingleQubitInjection inj;
  inj.amplitude_scale = 1.01;
  sim.set_injection(inj);
  const AmplitudeCalibration c = calibrate_amplitude(sim, a);
  const double expected = 0.01 * (kPi + base);
  EXPECT_NEAR(c.epsilon - base, expected, 0.02 * expected);
  EXPECT_NEAR(c.corrected_amplitude, a / (1.0 + c.epsilon / kPi), 1e-15);
  EXPECT_LT(std::abs(calibrate_amplitude(sim, c.corrected_amplitude).epsilon), 1e-4);
}

TEST(CalibrateAmplitude, HalfPiTarget) {
  SingleQubitSimulator sim = slow_two_level();
  const double a = 0.5 * sim.qubit().pi_amplitude(40.0);
  SingleQubitInjection inj;
  inj.amplitude_scale = 0.985;
  sim.set_injection(inj);
  AmplitudeCalibration c = calibrate_amplitude(sim, a, RotationTarget::kHalfPi);
  EXPECT_LT(c.epsilon, -0.03);
  c = calibrate_amplitude(sim, c.corrected_amplitude, RotationTarget::kHalfPi);
  EXPECT_LT(std::abs(c.epsilon), 1e-4);
}

TEST(CalibrateAmplitude, RefusesLargeError) {
  SingleQubitSimulator sim = slow_two_level();
  SingleQubitInjection inj;
  inj.amplitude_scale = 1.14;
  sim.set_injection(inj);
  EXPECT_THROW(calibrate_amplitude(sim, sim.qubit().pi_amplitude(40.0)), NumericalError);
}

TEST(CalibrateAmplitude, TwoIterationsContract) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.04, 0.04);
  for (int trial = 0; trial < 4; ++trial) {
    SingleQubitSimulator sim = device_sim();
    sim.set_detuning_mhz(-6.0);
    SingleQubitInjection inj;
    inj.amplitude_scale = 1.0 + u(rng);
    sim.set_injection(inj);
    double a = sim.qubit().pi_amplitude(10.0);
    std::vector<double> eps;
    for (int it = 0; it < 3; ++it) {
      const AmplitudeCalibration c = calibrate_amplitude(sim, a);
      eps.push_back(std::abs(c.epsilon));
      a = c.corrected_amplitude;
    }
    EXPECT_LT(eps[1], eps[0]) << trial;
    EXPECT_LE(eps[2], eps[1]) << trial;
    EXPECT_LT(eps[2], eps[0] / 5.0) << trial;
  }
}

TEST(CalibrateAmplitude, ShotNoiseIsSeededAndStillResolvesError) {
  auto run = [](std::uint64_t seed) {
    SingleQubitSimulator sim = slow_two_level();
    SingleQubitInjection inj;
    inj.amplitude_scale = 1.02;
    sim.set_injection(inj);
    sim.set_shots(4000, seed);
    return calibrate_amplitude(sim, sim.qubit().pi_amplitude(40.0)).epsilon;
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NEAR(run(6), 0.02 * kPi, 5e-3);
}

TEST(CalibrateAxis, AlignedGateGivesZero) {
  SingleQubitSimulator sim = slow_two_level();
  const double a = sim.qubit().pi_amplitude(40.0);
  const AxisCalibration c = calibrate_axis(sim, {a, 0.5 * kPi}, 0.5 * kPi, 0.5 * a);
  EXPECT_NEAR(c.delta_phi, 0.0, 1e-3);
  EXPECT_EQ(c.phases.size(), c.n_list.size());
}

TEST(CalibrateAxis, RecoversInjectedMisalignment) {
  SingleQubitSimulator sim = slow_two_level();
  const double a = sim.qubit().pi_amplitude(40.0);
  const SingleQubitPulse y_pi{a, 0.5 * kPi};
  const double base = calibrate_axis(sim, y_pi, 0.5 * kPi, 0.5 * a).delta_phi;
  for (double d : {0.01, -0.01, 0.05}) {
    SingleQubitInjection inj;
    inj.axis_error = d;
    inj.axis_threshold = 0.75 * a;
    sim.set_injection(inj);
    const AxisCalibration c = calibrate_axis(sim, y_pi, 0.5 * kPi, 0.5 * a);
    EXPECT_NEAR(c.delta_phi - base, d, 5e-4) << d;
    EXPECT_LE(c.n_list.back(), 40);
  }
}

TEST(CalibrateAxis, XPiMisalignment) {
  SingleQubitSimulator sim = slow_two_level();
  const double a = sim.qubit().pi_amplitude(40.0);
  SingleQubitInjection inj;
  inj.axis_error = -0.0068;
  inj.axis_threshold = 0.75 * a;
  sim.set_injection(inj);
  EXPECT_NEAR(calibrate_axis(sim, {a, 0.0}, 0.0, 0.5 * a).delta_phi, -0.0068, 5e-4);
}

TEST(CalibrateAxis, AmbiguousUnwrapIsAnError) {
  SingleQubitSimulator sim = slow_two_level();
  const double a = sim.qubit().pi_amplitude(40.0);
  SingleQubitInjection inj;
  inj.axis_error = 0.05;
  inj.axis_threshold = 0.75 * a;
  sim.set_injection(inj);
  EXPECT_THROW(calibrate_axis(sim, {a, 0.5 * kPi}, 0.5 * kPi, 0.5 * a, {20, 40}), NumericalError);
}

TEST(CalibrateAxis, TwoIterationsContract) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.04, 0.04);
  for (int trial = 0; trial < 3; ++trial) {
    SingleQubitSimulator sim = slow_two_level();
    const double a = sim.qubit().pi_amplitude(40.0);
    SingleQubitInjection inj;
    inj.axis_error = u(rng);
    inj.axis_threshold = 0.75 * a;
    sim.set_injection(inj);
    SingleQubitPulse gate{a, 0.5 * kPi};
    std::vector<double> err;
    for (int it = 0; it < 3; ++it) {
      const AxisCalibration c = calibrate_axis(sim, gate, 0.5 * kPi, 0.5 * a);
      err.push_back(std::abs(c.delta_phi));
      gate.phase -= c.delta_phi;
    }
    EXPECT_LT(err[2], err[0] / 5.0) << trial;
    EXPECT_LE(err[1], err[0]) << trial;
  }
}

TEST(ClosedLoop, CalibratedDevicePiPulse) {
  SingleQubitSimulator sim = device_sim();
  double a = sim.qubit().pi_amplitude(10.0);
  calibrate_detuning(sim, a);
  for (int it = 0; it < 2; ++it) a = calibrate_amplitude(sim, a).corrected_amplitude;
  DriveEnvelope env;
  env.amplitude = a;
  env.duration = 10.0;
  env.detuning_mhz = sim.detuning_mhz();
  const GateReport r = simulate_single_qubit_gate(sim.qubit(), env, sim.carrier(), pauli_x());
  EXPECT_LT(1.0 - r.fidelity, 1e-4);
}

TEST(MeasureZz, ZeroCouplingGivesZero) {
  const ZzMeasurement z = measure_zz(CoupledModel(device_system(0.0, 6)));
  EXPECT_TRUE(z.fit_ok);
  EXPECT_NEAR(z.zeta_mhz, 0.0, 1e-3);
}

TEST(MeasureZz, MatchesHamiltonianRate) {
  const CoupledModel model(device_system(kCalibratedJcGhz, 6));
  const ZzMeasurement z = measure_zz(model);
  EXPECT_TRUE(z.fit_ok);
  EXPECT_NEAR(z.zeta_mhz, zz_rate(model), 1e-3);
  // ζ > 0 iff E11 + E00 > E10 + E01.
  const DressedSpectrum ds = dressed_spectrum(model, 0.5, 0.5);
  const auto& e = ds.energies;
  const auto& c = ds.computational;
  EXPECT_EQ(z.zeta_mhz > 0, e(c[3]) + e(c[0]) > e(c[2]) + e(c[1]));
}

TEST(FitLine, ExactLine) {
  const LineFit f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.rms, 0.0, 1e-14);
  EXPECT_THROW(fit_line({1, 1}, {0, 1}), InvalidArgument);
}

}  // namespace
}  // namespace fluxsim
