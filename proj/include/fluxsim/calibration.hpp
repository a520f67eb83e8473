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

#ifndef FLUXSIM_CALIBRATION_HPP_
#define FLUXSIM_CALIBRATION_HPP_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "fluxsim/gates.hpp"
#include "fluxsim/hamiltonian.hpp"

namespace fluxsim {

struct CalibrationReport {
  std::string name;
  double value = 0.0;
  double uncertainty = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

// Errors the single-qubit simulator adds on top of the programmed pulses.
struct SingleQubitInjection {
  double amplitude_scale = 1.0;   // delivered / programmed amplitude
  double frame_shift_mhz = 0.0;   // added to the programmed δf
  double axis_error = 0.0;        // rad, added to the phase of pulses with
  double axis_threshold = 0.0;    // amplitude strictly above this value
};

// Cosine-envelope pulse of the simulator's fixed duration.
struct SingleQubitPulse {
  double amplitude = 0.0;
  double phase = 0.0;  // rad
};

// Closed-loop stand-in for a driven qubit. Sequences start in |0>, pulses
// follow each other without gaps in the frame of the carrier.
class SingleQubitSimulator {
 public:
  SingleQubitSimulator(DrivenQubit qubit, double duration, const EvolutionOptions& options = {},
                       double carrier_ghz = -1.0);

  const DrivenQubit& qubit() const { return qubit_; }
  double duration() const { return duration_; }
  double carrier() const { return carrier_; }

  double detuning_mhz() const { return detuning_mhz_; }
  void set_detuning_mhz(double df) { detuning_mhz_ = df; }

  const SingleQubitInjection& injection() const { return injection_; }
  void set_injection(const SingleQubitInjection& injection);

  // shots <= 0 gives expectation values.
  void set_shots(int shots, std::uint64_t seed = 0);
  int shots() const { return shots_; }

  // Level populations after the sequence (time order), without shot noise.
  VectorXd populations(const std::vector<SingleQubitPulse>& sequence);
  // Ground-state probability, sampled when shots are enabled.
  double p0(const std::vector<SingleQubitPulse>& sequence);
  // P0 - P1 (expectation) or 2 P0 - 1 (sampled).
  double sigma_z(const std::vector<SingleQubitPulse>& sequence);

  // Distinct pulse propagators computed so far.
  int propagators() const { return static_cast<int>(cache_.size()); }

 private:
  const MatrixXcd& pulse_unitary(const SingleQubitPulse& pulse);

  DrivenQubit qubit_;
  double duration_;
  EvolutionOptions options_;
  double carrier_;
  double detuning_mhz_ = 0.0;
  SingleQubitInjection injection_;
  int shots_ = 0;
  std::mt19937_64 rng_;
  std::map<std::tuple<double, double, double>, MatrixXcd> cache_;
};

struct DetuningOptions {
  std::vector<int> n_list{2, 20, 40};
  double center_mhz = 0.0;
  double span_mhz = 40.0;
  int coarse_points = 81;
  // Per-N peaks farther than this fraction of the narrowest peak width from
  // the common maximum are reported as disagreeing.
  double agreement = 0.25;
};

struct DetuningCalibration {
  double detuning_mhz = 0.0;
  std::vector<int> n_list;
  std::vector<double> peak_mhz;  // maximum of P0 for each N alone
  std::vector<double> p0_at_peak;
  bool common_peak = true;
  CalibrationReport report;
};

// Maximizes P0 after (X_π X_-π)^N over the programmed δf, jointly for all N.
// Leaves the simulator at the calibrated detuning.
DetuningCalibration calibrate_detuning(SingleQubitSimulator& sim, double pi_amplitude,
                                       const DetuningOptions& options = {});

enum class RotationTarget { kPi, kHalfPi };

struct AmplitudeCalibration {
  double epsilon = 0.0;  // rad, error of the amplified π rotation
  double amplitude = 0.0;
  double corrected_amplitude = 0.0;  // A / (1 + ε/π)
  std::vector<int> n_list;
  std::vector<double> sigma_z;
  CalibrationReport report;
};

// ⟨σz⟩ after a prep along the Y axis and n repetitions of the rotation, model
// (-1)^(n+1) sin((n + 1/2) ε). Throws NumericalError when |ε| > 0.3.
AmplitudeCalibration calibrate_amplitude(SingleQubitSimulator& sim, double amplitude,
                                         RotationTarget target = RotationTarget::kPi,
                                         std::vector<int> n_list = {});

// Model used by calibrate_amplitude.
double amplitude_signal(int n, double epsilon);

struct AxisCalibration {
  double delta_phi = 0.0;  // rad, axis error of the calibrated gate
  std::vector<int> n_list;
  std::vector<double> phases;  // unwrapped 2Nδφ0 estimates
  CalibrationReport report;
};

// Axis error of the π pulse `gate` against its ideal phase, with X_π/2 as
// the φ0 = 0 reference, from the Z rotation of (gate X²_π/2)^N read out in
// two quadratures. Throws NumericalError when the unwrap is ambiguous.
AxisCalibration calibrate_axis(SingleQubitSimulator& sim, const SingleQubitPulse& gate,
                               double ideal_phase, double half_pi_amplitude, std::vector<int> n_list = {});

struct ZzOptions {
  double duration_ns = 4000.0;
  int points = 401;
  double max_residual_rad = 0.05;  // fringe fit failure threshold
};

struct ZzMeasurement {
  double zeta_mhz = 0.0;         // f(B=1) - f(B=0)
  double fringe_mhz[2] = {0.0, 0.0};  // Ramsey frequency of A against its bare frequency
  double residual_rad = 0.0;     // worst rms phase residual of the two fits
  bool fit_ok = true;
  CalibrationReport report;
};

// Two Ramsey experiments on qubit A with B in |0> and |1>, at the reference
// fluxes, using dressed computational states for preparation and readout.
ZzMeasurement measure_zz(const CoupledModel& model, const ZzOptions& options = {});

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sigma_slope = 0.0;
  double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fluxsim

#endif  // FLUXSIM_CALIBRATION_HPP_
