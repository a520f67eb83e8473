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

#ifndef FLUXSIM_DISTORTION_CALIBRATION_HPP_
#define FLUXSIM_DISTORTION_CALIBRATION_HPP_

#include <functional>
#include <vector>

#include "fluxsim/hamiltonian.hpp"
#include "fluxsim/pulses.hpp"

namespace fluxsim {

struct DistortionExperiment {
  FluxoniumParams qubit;            // probed qubit, phi_ext at the idle point
  double z0 = 0.1;                  // Φ0, reference pulse ending at t = 0
  double reference_ns = 10000.0;
  double z_p = 0.05;                // Φ0, probe offset from idle
  double t_p = 50.0;                // ns
  double dt = 0.5;                  // ns
  std::vector<double> delays;       // t_d, ns; empty selects default_delays()

  void validate() const;
};

// Log-spaced delays from 2 ns to 4 µs.
std::vector<double> default_distortion_delays();

// Ramsey phase picked up during a flux probe, with and without the preceding
// reference pulse, for a qubit whose ω10(Φ) is tabulated around the probe.
class DistortionProbe {
 public:
  explicit DistortionProbe(const DistortionExperiment& experiment);

  const DistortionExperiment& experiment() const { return exp_; }
  const std::vector<double>& delays() const { return delays_; }
  // D(z_p) = dω10/dΦ at the probe flux, GHz/Φ0.
  double sensitivity() const { return sensitivity_; }
  // ω10 (GHz) at idle + z.
  double frequency(double z) const;

  // δφ(t_d) = φ(with z0) - φ(without z0), φ = -2π ∫ ω10 dt over the probe.
  // The programmed waveform is predistorted with `predistortion`, then
  // passes through `line`.
  std::vector<double> phase_shifts(const DistortionModel& line,
                                   const DistortionModel& predistortion = {}) const;

 private:
  DistortionExperiment exp_;
  std::vector<double> delays_;
  double sensitivity_ = 0.0;
  std::function<double(double)> omega_;
};

// Linearized response: 2π z0 D Σ τ_i a_i (e^{-t_d/τ_i} - e^{-(t_d+t_p)/τ_i}),
// with a_i in the apply_distortion convention and a falling reference edge.
std::vector<double> distortion_phase_model(const std::vector<double>& delays, double z0,
                                           double sensitivity, double t_p,
                                           const DistortionModel& model);

struct DistortionFitOptions {
  int requested_components = 3;
  int max_components = 4;
  // An extra component is kept only if the lower order misses the data by
  // more than the phase noise floor (rms) and the extra component lowers the
  // residual sum of squares by more than selection_ratio.
  double noise_floor_rad = 5e-3;
  double selection_ratio = 10.0;
  double tau_min = 1.0;     // ns
  double tau_max = 5000.0;  // ns
  int tau_grid = 24;
};

struct DistortionFit {
  DistortionModel model;           // selected order
  std::vector<double> sigma_amplitude;
  std::vector<double> sigma_tau;
  int selected_components = 0;
  bool component_mismatch = false;  // selected != requested
  std::vector<double> cost_by_order;  // residual sum of squares, orders 1..max
  std::vector<DistortionModel> model_by_order;
  double rms = 0.0;                 // rad, selected model
};

DistortionFit fit_distortion(const std::vector<double>& delays, const std::vector<double>& phases,
                             double z0, double sensitivity, double t_p,
                             const DistortionFitOptions& options = {});

struct DistortionMeasurement {
  std::vector<double> delays;
  std::vector<double> phases;
  double sensitivity = 0.0;
  DistortionFit fit;
};

DistortionMeasurement measure_distortion(const DistortionProbe& probe, const DistortionModel& injected,
                                         const DistortionFitOptions& options = {});

// RMS of the phase shifts.
double phase_error_rms(const std::vector<double>& phases);

}  // namespace fluxsim

#endif  // FLUXSIM_DISTORTION_CALIBRATION_HPP_
