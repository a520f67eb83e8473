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

#ifndef FLUXSIM_PULSES_HPP_
#define FLUXSIM_PULSES_HPP_

#include <vector>

#include "fluxsim/types.hpp"

namespace fluxsim {

// Cosine-envelope microwave drive. amplitude multiplies n̂ (GHz).
struct DriveEnvelope {
  double amplitude = 0.0;
  double duration = 10.0;      // ns
  double detuning_mhz = 0.0;   // δf
  double phase = 0.0;          // φ0, rad
  double t0 = 0.0;             // ns

  void validate() const;
};

// Ω(t) = A (1 - cos(2π(t-t0)/T)) exp(-i 2π δf (t-t0) + i φ0) inside the
// pulse, zero outside.
cplx sample_drive(const DriveEnvelope& env, double t);

// Real envelope A (1 - cos(2π(t-t0)/T)), zero outside the pulse.
double drive_envelope(const DriveEnvelope& env, double t);

// Error-function flux pulse, optionally followed by its negated copy.
struct FluxPulse {
  double amplitude = 0.0;  // Φ0
  double duration = 50.0;  // t_g, ns
  double sigma = 0.2;      // ns
  bool net_zero = false;

  void validate() const;
  double total_duration() const { return net_zero ? 2.0 * duration : duration; }
  // Flat-top length between the edge midpoints.
  double plateau() const { return duration - 8.0 * sigma; }
};

double sample_flux(const FluxPulse& pulse, double t);

std::vector<double> sample_flux(const FluxPulse& pulse, double t_start, double dt, int n);

// Gaussian low-pass with |H(f)| = exp(-f^2 / (2 f_σ^2)), f_σ = f_c / sqrt(2 ln 2),
// so the amplitude response at f_c is 0.5. f_c in MHz, dt in ns. Edges use
// half-sample symmetric reflection.
std::vector<double> gaussian_lowpass(const std::vector<double>& samples, double fc_mhz,
                                     double dt);

// Time-domain standard deviation (ns) of the Gaussian kernel for cut-off f_c.
double lowpass_sigma_ns(double fc_mhz);

struct DistortionComponent {
  double amplitude = 0.0;  // a_i
  double tau = 1.0;        // τ_i, ns
};

struct DistortionModel {
  std::vector<DistortionComponent> components;

  void validate() const;
  double amplitude_sum() const;
};

// Settling response: a unit step becomes 1 + Σ a_i exp(-t/τ_i). Samples before
// the first one are taken as zero.
std::vector<double> apply_distortion(const std::vector<double>& samples,
                                     const DistortionModel& model, double dt);

// Exact discrete inverse of apply_distortion.
std::vector<double> predistort(const std::vector<double>& samples,
                               const DistortionModel& model, double dt);

struct CrosstalkMatrix {
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();

  void validate() const;
};

// Matrix measured on the two-qubit device.
CrosstalkMatrix device_crosstalk();

// Line settings V_in = M^-1 V_Q delivering target qubit fluxes.
Vector2d crosstalk_compensate(const Vector2d& target, const CrosstalkMatrix& m);

// Fluxes seen by the qubits for given line settings, M V_in.
Vector2d crosstalk_apply(const Vector2d& settings, const CrosstalkMatrix& m);

// Rounds each sample to a multiple of resolution (DAC amplitude step).
std::vector<double> quantize(const std::vector<double>& samples, double resolution);

// Stages between the programmed flux pulse and the qubit.
struct FluxLine {
  double dt = 0.05;             // ns
  double lowpass_mhz = 300.0;   // <= 0 disables the filter
  DistortionModel distortion;   // physical line response
  DistortionModel predistortion;  // digital inverse applied to the program
  double dac_resolution = 0.0;  // <= 0 disables quantization
};

struct FluxWaveform {
  double t_start = 0.0;  // ns, time of the first sample
  double dt = 0.05;
  std::vector<double> values;

  double end() const { return t_start + dt * (values.size() - 1); }
  // Catmull-Rom interpolation, zero outside the sampled window.
  double at(double t) const;
};

// Renders pulse through the line. The window is padded before and after the
// pulse so the filter tails are captured.
FluxWaveform render_flux(const FluxPulse& pulse, const FluxLine& line, double padding);

// Padding that captures the low-pass tails of line.
double default_padding(const FluxLine& line);

}  // namespace fluxsim

#endif  // FLUXSIM_PULSES_HPP_
