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

#ifndef FLUXSIM_ISWAP_CALIBRATION_HPP_
#define FLUXSIM_ISWAP_CALIBRATION_HPP_

#include <vector>

#include "fluxsim/calibration.hpp"
#include "fluxsim/gates.hpp"

namespace fluxsim {

// Anything that returns the two-qubit computational block (index 2a+b,
// experimental frame) for a flux pulse of given amplitude and length.
class TwoQubitGateSource {
 public:
  virtual ~TwoQubitGateSource() = default;
  virtual Matrix4cd gate(double amplitude, double duration) const = 0;
};

// Exchange between |01> and |10> with detuning linear in the amplitude
// offset, plus explicit γ, χ and conditional phase φ:
//   |00> -> |00>,  |11> -> e^{-i(2γ+φ)} |11>,
//   {|01>,|10>} -> e^{-iγ} exp(-i t [[δ, g e^{iχ}], [g e^{-iχ}, -δ]]),
// with g = π/(2 t_opt) and δ = slope (a - a_opt). At the optimum this is
// the iSWAP with swap angle π/2.
struct ExchangeGateModel : TwoQubitGateSource {
  double optimal_amplitude = 0.06;   // Φ0
  double optimal_duration = 47.0;    // ns
  double detuning_slope = kTwoPi;    // rad/ns per Φ0
  double gamma = 0.0;
  double chi = 0.0;
  double phi = 0.0;

  Matrix4cd gate(double amplitude, double duration) const override;
};

// Flux pulses through the full coupled simulator; amplitude and duration
// replace those of `base`.
class PulsedGateSource : public TwoQubitGateSource {
 public:
  PulsedGateSource(const IswapSimulator& sim, FluxPulse base) : sim_(sim), base_(base) {}
  Matrix4cd gate(double amplitude, double duration) const override;
  const IswapSimulator& simulator() const { return sim_; }

 private:
  const IswapSimulator& sim_;
  FluxPulse base_;
};

enum class SwapEstimator {
  kPopulationRatio,  // arctan(P_swap / P_stay), the default
  kAmplitudeRatio,   // arctan(sqrt(P_swap / P_stay))
};

// Swap angle from populations after an odd number of gates started in |10>:
// P_swap in |01>, P_stay in |10>.
double swap_angle(double p_swap, double p_stay, SwapEstimator estimator);

struct IswapCalibrationOptions {
  std::vector<int> odd_n{1, 3, 5};
  std::vector<int> even_n{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  SwapEstimator estimator = SwapEstimator::kPopulationRatio;
  double amplitude0 = 0.0;  // starting point; <= 0 requires explicit values
  double duration0 = 0.0;
  double amplitude_scale = 1e-3;  // Φ0 per optimizer unit
  int max_iterations = 300;
  double min_contrast = 0.5;
};

struct IswapCalibration {
  double amplitude = 0.0;
  double duration = 0.0;
  double theta = 0.0;           // swap angle of one gate
  double swap_deviation = 0.0;  // |θ - π/2|
  double gamma = 0.0;
  double chi = 0.0;
  double phi = 0.0;             // conditional phase
  double fidelity = 0.0;        // with optimized virtual Z
  double leakage = 0.0;
  int evaluations = 0;
  std::vector<CalibrationReport> reports;
};

// Swap angle from odd repetitions on |10>, then γ from
// (|0> - i|1>)|0>/√2 under even repetitions, φ from |+>|+>, and χ with Y_π on
// both qubits after every gate. Throws NumericalError when a signal's
// contrast is below options.min_contrast.
IswapCalibration calibrate_iswap(const TwoQubitGateSource& source,
                                 const IswapCalibrationOptions& options);

// Starting point for the device: resonance flux and half the exchange period
// plus the pulse edges.
IswapCalibrationOptions iswap_options_for(const IswapSimulator& sim, const FluxPulse& base);

// Phase-extraction steps alone on a fixed gate.
struct IswapPhases {
  double gamma = 0.0;
  double chi = 0.0;
  double phi = 0.0;
  std::vector<CalibrationReport> reports;
};
IswapPhases measure_iswap_phases(const Matrix4cd& u, const std::vector<int>& even_n,
                                 double min_contrast = 0.5);

// The model matrix with θ = π/2 and given phases.
Matrix4cd iswap_with_phases(double gamma, double chi, double phi);

}  // namespace fluxsim

#endif  // FLUXSIM_ISWAP_CALIBRATION_HPP_
