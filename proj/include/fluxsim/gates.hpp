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

#ifndef FLUXSIM_GATES_HPP_
#define FLUXSIM_GATES_HPP_

#include <vector>

#include "fluxsim/evolution.hpp"
#include "fluxsim/fidelity.hpp"
#include "fluxsim/hamiltonian.hpp"
#include "fluxsim/pulses.hpp"

namespace fluxsim {

struct GateReport {
  MatrixXcd u;       // computational block after frame correction
  MatrixXcd u_raw;   // computational block before virtual-Z correction
  double leakage = 0.0;
  double fidelity = 0.0;
  VirtualZAngles vz_angles{};  // (θ_Aa, θ_Ab, θ_Ba, θ_Bb); single qubit uses [0]
  double wall_time = 0.0;      // s
  bool converged = true;       // integrator tolerance and optimizer status
};

// One fluxonium driven through n̂ by a cosine carrier, simulated without the
// rotating-wave approximation on its lowest levels.
class DrivenQubit {
 public:
  explicit DrivenQubit(const FluxoniumParams& params, int n_levels = 5, const FluxGrid& grid = {});

  const FluxoniumParams& params() const { return params_; }
  const Eigenbasis& basis() const { return basis_; }
  int n_levels() const { return basis_.size(); }
  double omega10() const { return basis_.frequency(0, 1); }
  cplx n01() const { return basis_.n_mat(0, 1); }
  // Amplitude of a π rotation for the cosine envelope of length T (rotating-wave estimate).
  double pi_amplitude(double duration) const;

  // Lab Hamiltonian diag(E) + Re[Ω(t) e^{-i2πω_d(t-t0)}] n̂.
  TimeDependentHamiltonian hamiltonian(const DriveEnvelope& env, double carrier_ghz) const;

  // Propagator over the pulse in the frame rotating at carrier_ghz
  // (level k at E_0 + k ω_d), referenced at the pulse start.
  MatrixXcd frame_propagator(const DriveEnvelope& env, double carrier_ghz,
                             const EvolutionOptions& options = {}, EvolutionStats* stats = nullptr) const;

  // Computational block in gate convention: a real positive-phase drive
  // (φ0 = 0) rotates about +X.
  Matrix2cd gate_block(const MatrixXcd& frame_u) const;

  // Free evolution of duration t in the same frame (identity on 0, 1 when
  // ω_d = ω10).
  MatrixXcd frame_idle(double t, double carrier_ghz) const;

 private:
  FluxoniumParams params_;
  Eigenbasis basis_;
  cplx basis_phase_;
};

// Coherent gate report against target: post-gate virtual Z optimized,
// leakage from the computational columns.
GateReport simulate_single_qubit_gate(const DrivenQubit& qubit, const DriveEnvelope& env,
                                      double carrier_ghz, const Matrix2cd& target,
                                      const EvolutionOptions& options = {});

GateReport simulate_single_qubit_gate(const FluxoniumParams& params, const DriveEnvelope& env,
                                      double carrier_ghz, const Matrix2cd& target,
                                      int n_levels = 5);

struct IswapSetup {
  FluxLine line;
  double padding = -1.0;  // ns; negative selects default_padding(line)
  EvolutionOptions evolution;
};

// Flux-pulse iSWAP on two coupled fluxonia. The pulse drives qubit A; qubit B
// stays at its reference flux. Inputs and outputs are the dressed
// computational states at idle (index 2a+b), in the frame rotating with the
// dressed idle frequencies, referenced at the start of the padded window.
class IswapSimulator {
 public:
  explicit IswapSimulator(const CoupledSystem& system, IswapSetup setup = {});

  const CoupledModel& model() const { return model_; }
  const DressedSpectrum& idle() const { return idle_; }
  const IswapSetup& setup() const { return setup_; }
  double frame_frequency(int qubit) const { return qubit == 0 ? omega_a_ : omega_b_; }
  double padding() const;

  FluxWaveform waveform(const FluxPulse& pulse) const;
  TimeDependentHamiltonian hamiltonian(const FluxWaveform& w) const;

  // Final states (dressed idle basis, experimental frame) of the given
  // computational inputs.
  MatrixXcd evolve_columns(const FluxPulse& pulse, const std::vector<int>& inputs = {0, 1, 2, 3},
                           EvolutionStats* stats = nullptr) const;
  // Same with an explicit waveform.
  MatrixXcd evolve_columns(const FluxWaveform& w, const std::vector<int>& inputs,
                           EvolutionStats* stats = nullptr) const;

  // 4×4 computational block of the full-input columns.
  Matrix4cd block(const MatrixXcd& columns) const;
  Matrix4cd block(const FluxPulse& pulse) const { return block(evolve_columns(pulse)); }

  GateReport simulate(const FluxPulse& pulse) const;

 private:
  CoupledModel model_;
  IswapSetup setup_;
  DressedSpectrum idle_;
  MatrixXcd dflux_;
  double omega_a_ = 0.0;
  double omega_b_ = 0.0;
};

struct ChevronMap {
  std::vector<double> amplitudes;
  std::vector<double> durations;
  MatrixXd p01;                      // rows: amplitudes, cols: durations
  std::vector<double> frequency_mhz;  // dominant oscillation per amplitude
};

// |10> → |01> transfer populations. durations must be uniformly spaced for
// the frequency estimate.
ChevronMap chevron_scan(const IswapSimulator& sim, const FluxPulse& base,
                        const std::vector<double>& amplitudes,
                        const std::vector<double>& durations, int threads = 0);

// Dominant frequency (1/unit of t) of uniformly sampled y(t): DFT peak refined
// by a sinusoid least-squares fit.
double dominant_frequency(const std::vector<double>& t, const std::vector<double>& y);

struct FluxErrorCurve {
  std::vector<double> offsets;
  std::vector<double> errors;  // 1 - F with frozen virtual-Z angles
  VirtualZAngles angles{};
};

// Gate error versus amplitude offset with the virtual-Z angles fixed at their
// optimum for the nominal pulse.
FluxErrorCurve flux_error_sensitivity(const IswapSimulator& sim, const FluxPulse& pulse,
                                      const std::vector<double>& offsets, int threads = 0);

}  // namespace fluxsim

#endif  // FLUXSIM_GATES_HPP_
