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

#ifndef FLUXSIM_RB_HPP_
#define FLUXSIM_RB_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fluxsim/clifford.hpp"
#include "fluxsim/noise.hpp"

namespace fluxsim {

// Counter-based stream: value j of the stream keyed by (seed, m, index).
std::uint64_t rb_stream_key(std::uint64_t seed, std::uint64_t m, std::uint64_t index);
std::uint64_t rb_stream_value(std::uint64_t key, std::uint64_t j);

struct RBCircuit {
  int n_qubits = 1;
  int m = 0;
  std::vector<int> cliffords;     // group indices; -1 marks an interleaved gate
  std::vector<std::vector<GateOp>> ops;  // decomposition of each entry
};

// m random Cliffords, the target after each when interleaving, then the recovery.
RBCircuit sample_rb_circuit(int n_qubits, int m, std::uint64_t seed, int sequence_index,
                            const std::optional<std::vector<GateOp>>& interleave = std::nullopt);

struct GateDurations {
  double single_ns = 10.0;
  double iswap_ns = 50.0;
};

struct TimedOp {
  GateOp op;
  double t_start_ns = 0.0;
};

// As-soon-as-possible layering of a decomposition; iSWAP occupies both qubits.
std::vector<std::vector<GateOp>> schedule_moments(const std::vector<GateOp>& ops, int n_qubits);
std::vector<TimedOp> schedule(const RBCircuit& circuit, const GateDurations& durations);

struct PrimitiveChannel {
  double duration_ns = 0.0;
  double depolarizing = 0.0;  // ρ → (1-ε)ρ + ε Tr_q(ρ)⊗I/d_q on the gate's qubits
};

struct RBNoiseModel {
  std::array<PrimitiveChannel, 2> single_qubit;  // per qubit
  PrimitiveChannel iswap{50.0, 0.0};
  std::array<std::optional<CoherenceTimes>, 2> coherence;  // µs, applied to every qubit each moment
  double clifford_depolarizing = 0.0;  // whole register, after each Clifford
  int shots = 0;                       // 0 = exact ground-state population

  void validate(int n_qubits) const;
};

// Superoperator (column stacking) of one decomposition under the model.
MatrixXcd decomposition_superoperator(const std::vector<GateOp>& ops, int n_qubits,
                                      const RBNoiseModel& noise);

// Ground-state population after the circuit, without shot noise.
double sequence_fidelity(const RBCircuit& circuit, const RBNoiseModel& noise);

struct RBFit {
  double a = 0.0;
  double b = 0.0;
  double p = 0.0;
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  double sigma_p = 0.0;
  double cost = 0.0;
  bool converged = false;
  bool near_boundary = false;
};

// F(m) = A p^m + B with 0 < p <= 1. Needs at least 4 distinct m.
RBFit fit_rb_decay(const std::vector<double>& m_values, const std::vector<double>& fidelities);

struct RBResult {
  int n_qubits = 1;
  std::vector<int> m_values;
  std::vector<double> mean;
  std::vector<double> std;
  RBFit fit;
};

RBResult simulate_rb(const RBNoiseModel& noise, int n_qubits, const std::vector<int>& m_values, int k,
                     std::uint64_t seed,
                     const std::optional<std::vector<GateOp>>& interleave = std::nullopt,
                     int threads = 1);

// 1 - (1 - p)(d - 1)/d / gates_per_clifford, d ∈ {2, 4}.
double clifford_fidelity_from_decay(double p, int d, double gates_per_clifford = 1.0);

struct InterleavedFidelity {
  double fidelity = 0.0;
  bool in_domain = true;  // false unless 0 < p_g <= p_ref <= 1
};

InterleavedFidelity interleaved_fidelity(double p_ref, double p_g, int d);

struct Clifford2Errors {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double r4 = 0.0;
  double r_c2 = 0.0;
};

Clifford2Errors clifford2_error_estimate(double r_iswap, double r_pa, double r_pb);

}  // namespace fluxsim

#endif  // FLUXSIM_RB_HPP_
