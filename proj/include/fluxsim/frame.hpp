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

#ifndef FLUXSIM_FRAME_HPP_
#define FLUXSIM_FRAME_HPP_

#include <vector>

#include "fluxsim/types.hpp"

namespace fluxsim {

// Phases between the exchange frame and the experimental frame. The physical
// state equals Z(φ1, φ2) applied to the logical state, with
// Z(a, b) = diag(1, e^{ib}, e^{ia}, e^{i(a+b)}) in the basis index 2a+b.
struct FrameState {
  double phi1 = 0.0;    // rad, wrapped to [-π, π]
  double phi2 = 0.0;
  double omega1 = 0.0;  // GHz
  double omega2 = 0.0;
  double t_now = 0.0;   // ns
};

struct FrameEvent {
  enum class Kind { kRotation, kVirtualZ, kIswap };

  Kind kind = Kind::kRotation;
  double time = 0.0;  // ns
  int qubit = 0;      // rotation and virtual Z
  double angle = 0.0;  // rotation angle, or virtual-Z angle of diag(1, e^{iθ})
  double phase = 0.0;  // rotation axis φ0
  double gamma = 0.0;  // iSWAP common phase
  double chi = 0.0;    // iSWAP relative phase

  static FrameEvent rotation(double time, int qubit, double phase, double angle);
  static FrameEvent virtual_z(double time, int qubit, double angle);
  static FrameEvent iswap(double time, double gamma, double chi);
};

// Δ = 2π(ω1 - ω2) in rad/ns.
double frame_detuning(const FrameState& s);

// Applies one event. An iSWAP at τ maps (φ1, φ2) to
// (Δτ - χ - γ + φ2, -Δτ + χ - γ + φ1). Throws InvalidArgument if event.time < s.t_now.
FrameState frame_update(const FrameState& s, const FrameEvent& event);

FrameState frame_run(FrameState s, const std::vector<FrameEvent>& events);

// Drive phase that realizes the logical rotation about φ0 on `qubit`.
double corrected_phase(const FrameState& s, int qubit, double phi0);

// Z(a, b) as a 4×4 matrix.
Matrix4cd frame_phase_matrix(double a, double b);

}  // namespace fluxsim

#endif  // FLUXSIM_FRAME_HPP_
