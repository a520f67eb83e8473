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

#ifndef FLUXSIM_DEVICE_HPP_
#define FLUXSIM_DEVICE_HPP_

#include "fluxsim/hamiltonian.hpp"

namespace fluxsim {

// Circuit energies of the two-qubit device, GHz.
inline FluxoniumParams device_qubit_a() { return {1.398, 0.523, 2.257, 0.5}; }
inline FluxoniumParams device_qubit_b() { return {1.572, 0.537, 2.086, 0.5}; }

// Reported device figures used as targets.
inline constexpr double kExchangeSplittingMhz = 11.2;
inline constexpr double kReportedZzMhz = 0.235;

// J_C (GHz) from calibrate_coupling(device_system(0), 11.2 MHz); frozen.
inline constexpr double kCalibratedJcGhz = 0.125630963649;

inline CoupledSystem device_system(double jc = kCalibratedJcGhz, int n_levels = 8) {
  CoupledSystem s;
  s.qubit_a = device_qubit_a();
  s.qubit_b = device_qubit_b();
  s.jc = jc;
  s.n_levels_each = n_levels;
  return s;
}

}  // namespace fluxsim

#endif  // FLUXSIM_DEVICE_HPP_
