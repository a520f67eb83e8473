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

#ifndef FLUXSIM_FIDELITY_HPP_
#define FLUXSIM_FIDELITY_HPP_

#include <array>

#include "fluxsim/types.hpp"

namespace fluxsim {

// 1 - min over normalized inputs of the population kept in the computational
// block v (rows: computational outputs, cols: computational inputs).
double leakage(const MatrixXcd& v);

// Same, with v the leading computational block of u_full (levels and inputs
// ordered computational first).
double leakage(const MatrixXcd& u_full, int computational);

// [Tr(U†U) + |Tr(U_t† U)|²] / (d(d+1)).
double average_fidelity(const MatrixXcd& u, const MatrixXcd& target);

Matrix4cd iswap_unitary();
Matrix2cd pauli_x();
Matrix2cd pauli_y();
Matrix2cd pauli_z();
// exp(-i θ/2 (cos φ X + sin φ Y)).
Matrix2cd rotation_xy(double phi, double theta);
// exp(-i θ/2 Z).
Matrix2cd rotation_z(double theta);

// Angles in the order (θ_Aa, θ_Ab, θ_Ba, θ_Bb).
using VirtualZAngles = std::array<double, 4>;

// exp(iθ_Aa Z⊗I) exp(iθ_Ba I⊗Z) U exp(iθ_Ab Z⊗I) exp(iθ_Bb I⊗Z), basis index 2a+b.
Matrix4cd apply_virtual_z(const Matrix4cd& u, const VirtualZAngles& angles);

struct VirtualZResult {
  double fidelity = 0.0;
  VirtualZAngles angles{};
  bool converged = false;
};

// Maximizes average_fidelity(apply_virtual_z(u, θ), target) over the four angles.
VirtualZResult fidelity_with_virtual_z(const Matrix4cd& u, const Matrix4cd& target = iswap_unitary(),
                                       unsigned long long seed = 20260101ULL);

// Single-qubit frame correction: the α maximizing the fidelity of
// diag(e^{iα}, e^{-iα})·u against target.
double best_post_z(const Matrix2cd& u, const Matrix2cd& target);
Matrix2cd apply_post_z(const Matrix2cd& u, double alpha);

}  // namespace fluxsim

#endif  // FLUXSIM_FIDELITY_HPP_
