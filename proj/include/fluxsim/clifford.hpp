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

#ifndef FLUXSIM_CLIFFORD_HPP_
#define FLUXSIM_CLIFFORD_HPP_

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fluxsim/types.hpp"

namespace fluxsim {

enum class Primitive { kI, kX, kY, kX90, kXm90, kY90, kYm90, kIswap };

std::string primitive_name(Primitive p);
std::optional<Primitive> primitive_from_name(const std::string& name);
Matrix2cd primitive_unitary(Primitive p);  // single-qubit primitives only

// qubit: 0 = A, 1 = B. iSWAP ignores it.
struct GateOp {
  Primitive gate = Primitive::kI;
  int qubit = 0;

  bool operator==(const GateOp&) const = default;
};

enum class CliffordClass { kSingle, kCnotLike, kIswapLike, kSwapLike };

std::string class_name(CliffordClass c);

struct CliffordElement {
  MatrixXcd unitary;                // canonical form
  std::vector<GateOp> decomposition;  // time order
  CliffordClass class_tag = CliffordClass::kSingle;
};

// Product of a time-ordered decomposition on n_qubits (basis index 2a+b).
MatrixXcd decomposition_unitary(const std::vector<GateOp>& ops, int n_qubits);

// Fixes the phase of the first entry (column-major) with |z| > 1e-6 to be real positive.
MatrixXcd canonicalize(const MatrixXcd& u);

// Hash key of the canonical form on a 1e-8 grid.
std::string canonical_key(const MatrixXcd& u);

// True when u maps every Pauli to ± a Pauli under conjugation.
bool is_clifford(const MatrixXcd& u, double tol = 1e-9);

// Phases c_k with decomposition(S1[k]) = c_k S^k, S = exp[-iπ(X+Y+Z)/(3√3)].
std::array<cplx, 3> s1_phases();

// S1 decompositions for one qubit: {I}, {Y90, X90}, {X-90, Y-90} (time order).
std::vector<std::vector<GateOp>> s1_decompositions(int qubit);

class CliffordGroup {
 public:
  // Built once on first use; immutable afterwards.
  static const CliffordGroup& single();
  static const CliffordGroup& two();

  int n_qubits() const { return n_qubits_; }
  int dim() const { return 1 << n_qubits_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const CliffordElement& operator[](int i) const { return elements_.at(i); }
  const std::vector<CliffordElement>& elements() const { return elements_; }

  std::optional<int> find(const MatrixXcd& u) const;
  int index_of(const MatrixXcd& u) const;  // throws NumericalError on a miss
  int identity_index() const { return identity_; }

  // Element C_r with C_r · C_{s_n} ⋯ C_{s_1} = I up to phase. Empty → identity.
  int recovery(const std::vector<int>& sequence) const;

  double mean_length() const;
  double mean_iswap_count() const;
  // Mean number of single-qubit primitives acting on `qubit`.
  double mean_single_count(int qubit) const;
  int class_size(CliffordClass c) const;

 private:
  explicit CliffordGroup(int n_qubits);
  void add(CliffordElement e);

  int n_qubits_;
  int identity_ = 0;
  std::vector<CliffordElement> elements_;
  std::unordered_map<std::string, int> index_;
};

const std::vector<CliffordElement>& single_qubit_cliffords();
const CliffordGroup& two_qubit_cliffords();

// Recovery for explicit elements; n_qubits needed for the empty sequence.
CliffordElement recovery_gate(const std::vector<CliffordElement>& sequence, int n_qubits);

}  // namespace fluxsim

#endif  // FLUXSIM_CLIFFORD_HPP_
