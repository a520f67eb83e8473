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

#include "fluxsim/clifford.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>

#include "fluxsim/fidelity.hpp"

namespace fluxsim {
namespace {

using P = Primitive;

// Single-qubit table in time order; lengths sum to 45.
const std::vector<std::vector<P>>& c1_table() {
  static const std::vector<std::vector<P>> table = {
      {P::kI},
      {P::kX},
      {P::kY},
      {P::kY, P::kX},
      {P::kX90, P::kY90},
      {P::kX90, P::kYm90},
      {P::kXm90, P::kY90},
      {P::kXm90, P::kYm90},
      {P::kY90, P::kX90},
      {P::kY90, P::kXm90},
      {P::kYm90, P::kX90},
      {P::kYm90, P::kXm90},
      {P::kX90},
      {P::kXm90},
      {P::kY90},
      {P::kYm90},
      {P::kXm90, P::kY90, P::kX90},
      {P::kXm90, P::kYm90, P::kX90},
      {P::kX, P::kY90},
      {P::kX, P::kYm90},
      {P::kY, P::kX90},
      {P::kY, P::kXm90},
      {P::kX90, P::kY90, P::kX90},
      {P::kXm90, P::kY90, P::kXm90},
  };
  return table;
}

std::vector<GateOp> on_qubit(const std::vector<P>& seq, int qubit) {
  std::vector<GateOp> ops;
  ops.reserve(seq.size());
  for (P p : seq) ops.push_back({p, qubit});
  return ops;
}

void append(std::vector<GateOp>& dst, const std::vector<GateOp>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

MatrixXcd embed(const Matrix2cd& g, int qubit, int n_qubits) {
  if (n_qubits == 1) return g;
  MatrixXcd out = MatrixXcd::Zero(4, 4);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < 2; ++k) {
        if (qubit == 0)
          out(2 * r + k, 2 * c + k) = g(r, c);
        else
          out(2 * k + r, 2 * k + c) = g(r, c);
      }
  return out;
}

std::vector<MatrixXcd> pauli_basis(int n_qubits) {
  const std::array<Matrix2cd, 4> p1 = {Matrix2cd::Identity(), pauli_x(), pauli_y(), pauli_z()};
  std::vector<MatrixXcd> out;
  if (n_qubits == 1) {
    for (const auto& p : p1) out.push_back(p);
    return out;
  }
  for (const auto& a : p1)
    for (const auto& b : p1) out.push_back(embed(a, 0, 2) * embed(b, 1, 2));
  return out;
}

}  // namespace

std::string primitive_name(Primitive p) {
  switch (p) {
    case P::kI: return "I";
    case P::kX: return "X";
    case P::kY: return "Y";
    case P::kX90: return "X90";
    case P::kXm90: return "X-90";
    case P::kY90: return "Y90";
    case P::kYm90: return "Y-90";
    case P::kIswap: return "iSWAP";
  }
  return "?";
}

std::optional<Primitive> primitive_from_name(const std::string& name) {
  for (P p : {P::kI, P::kX, P::kY, P::kX90, P::kXm90, P::kY90, P::kYm90, P::kIswap})
    if (primitive_name(p) == name) return p;
  return std::nullopt;
}

Matrix2cd primitive_unitary(Primitive p) {
  switch (p) {
    case P::kI: return Matrix2cd::Identity();
    case P::kX: return rotation_xy(0.0, kPi);
    case P::kY: return rotation_xy(kPi / 2, kPi);
    case P::kX90: return rotation_xy(0.0, kPi / 2);
    case P::kXm90: return rotation_xy(0.0, -kPi / 2);
    case P::kY90: return rotation_xy(kPi / 2, kPi / 2);
    case P::kYm90: return rotation_xy(kPi / 2, -kPi / 2);
    case P::kIswap: break;
  }
  throw InvalidArgument("primitive_unitary: iSWAP is not a single-qubit gate");
}

std::string class_name(CliffordClass c) {
  switch (c) {
    case CliffordClass::kSingle: return "single";
    case CliffordClass::kCnotLike: return "cnot-like";
    case CliffordClass::kIswapLike: return "iswap-like";
    case CliffordClass::kSwapLike: return "swap-like";
  }
  return "?";
}

MatrixXcd decomposition_unitary(const std::vector<GateOp>& ops, int n_qubits) {
  if (n_qubits != 1 && n_qubits != 2) throw InvalidArgument("decomposition_unitary: 1 or 2 qubits");
  const int d = 1 << n_qubits;
  MatrixXcd u = MatrixXcd::Identity(d, d);
  for (const auto& op : ops) {
    if (op.gate == P::kIswap) {
      if (n_qubits != 2) throw InvalidArgument("decomposition_unitary: iSWAP needs two qubits");
      u = MatrixXcd(iswap_unitary()) * u;
    } else {
      if (op.qubit < 0 || op.qubit >= n_qubits) throw InvalidArgument("decomposition_unitary: bad qubit");
      u = embed(primitive_unitary(op.gate), op.qubit, n_qubits) * u;
    }
  }
  return u;
}

MatrixXcd canonicalize(const MatrixXcd& u) {
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const cplx z = u.data()[j];
    if (std::abs(z) > 1e-6) return u * (std::conj(z) / std::abs(z));
  }
  throw InvalidArgument("canonicalize: zero matrix");
}

std::string canonical_key(const MatrixXcd& u) {
  const MatrixXcd c = canonicalize(u);
  std::string key(static_cast<std::size_t>(c.size()) * 2 * sizeof(std::int64_t), '\0');
  char* out = key.data();
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    const std::int64_t re = std::llround(c.data()[j].real() * 1e8);
    const std::int64_t im = std::llround(c.data()[j].imag() * 1e8);
    std::memcpy(out, &re, sizeof re);
    std::memcpy(out + sizeof re, &im, sizeof im);
    out += 2 * sizeof re;
  }
  return key;
}

bool is_clifford(const MatrixXcd& u, double tol) {
  const int d = static_cast<int>(u.rows());
  if (u.cols() != d || (d != 2 && d != 4)) return false;
  if ((u.adjoint() * u - MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() > tol) return false;
  const int n = d == 2 ? 1 : 2;
  const auto paulis = pauli_basis(n);
  for (std::size_t g = 1; g < paulis.size(); ++g) {
    const MatrixXcd m = u * paulis[g] * u.adjoint();
    bool found = false;
    for (const auto& q : paulis) {
      const cplx c = (q.adjoint() * m).trace() / static_cast<double>(d);
      if (std::abs(std::abs(c) - 1.0) > tol || std::abs(c.imag()) > tol) continue;
      if ((m - c.real() * q).cwiseAbs().maxCoeff() <= tol) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::array<cplx, 3> s1_phases() {
  const Matrix2cd s = 0.5 * (Matrix2cd::Identity() - kI * (pauli_x() + pauli_y() + pauli_z()));
  const auto decs = s1_decompositions(0);
  std::array<cplx, 3> out{};
  Matrix2cd power = Matrix2cd::Identity();
  for (int k = 0; k < 3; ++k) {
    const MatrixXcd u = decomposition_unitary(decs[k], 1);
    const cplx c = (power.adjoint() * u).trace() / 2.0;
    if ((u - c * power).cwiseAbs().maxCoeff() > 1e-12)
      throw NumericalError("S1 decomposition is not a power of S");
    out[k] = c;
    power = s * power;
  }
  return out;
}

std::vector<std::vector<GateOp>> s1_decompositions(int qubit) {
  return {on_qubit({P::kI}, qubit), on_qubit({P::kY90, P::kX90}, qubit),
          on_qubit({P::kXm90, P::kYm90}, qubit)};
}

CliffordGroup::CliffordGroup(int n_qubits) : n_qubits_(n_qubits) {
  const auto& table = c1_table();
  if (n_qubits == 1) {
    for (const auto& seq : table) {
      auto ops = on_qubit(seq, 0);
      add({canonicalize(decomposition_unitary(ops, 1)), ops, CliffordClass::kSingle});
    }
  } else {
    s1_phases();
    std::vector<std::vector<GateOp>> ca, cb;
    for (const auto& seq : table) {
      ca.push_back(on_qubit(seq, 0));
      cb.push_back(on_qubit(seq, 1));
    }
    const auto sa = s1_decompositions(0);
    const auto sb = s1_decompositions(1);
    const GateOp sw{P::kIswap, 0};
    auto emit = [&](CliffordClass tag, const std::vector<GateOp>& core, bool s_layer) {
      for (const auto& a : ca)
        for (const auto& b : cb) {
          const int ns = s_layer ? 3 : 1;
          for (int i = 0; i < ns; ++i)
            for (int j = 0; j < ns; ++j) {
              std::vector<GateOp> ops = a;
              append(ops, b);
              append(ops, core);
              if (s_layer) {
                append(ops, sa[i]);
                append(ops, sb[j]);
              }
              add({canonicalize(decomposition_unitary(ops, 2)), std::move(ops), tag});
            }
        }
    };
    emit(CliffordClass::kSingle, {}, false);
    emit(CliffordClass::kCnotLike, {sw, {P::kX90, 0}, sw}, true);
    emit(CliffordClass::kIswapLike, {sw}, true);
    emit(CliffordClass::kSwapLike, {sw, {P::kXm90, 1}, sw, {P::kXm90, 0}, sw}, false);
  }
  const int expected = n_qubits == 1 ? 24 : 11520;
  if (size() != expected) throw NumericalError("Clifford group has wrong size");
  for (const auto& e : elements_)
    if (!is_clifford(e.unitary)) throw NumericalError("Clifford group element fails Pauli check");
  identity_ = index_of(MatrixXcd::Identity(dim(), dim()));
}

void CliffordGroup::add(CliffordElement e) {
  const std::string key = canonical_key(e.unitary);
  if (!index_.emplace(key, size()).second)
    throw NumericalError("Clifford group construction produced a duplicate element");
  elements_.push_back(std::move(e));
}

const CliffordGroup& CliffordGroup::single() {
  static const CliffordGroup group(1);
  return group;
}

const CliffordGroup& CliffordGroup::two() {
  static const CliffordGroup group(2);
  return group;
}

std::optional<int> CliffordGroup::find(const MatrixXcd& u) const {
  if (u.rows() != dim() || u.cols() != dim()) return std::nullopt;
  const auto it = index_.find(canonical_key(u));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int CliffordGroup::index_of(const MatrixXcd& u) const {
  const auto i = find(u);
  if (!i) throw NumericalError("Clifford lookup miss");
  return *i;
}

int CliffordGroup::recovery(const std::vector<int>& sequence) const {
  MatrixXcd total = MatrixXcd::Identity(dim(), dim());
  for (int i : sequence) total = elements_.at(i).unitary * total;
  return index_of(total.adjoint());
}

double CliffordGroup::mean_length() const {
  double sum = 0.0;
  for (const auto& e : elements_) sum += static_cast<double>(e.decomposition.size());
  return sum / size();
}

double CliffordGroup::mean_iswap_count() const {
  double sum = 0.0;
  for (const auto& e : elements_)
    for (const auto& op : e.decomposition) sum += op.gate == P::kIswap ? 1.0 : 0.0;
  return sum / size();
}

double CliffordGroup::mean_single_count(int qubit) const {
  double sum = 0.0;
  for (const auto& e : elements_)
    for (const auto& op : e.decomposition) sum += (op.gate != P::kIswap && op.qubit == qubit) ? 1.0 : 0.0;
  return sum / size();
}

int CliffordGroup::class_size(CliffordClass c) const {
  int n = 0;
  for (const auto& e : elements_) n += e.class_tag == c ? 1 : 0;
  return n;
}

const std::vector<CliffordElement>& single_qubit_cliffords() { return CliffordGroup::single().elements(); }

const CliffordGroup& two_qubit_cliffords() { return CliffordGroup::two(); }

CliffordElement recovery_gate(const std::vector<CliffordElement>& sequence, int n_qubits) {
  const CliffordGroup& group = n_qubits == 1 ? CliffordGroup::single() : CliffordGroup::two();
  if (n_qubits != 1 && n_qubits != 2) throw InvalidArgument("recovery_gate: 1 or 2 qubits");
  std::vector<int> idx;
  idx.reserve(sequence.size());
  for (const auto& e : sequence) idx.push_back(group.index_of(e.unitary));
  return group[group.recovery(idx)];
}

}  // namespace fluxsim
