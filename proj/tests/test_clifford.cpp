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

#include <cmath>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fluxsim/clifford.hpp"
#include "fluxsim/fidelity.hpp"

namespace fluxsim {
namespace {

bool equal_up_to_phase(const MatrixXcd& a, const MatrixXcd& b, double tol) {
  const cplx overlap = (a.adjoint() * b).trace() / static_cast<double>(a.rows());
  if (std::abs(std::abs(overlap) - 1.0) > tol) return false;
  return (a * (overlap / std::abs(overlap)) - b).cwiseAbs().maxCoeff() <= tol;
}

MatrixXcd kron2(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
  return out;
}

// Images of X_A, Z_A, X_B, Z_B as (Pauli index, sign); a phase-free identity for a Clifford.
std::vector<int> tableau(const MatrixXcd& u) {
  const std::array<MatrixXcd, 4> p1 = {MatrixXcd(Matrix2cd::Identity()), MatrixXcd(pauli_x()),
                                       MatrixXcd(pauli_y()), MatrixXcd(pauli_z())};
  std::vector<MatrixXcd> basis;
  for (const auto& a : p1)
    for (const auto& b : p1) basis.push_back(kron2(a, b));
  const std::array<MatrixXcd, 4> gens = {kron2(p1[1], p1[0]), kron2(p1[3], p1[0]), kron2(p1[0], p1[1]),
                                         kron2(p1[0], p1[3])};
  std::vector<int> out;
  for (const auto& g : gens) {
    const MatrixXcd m = u * g * u.adjoint();
    int code = -1;
    for (int q = 0; q < 16; ++q) {
      const double c = ((basis[q] * m).trace() / 4.0).real();
      if (std::abs(std::abs(c) - 1.0) < 1e-9) code = c > 0 ? q : q + 16;
    }
    out.push_back(code);
  }
  return out;
}

TEST(SingleQubitCliffords, CountAndMeanLength) {
  const auto& c1 = single_qubit_cliffords();
  ASSERT_EQ(c1.size(), 24u);
  double total = 0;
  for (const auto& e : c1) total += e.decomposition.size();
  EXPECT_EQ(total, 45.0);
  EXPECT_DOUBLE_EQ(CliffordGroup::single().mean_length(), 1.875);
}

TEST(SingleQubitCliffords, ClosureOfHalfPiRotations) {
  std::vector<MatrixXcd> found = {MatrixXcd(Matrix2cd::Identity())};
  const std::vector<MatrixXcd> gens = {rotation_xy(0, kPi / 2), rotation_xy(kPi / 2, kPi / 2)};
  for (std::size_t i = 0; i < found.size(); ++i)
    for (const auto& g : gens) {
      const MatrixXcd next = g * found[i];
      bool seen = false;
      for (const auto& f : found) seen = seen || equal_up_to_phase(f, next, 1e-9);
      if (!seen) found.push_back(next);
    }
  ASSERT_EQ(found.size(), 24u);
  for (const auto& f : found) {
    int matches = 0;
    for (const auto& e : single_qubit_cliffords()) matches += equal_up_to_phase(e.unitary, f, 1e-9);
    EXPECT_EQ(matches, 1);
  }
}

TEST(SingleQubitCliffords, DecompositionsAndInverses) {
  const auto& g = CliffordGroup::single();
  for (int i = 0; i < g.size(); ++i) {
    const auto& e = g[i];
    EXPECT_TRUE(equal_up_to_phase(decomposition_unitary(e.decomposition, 1), e.unitary, 1e-10));
    const MatrixXcd inv = g[g.recovery({i})].unitary;
    EXPECT_TRUE(equal_up_to_phase(inv * e.unitary, Matrix2cd::Identity(), 1e-10));
    EXPECT_TRUE(is_clifford(e.unitary));
  }
  EXPECT_TRUE(equal_up_to_phase(g[g.identity_index()].unitary, Matrix2cd::Identity(), 1e-12));
}

TEST(SOneConvention, PhasesAgainstExponential) {
  // exp[-iπ(X+Y+Z)/(3√3)] = cos(π/3) - i sin(π/3)(X+Y+Z)/√3
  const Matrix2cd s = std::cos(kPi / 3) * Matrix2cd::Identity() -
                      kI * std::sin(kPi / 3) * (pauli_x() + pauli_y() + pauli_z()) / std::sqrt(3.0);
  const auto decs = s1_decompositions(0);
  const MatrixXcd u1 = rotation_xy(0, kPi / 2) * rotation_xy(kPi / 2, kPi / 2);
  EXPECT_LT((decomposition_unitary(decs[1], 1) - u1).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((u1 - s).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((decomposition_unitary(decs[2], 1) + s * s).cwiseAbs().maxCoeff(), 1e-12);
  const auto ph = s1_phases();
  EXPECT_NEAR(std::abs(ph[0] - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(ph[1] - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(ph[2] + 1.0), 0.0, 1e-12);
}

TEST(TwoQubitCliffords, CountsAndClasses) {
  const auto& g = two_qubit_cliffords();
  ASSERT_EQ(g.size(), 11520);
  EXPECT_EQ(g.class_size(CliffordClass::kSingle), 576);
  EXPECT_EQ(g.class_size(CliffordClass::kCnotLike), 5184);
  EXPECT_EQ(g.class_size(CliffordClass::kIswapLike), 5184);
  EXPECT_EQ(g.class_size(CliffordClass::kSwapLike), 576);
  EXPECT_DOUBLE_EQ(g.mean_iswap_count(), 1.5);
  EXPECT_DOUBLE_EQ(g.mean_single_count(0), 3.875);
  EXPECT_DOUBLE_EQ(g.mean_single_count(1), 3.425);
}

TEST(TwoQubitCliffords, TableausAreDistinct) {
  const auto& g = two_qubit_cliffords();
  std::set<std::vector<int>> seen;
  for (const auto& e : g.elements()) {
    const auto t = tableau(e.unitary);
    for (int c : t) ASSERT_GE(c, 0);
    seen.insert(t);
  }
  EXPECT_EQ(seen.size(), 11520u);
}

TEST(TwoQubitCliffords, DecompositionsReproduceUnitaries) {
  const auto& g = two_qubit_cliffords();
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, g.size() - 1);
  for (int n = 0; n < 1000; ++n) {
    const auto& e = g[pick(rng)];
    EXPECT_TRUE(equal_up_to_phase(decomposition_unitary(e.decomposition, 2), e.unitary, 1e-10));
  }
}

TEST(TwoQubitCliffords, ClosureUnderProducts) {
  const auto& g = two_qubit_cliffords();
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, g.size() - 1);
  for (int n = 0; n < 500; ++n) {
    const MatrixXcd prod = g[pick(rng)].unitary * g[pick(rng)].unitary;
    const auto idx = g.find(prod * std::polar(1.0, 0.37 * n));
    ASSERT_TRUE(idx.has_value());
    EXPECT_TRUE(equal_up_to_phase(g[*idx].unitary, prod, 1e-10));
  }
}

TEST(TwoQubitCliffords, NamedGatesLandInTheirClasses) {
  const auto& g = two_qubit_cliffords();
  MatrixXcd cnot = MatrixXcd::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  MatrixXcd swap = MatrixXcd::Zero(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
  EXPECT_EQ(g[g.index_of(cnot)].class_tag, CliffordClass::kCnotLike);
  EXPECT_EQ(g[g.index_of(swap)].class_tag, CliffordClass::kSwapLike);
  EXPECT_EQ(g[g.index_of(iswap_unitary())].class_tag, CliffordClass::kIswapLike);
  EXPECT_EQ(g[g.identity_index()].class_tag, CliffordClass::kSingle);
}

TEST(Recovery, RandomSequencesReturnToIdentity) {
  for (int n_qubits : {1, 2}) {
    const auto& g = n_qubits == 1 ? CliffordGroup::single() : CliffordGroup::two();
    std::mt19937_64 rng(11 + n_qubits);
    std::uniform_int_distribution<int> pick(0, g.size() - 1);
    for (int s = 0; s < 100; ++s) {
      std::vector<CliffordElement> seq;
      for (int j = 0; j < 20; ++j) seq.push_back(g[pick(rng)]);
      const CliffordElement r = recovery_gate(seq, n_qubits);
      MatrixXcd total = MatrixXcd::Identity(g.dim(), g.dim());
      for (const auto& e : seq) total = decomposition_unitary(e.decomposition, n_qubits) * total;
      total = decomposition_unitary(r.decomposition, n_qubits) * total;
      EXPECT_TRUE(equal_up_to_phase(total, MatrixXcd::Identity(g.dim(), g.dim()), 1e-9));
    }
  }
}

TEST(Recovery, EmptyAndSingle) {
  const auto& g = CliffordGroup::single();
  EXPECT_EQ(g.recovery({}), g.identity_index());
  EXPECT_TRUE(equal_up_to_phase(recovery_gate({}, 2).unitary, Matrix4cd::Identity(), 1e-12));
  const auto& c = g[7];
  EXPECT_TRUE(equal_up_to_phase(recovery_gate({c}, 1).unitary, c.unitary.adjoint(), 1e-12));
}

TEST(Canonical, KeyIgnoresGlobalPhase) {
  const auto& g = two_qubit_cliffords();
  for (int i = 0; i < g.size(); i += 97) {
    const MatrixXcd u = decomposition_unitary(g[i].decomposition, 2);
    EXPECT_EQ(canonical_key(u * std::polar(1.0, 2.1)), canonical_key(g[i].unitary));
  }
  EXPECT_THROW(g.index_of(MatrixXcd(Matrix4cd::Identity() * 0.5)), NumericalError);
}

TEST(IsClifford, RejectsNonClifford) {
  Matrix2cd h;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  EXPECT_TRUE(is_clifford(h));
  EXPECT_FALSE(is_clifford(rotation_z(kPi / 4)));
  EXPECT_FALSE(is_clifford(rotation_xy(0.3, 1.1)));
}

TEST(Primitives, NamesRoundTrip) {
  for (Primitive p : {Primitive::kI, Primitive::kX, Primitive::kY, Primitive::kX90, Primitive::kXm90,
                      Primitive::kY90, Primitive::kYm90, Primitive::kIswap})
    EXPECT_EQ(primitive_from_name(primitive_name(p)), p);
  EXPECT_FALSE(primitive_from_name("Z").has_value());
  EXPECT_THROW(primitive_unitary(Primitive::kIswap), InvalidArgument);
}

}  // namespace
}  // namespace fluxsim
