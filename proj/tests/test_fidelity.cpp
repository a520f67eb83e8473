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
#include <random>

#include <gtest/gtest.h>

#include "fluxsim/fidelity.hpp"
#include "fluxsim/optimize.hpp"

namespace fluxsim {
namespace {

MatrixXcd random_unitary(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<MatrixXcd> qr(m);
  return qr.householderQ() * MatrixXcd::Identity(n, n);
}

Matrix4cd partial_swap(double theta) {
  Matrix4cd u = Matrix4cd::Zero();
  u(0, 0) = 1.0;
  u(3, 3) = 1.0;
  u(1, 1) = u(2, 2) = std::cos(theta);
  u(1, 2) = u(2, 1) = -kI * std::sin(theta);
  return u;
}

TEST(Leakage, ZeroForUnitaryBlock) {
  std::mt19937_64 rng(4);
  EXPECT_NEAR(leakage(random_unitary(rng, 2)), 0.0, 1e-14);
}

TEST(Leakage, MatchesBruteForceMinimum) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const MatrixXcd u = random_unitary(rng, 5);
    const MatrixXcd v = u.topLeftCorner(2, 2);
    auto kept = [&](double th, double ph) {
      const Eigen::Vector2cd psi(std::cos(th / 2), std::polar(std::sin(th / 2), ph));
      return (v * psi).squaredNorm();
    };
    // 10^4 random inputs on the Bloch sphere, best one polished by a simplex.
    std::uniform_real_distribution<double> uz(-1.0, 1.0), uph(0.0, kTwoPi);
    double worst = 2.0, th_best = 0.0, ph_best = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const double th = std::acos(uz(rng));
      const double ph = uph(rng);
      const double p = kept(th, ph);
      if (p < worst) {
        worst = p;
        th_best = th;
        ph_best = ph;
      }
    }
    NelderMeadOptions o;
    o.xtol = 1e-12;
    o.ftol_abs = 1e-17;
    o.initial_step = VectorXd::Constant(2, 0.01);
    const OptimResult polished = nelder_mead(
        [&](const VectorXd& x) { return kept(x(0), x(1)); }, Eigen::Vector2d(th_best, ph_best), o);
    const double r = leakage(u, 2);
    EXPECT_LE(1.0 - worst, r + 1e-12);
    EXPECT_NEAR(r, 1.0 - polished.f, 1e-10);
  }
}

TEST(Leakage, RejectsBadDimension) {
  EXPECT_THROW(leakage(MatrixXcd::Identity(3, 3), 0), InvalidArgument);
  EXPECT_THROW(leakage(MatrixXcd::Identity(3, 3), 4), InvalidArgument);
}

TEST(AverageFidelity, IdenticalIsOne) {
  EXPECT_NEAR(average_fidelity(iswap_unitary(), iswap_unitary()), 1.0, 1e-15);
}

TEST(AverageFidelity, GlobalPhaseInvariant) {
  std::mt19937_64 rng(6);
  const MatrixXcd u = random_unitary(rng, 4);
  const MatrixXcd t = random_unitary(rng, 4);
  const double f = average_fidelity(u, t);
  EXPECT_EQ(average_fidelity(u * std::polar(1.0, 0.7), t), average_fidelity(u, t));
  EXPECT_NEAR(average_fidelity(u * std::polar(1.0, 0.7), t), f, 1e-15);
  EXPECT_NEAR(average_fidelity(u, t * std::polar(1.0, -2.1)), f, 1e-15);
}

TEST(AverageFidelity, HandEvaluatedPauliZ) {
  EXPECT_NEAR(average_fidelity(pauli_z(), Matrix2cd::Identity()), 1.0 / 3.0, 1e-15);
}

TEST(AverageFidelity, LeakyBlockBelowOne) {
  const MatrixXcd v = 0.99 * MatrixXcd::Identity(2, 2);
  EXPECT_NEAR(average_fidelity(v, MatrixXcd::Identity(2, 2)), (2 * 0.9801 + 4 * 0.9801) / 6.0, 1e-15);
}

TEST(AverageFidelity, DimensionMismatch) {
  EXPECT_THROW(average_fidelity(MatrixXcd::Identity(2, 2), MatrixXcd::Identity(4, 4)), InvalidArgument);
}

TEST(Rotations, Conventions) {
  EXPECT_LT((rotation_xy(0.0, kPi) + kI * pauli_x()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((rotation_xy(kPi / 2, kPi) + kI * pauli_y()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((rotation_z(kPi) + kI * pauli_z()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(VirtualZ, IdealIswap) {
  const VirtualZResult r = fidelity_with_virtual_z(iswap_unitary());
  EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
  for (double a : r.angles) EXPECT_NEAR(std::remainder(a, kPi), 0.0, 1e-6);
}

TEST(VirtualZ, RecoversArbitraryFrameRotations) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int trial = 0; trial < 5; ++trial) {
    const VirtualZAngles th{u(rng), u(rng), u(rng), u(rng)};
    const Matrix4cd skewed = apply_virtual_z(iswap_unitary(), th) * std::polar(1.0, u(rng));
    const VirtualZResult r = fidelity_with_virtual_z(skewed);
    EXPECT_NEAR(r.fidelity, 1.0, 1e-10);
    EXPECT_NEAR(average_fidelity(apply_virtual_z(skewed, r.angles), iswap_unitary()), r.fidelity, 1e-12);
  }
}

// Brute-force oracle: coarse 4-D grid, then compass search with halving steps.
double grid_oracle(const Matrix4cd& u) {
  auto f = [&](const VirtualZAngles& a) {
    return average_fidelity(apply_virtual_z(u, a), iswap_unitary());
  };
  const int n = 16;
  VirtualZAngles best{};
  double fb = -1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const VirtualZAngles a{kTwoPi * i / n, kTwoPi * j / n, kTwoPi * k / n, kTwoPi * l / n};
          const double v = f(a);
          if (v > fb) {
            fb = v;
            best = a;
          }
        }
  for (double step = kTwoPi / n; step > 1e-3 / 64; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (int d = 0; d < 4; ++d)
        for (double sgn : {-1.0, 1.0}) {
          VirtualZAngles a = best;
          a[d] += sgn * step;
          const double v = f(a);
          if (v > fb) {
            fb = v;
            best = a;
            moved = true;
          }
        }
    }
  }
  return fb;
}

TEST(VirtualZ, SwapAngleErrorMatchesGridOracle) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  Matrix4cd cphase = Matrix4cd::Identity();
  cphase(3, 3) = std::polar(1.0, 0.05);
  const Matrix4cd raw = cphase * partial_swap(kPi / 2 + 0.01);
  const Matrix4cd skewed = apply_virtual_z(raw, {u(rng), u(rng), u(rng), u(rng)});
  const VirtualZResult r = fidelity_with_virtual_z(skewed);
  const double oracle = grid_oracle(skewed);
  EXPECT_NEAR(r.fidelity, oracle, 1e-6);
  EXPECT_GE(r.fidelity, oracle - 1e-12);
  EXPECT_LT(r.fidelity, 1.0 - 1e-5);
}

TEST(PostZ, RemovesPhaseOffset) {
  const Matrix2cd x = rotation_xy(0.0, kPi);
  const Matrix2cd skewed = rotation_z(0.3) * x;
  const double alpha = best_post_z(skewed, x);
  EXPECT_NEAR(average_fidelity(apply_post_z(skewed, alpha), x), 1.0, 1e-14);
}

}  // namespace
}  // namespace fluxsim
