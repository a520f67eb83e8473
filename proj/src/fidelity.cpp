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

#include "fluxsim/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fluxsim/optimize.hpp"

namespace fluxsim {

double leakage(const MatrixXcd& v) {
  if (v.rows() == 0 || v.cols() == 0) throw InvalidArgument("leakage: empty block");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(v.adjoint() * v, Eigen::EigenvaluesOnly);
  return std::clamp(1.0 - es.eigenvalues()(0), 0.0, 1.0);
}

double leakage(const MatrixXcd& u_full, int computational) {
  if (computational <= 0 || computational > u_full.rows() || computational > u_full.cols())
    throw InvalidArgument("leakage: bad computational dimension");
  return leakage(u_full.topLeftCorner(computational, computational));
}

double average_fidelity(const MatrixXcd& u, const MatrixXcd& target) {
  if (u.rows() != u.cols() || target.rows() != target.cols() || u.rows() != target.rows())
    throw InvalidArgument("average_fidelity: dimension mismatch");
  const double d = static_cast<double>(u.rows());
  const double f = ((u.adjoint() * u).trace().real() + std::norm((target.adjoint() * u).trace())) /
                   (d * (d + 1.0));
  return std::clamp(f, 0.0, 1.0);
}

Matrix4cd iswap_unitary() {
  Matrix4cd u = Matrix4cd::Zero();
  u(0, 0) = 1.0;
  u(3, 3) = 1.0;
  u(1, 2) = -kI;
  u(2, 1) = -kI;
  return u;
}

Matrix2cd pauli_x() {
  Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2cd pauli_y() {
  Matrix2cd m;
  m << 0, -kI, kI, 0;
  return m;
}

Matrix2cd pauli_z() {
  Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Matrix2cd rotation_xy(double phi, double theta) {
  const Matrix2cd axis = std::cos(phi) * pauli_x() + std::sin(phi) * pauli_y();
  return std::cos(theta / 2) * Matrix2cd::Identity() - kI * std::sin(theta / 2) * axis;
}

Matrix2cd rotation_z(double theta) {
  Matrix2cd m = Matrix2cd::Zero();
  m(0, 0) = std::polar(1.0, -theta / 2);
  m(1, 1) = std::polar(1.0, theta / 2);
  return m;
}

namespace {

Eigen::Vector4cd z_phases(double theta_a, double theta_b) {
  Eigen::Vector4cd p;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      p(2 * a + b) = std::polar(1.0, theta_a * (a ? -1 : 1) + theta_b * (b ? -1 : 1));
  return p;
}

double wrap(double x) { return std::remainder(x, kTwoPi); }

}  // namespace

Matrix4cd apply_virtual_z(const Matrix4cd& u, const VirtualZAngles& th) {
  const Eigen::Vector4cd left = z_phases(th[0], th[2]);
  const Eigen::Vector4cd right = z_phases(th[1], th[3]);
  return left.asDiagonal() * u * right.asDiagonal();
}

VirtualZResult fidelity_with_virtual_z(const Matrix4cd& u, const Matrix4cd& target,
                                       unsigned long long seed) {
  auto to_angles = [](const VectorXd& x) { return VirtualZAngles{x(0), x(1), x(2), x(3)}; };
  auto objective = [&](const VectorXd& x) {
    return -average_fidelity(apply_virtual_z(u, to_angles(x)), target);
  };

  // The iSWAP-pattern entries depend on θ only through s = ΣΘ and
  // d = θ_Aa - θ_Ba - θ_Ab + θ_Bb; align their phases pairwise.
  const cplx a = std::conj(target(0, 0)) * u(0, 0);
  const cplx b = std::conj(target(3, 3)) * u(3, 3);
  const cplx c = std::conj(target(1, 2)) * u(1, 2);
  const cplx e = std::conj(target(2, 1)) * u(2, 1);
  const double s0 = 0.5 * (std::arg(b) - std::arg(a));
  const double d0 = 0.5 * (std::arg(e) - std::arg(c));
  std::vector<VectorXd> starts;
  for (double ds : {0.0, kPi}) {
    const double s = s0 + ds;
    VectorXd x(4);
    x << 0.5 * (s + d0), 0.0, 0.5 * (s - d0), 0.0;
    starts.push_back(x);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-kPi, kPi);
  for (int r = 0; r < 8; ++r) {
    VectorXd x(4);
    for (int i = 0; i < 4; ++i) x(i) = uni(rng);
    starts.push_back(x);
  }

  NelderMeadOptions opts;
  opts.initial_step = VectorXd::Constant(4, 0.3);
  opts.xtol = 1e-10;
  opts.max_iterations = 4000;
  OptimResult best;
  best.f = 1.0;
  for (const auto& x0 : starts) {
    OptimResult r = nelder_mead(objective, x0, opts);
    // Second pass from the optimum with a small simplex.
    NelderMeadOptions polish = opts;
    polish.initial_step = VectorXd::Constant(4, 1e-3);
    OptimResult p = nelder_mead(objective, r.x, polish);
    if (p.f <= r.f) r = p;
    if (r.f < best.f) best = r;
  }

  VirtualZResult out;
  out.fidelity = -best.f;
  out.converged = best.converged;
  VirtualZAngles raw = to_angles(best.x);
  for (double& t : raw) t = wrap(t);
  out.angles = raw;

  // Canonical representative along the directions F does not depend on.
  const double s = wrap(raw[0] + raw[1] + raw[2] + raw[3]);
  const double d = wrap(raw[0] - raw[2] - raw[1] + raw[3]);
  const VirtualZAngles canon{wrap(0.5 * (s + d)), 0.0, wrap(0.5 * (s - d)), 0.0};
  const double fc = average_fidelity(apply_virtual_z(u, canon), target);
  if (fc >= out.fidelity - 1e-14) {
    out.angles = canon;
    out.fidelity = std::max(out.fidelity, fc);
  }
  return out;
}

double best_post_z(const Matrix2cd& u, const Matrix2cd& target) {
  const cplx x = std::conj(target(0, 0)) * u(0, 0) + std::conj(target(0, 1)) * u(0, 1);
  const cplx y = std::conj(target(1, 0)) * u(1, 0) + std::conj(target(1, 1)) * u(1, 1);
  if (std::abs(x) == 0.0 || std::abs(y) == 0.0) return 0.0;
  return wrap(0.5 * (std::arg(y) - std::arg(x)));
}

Matrix2cd apply_post_z(const Matrix2cd& u, double alpha) {
  Matrix2cd d = Matrix2cd::Zero();
  d(0, 0) = std::polar(1.0, alpha);
  d(1, 1) = std::polar(1.0, -alpha);
  return d * u;
}

}  // namespace fluxsim
