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

#include "fluxsim/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace fluxsim {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
constexpr double kBStar[7] = {5179.0 / 57600, 0,          7571.0 / 16695, 393.0 / 640,
                              -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

// Reference K = W diag(D) W† and the operators rotated into its eigenbasis.
struct Reference {
  MatrixXcd w;
  VectorXd d;
  std::vector<MatrixXcd> rot;
  std::vector<MatrixXd> rot_real;  // filled when every rotated operator is real
  std::vector<double> coeff;       // coefficients folded into K

  Reference(const TimeDependentHamiltonian& h, std::vector<double> c) : coeff(std::move(c)) {
    MatrixXcd k = h.h0;
    for (size_t i = 0; i < coeff.size(); ++i)
      if (coeff[i] != 0.0) k += coeff[i] * h.ops[i];
    if (k.imag().isZero(0.0)) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(k.real());
      if (es.info() != Eigen::Success) throw NumericalError("evolve: reference diagonalization failed");
      w = es.eigenvectors().cast<cplx>();
      d = es.eigenvalues();
    } else {
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(k);
      if (es.info() != Eigen::Success) throw NumericalError("evolve: reference diagonalization failed");
      w = es.eigenvectors();
      d = es.eigenvalues();
    }
    rot.reserve(h.ops.size());
    bool real = true;
    for (const auto& op : h.ops) {
      rot.push_back(w.adjoint() * op * w);
      real = real && rot.back().imag().isZero(0.0);
    }
    if (real)
      for (const auto& r : rot) rot_real.push_back(r.real());
  }
};

// One interaction-picture segment starting at a.
class Segment {
 public:
  Segment(const TimeDependentHamiltonian& h, const Reference& ref, double a)
      : h_(h), ref_(ref), a_(a), coeff_(h.ops.size(), 0.0) {}

  // dy/dt at time t for interaction-picture state y.
  void rhs(double t, const MatrixXcd& y, MatrixXcd& out) {
    const double s = t - a_;
    const int n = static_cast<int>(ref_.d.size());
    phase_.resize(n);
    for (int i = 0; i < n; ++i) phase_(i) = std::polar(1.0, -kTwoPi * ref_.d(i) * s);
    u_ = phase_.asDiagonal() * y;
    out.setZero(y.rows(), y.cols());
    if (!ref_.rot.empty()) h_.coefficients(t, coeff_.data());
    for (size_t k = 0; k < ref_.rot.size(); ++k) {
      const double c = coeff_[k] - ref_.coeff[k];
      if (c == 0.0) continue;
      if (ref_.rot_real.empty()) {
        out.noalias() += c * (ref_.rot[k] * u_);
      } else {
        out.real().noalias() += c * (ref_.rot_real[k] * u_.real());
        out.imag().noalias() += c * (ref_.rot_real[k] * u_.imag());
      }
    }
    out = (-kI * kTwoPi) * (phase_.conjugate().asDiagonal() * out);
  }

  MatrixXcd to_interaction(const MatrixXcd& psi) const { return ref_.w.adjoint() * psi; }

  MatrixXcd from_interaction(const MatrixXcd& y, double t) const {
    const int n = static_cast<int>(ref_.d.size());
    VectorXcd ph(n);
    for (int i = 0; i < n; ++i) ph(i) = std::polar(1.0, -kTwoPi * ref_.d(i) * (t - a_));
    return ref_.w * (ph.asDiagonal() * y);
  }

 private:
  const TimeDependentHamiltonian& h_;
  const Reference& ref_;
  double a_;
  std::vector<double> coeff_;
  VectorXcd phase_;
  MatrixXcd u_;
};

double error_norm(const MatrixXcd& err, const MatrixXcd& y0, const MatrixXcd& y1,
                  const EvolutionOptions& o) {
  double worst = 0.0;
  for (int j = 0; j < err.cols(); ++j)
    for (int i = 0; i < err.rows(); ++i) {
      const double scale = o.abs_tol + o.rel_tol * std::max(std::abs(y0(i, j)), std::abs(y1(i, j)));
      worst = std::max(worst, std::abs(err(i, j)) / scale);
    }
  return worst;
}

void integrate_segment(Segment& seg, MatrixXcd& y, double a, double b,
                       const EvolutionOptions& o, EvolutionStats& st, double& h_guess) {
  MatrixXcd k[7];
  MatrixXcd tmp, ynew, err;
  double t = a;
  double h = std::min(h_guess, b - a);
  seg.rhs(t, y, k[0]);
  while (t < b) {
    if (st.steps + st.rejected > o.max_steps)
      throw NumericalError("evolve: step budget exhausted at t = " + std::to_string(t) + " ns");
    bool last = false;
    if (t + h >= b || b - (t + h) < 1e-12 * std::max(1.0, std::abs(b))) {
      h = b - t;
      last = true;
    }
    for (int s = 1; s < 7; ++s) {
      tmp = y;
      for (int j = 0; j < s; ++j)
        if (kA[s][j] != 0.0) tmp.noalias() += (h * kA[s][j]) * k[j];
      seg.rhs(t + kC[s] * h, tmp, k[s]);
    }
    ynew = tmp;  // stage 7 argument equals the 5th-order solution
    err.setZero(y.rows(), y.cols());
    for (int s = 0; s < 7; ++s)
      if (kB[s] != kBStar[s]) err.noalias() += (h * (kB[s] - kBStar[s])) * k[s];
    const double en = error_norm(err, y, ynew, o);
    // At the step floor a modest miss is accepted and flagged.
    if (en <= 1.0 || (h <= o.min_step && en <= 100.0)) {
      if (en > 1.0) st.tolerance_met = false;
      t = last ? b : t + h;
      y.swap(ynew);
      k[0].swap(k[6]);
      ++st.steps;
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      if (!last) h_guess = h * fac;
      h *= fac;
    } else {
      ++st.rejected;
      h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
      if (h < o.min_step) {
        std::ostringstream os;
        os << "evolve: step size underflow at t = " << t << " ns";
        throw NumericalError(os.str());
      }
    }
  }
}

}  // namespace

void EvolutionOptions::validate() const {
  if (!(rel_tol >= 1e-13 && rel_tol <= 1e-6) || !(abs_tol >= 1e-13 && abs_tol <= 1e-6))
    throw InvalidArgument("integrator tolerances must lie in [1e-13, 1e-6]");
  if (!(max_segment > 0)) throw InvalidArgument("segment length must be positive");
  if (!(min_step > 0)) throw InvalidArgument("minimum step must be positive");
}

MatrixXcd TimeDependentHamiltonian::at(double t) const {
  MatrixXcd h = h0;
  if (!ops.empty()) {
    std::vector<double> c(ops.size());
    coefficients(t, c.data());
    for (size_t k = 0; k < ops.size(); ++k) h += c[k] * ops[k];
  }
  return h;
}

std::vector<MatrixXcd> evolve(const TimeDependentHamiltonian& h, const MatrixXcd& initial,
                              double t0, const std::vector<double>& stops,
                              const EvolutionOptions& options, EvolutionStats* stats) {
  options.validate();
  const int d = h.dim();
  if (h.h0.cols() != d || initial.rows() != d)
    throw InvalidArgument("evolve: dimension mismatch");
  for (const auto& op : h.ops)
    if (op.rows() != d || op.cols() != d) throw InvalidArgument("evolve: operator dimension mismatch");
  if (!h.ops.empty() && !h.coefficients) throw InvalidArgument("evolve: missing coefficient function");
  for (int j = 0; j < initial.cols(); ++j)
    if (std::abs(initial.col(j).norm() - 1.0) > 1e-9)
      throw InvalidArgument("evolve: initial states must be normalized");
  double prev = t0;
  for (double s : stops) {
    if (!(s >= prev)) throw InvalidArgument("evolve: stop times must be ascending and >= t0");
    prev = s;
  }

  EvolutionStats st;
  std::vector<MatrixXcd> out;
  out.reserve(stops.size());
  MatrixXcd psi = initial;
  double t = t0;
  double h_guess = 1e-3;
  const bool frozen = h.reference == TimeDependentHamiltonian::Reference::kFrozen;
  const size_t nops = h.ops.size();
  std::unique_ptr<Reference> ref;
  if (!frozen) ref = std::make_unique<Reference>(h, std::vector<double>(nops, 0.0));
  std::vector<double> mid(nops);
  for (double stop : stops) {
    while (t < stop) {
      double b = stop;
      if (frozen) {
        const int pieces = static_cast<int>(std::ceil((stop - t) / options.max_segment - 1e-9));
        b = pieces <= 1 ? stop : t + (stop - t) / pieces;
        if (nops > 0) h.coefficients(0.5 * (t + b), mid.data());
        // Any reference is exact; a new one only pays off when H has moved.
        bool reuse = ref != nullptr;
        for (size_t i = 0; reuse && i < nops; ++i)
          reuse = std::abs(mid[i] - ref->coeff[i]) <= 1e-12 * std::max(1.0, std::abs(mid[i]));
        if (!reuse) ref = std::make_unique<Reference>(h, mid);
      }
      Segment seg(h, *ref, t);
      MatrixXcd y = seg.to_interaction(psi);
      integrate_segment(seg, y, t, b, options, st, h_guess);
      psi = seg.from_interaction(y, b);
      ++st.segments;
      t = b;
    }
    out.push_back(psi);
  }
  if (stats) *stats = st;
  return out;
}

MatrixXcd evolve(const TimeDependentHamiltonian& h, const MatrixXcd& initial, double t0,
                 double t1, const EvolutionOptions& options, EvolutionStats* stats) {
  return evolve(h, initial, t0, std::vector<double>{t1}, options, stats).front();
}

MatrixXcd propagator(const TimeDependentHamiltonian& h, double t0, double t1,
                     const EvolutionOptions& options, EvolutionStats* stats) {
  return evolve(h, MatrixXcd::Identity(h.dim(), h.dim()), t0, t1, options, stats);
}

MatrixXcd hermitian_exp(const MatrixXcd& h, double t) {
  const int n = static_cast<int>(h.rows());
  VectorXcd ph(n);
  if (h.imag().isZero(0.0)) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h.real());
    for (int i = 0; i < n; ++i) ph(i) = std::polar(1.0, -kTwoPi * es.eigenvalues()(i) * t);
    const MatrixXcd v = es.eigenvectors().cast<cplx>();
    return v * ph.asDiagonal() * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  for (int i = 0; i < n; ++i) ph(i) = std::polar(1.0, -kTwoPi * es.eigenvalues()(i) * t);
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

MatrixXcd evolve_trotter(const TimeDependentHamiltonian& h, const MatrixXcd& initial,
                         double t0, double t1, double dt) {
  if (!(dt > 0)) throw InvalidArgument("evolve_trotter: step must be positive");
  const long n = std::max(1L, static_cast<long>(std::llround((t1 - t0) / dt)));
  const double step = (t1 - t0) / n;
  MatrixXcd psi = initial;
  std::vector<double> c(h.ops.size()), last;
  MatrixXcd u;
  for (long k = 0; k < n; ++k) {
    const double mid = t0 + (k + 0.5) * step;
    if (!h.ops.empty()) h.coefficients(mid, c.data());
    bool same = u.size() != 0;
    for (size_t i = 0; same && i < c.size(); ++i)
      same = std::abs(c[i] - last[i]) <= 1e-15 * std::max(1.0, std::abs(c[i]));
    if (!same) {
      MatrixXcd hm = h.h0;
      for (size_t i = 0; i < c.size(); ++i) hm += c[i] * h.ops[i];
      u = hermitian_exp(hm, step);
      last = c;
    }
    psi = u * psi;
  }
  return psi;
}

double unitarity_defect(const MatrixXcd& u) {
  return (u.adjoint() * u - MatrixXcd::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace fluxsim
