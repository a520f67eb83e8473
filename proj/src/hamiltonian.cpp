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

#include "fluxsim/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <lapacke.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "fluxsim/optimize.hpp"

namespace fluxsim {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite");
}

// Fourth-order first derivative with zero values beyond the walls.
VectorXd derivative(const VectorXd& v, double h) {
  const int n = static_cast<int>(v.size());
  VectorXd out(n);
  auto at = [&](int k) { return (k < 0 || k >= n) ? 0.0 : v(k); };
  for (int k = 0; k < n; ++k)
    out(k) = (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) / (12.0 * h);
  return out;
}

struct Bands {
  VectorXd d0, d1, d2;  // main, first and second super-diagonals
};

Bands hamiltonian_bands(const FluxoniumParams& p, const FluxGrid& g) {
  const int n = g.n_points;
  const double h = g.step();
  const double shift = kTwoPi * p.phi_ext;
  const double kin = 4.0 * p.ec / (12.0 * h * h);
  Bands b{VectorXd(n), VectorXd::Constant(n - 1, -16.0 * kin),
          VectorXd::Constant(n - 2, kin)};
  for (int k = 0; k < n; ++k) {
    double theta = g.point(k);
    b.d0(k) = 30.0 * kin + 0.5 * p.el * theta * theta - p.ej * std::cos(theta - shift);
  }
  return b;
}

void fix_sign(Eigen::Ref<VectorXd> v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (int k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > 1e-6 * peak) {
      if (v(k) < 0) v = -v;
      return;
    }
  }
}

std::string conditioning_info(const MatrixXd& h) {
  std::ostringstream os;
  os << "frobenius norm " << h.norm() << ", diagonal range [" << h.diagonal().minCoeff()
     << ", " << h.diagonal().maxCoeff() << "], asymmetry "
     << (h - h.transpose()).cwiseAbs().maxCoeff();
  return os.str();
}

Eigenbasis assemble(VectorXd energies, MatrixXd states, const FluxGrid& grid,
                    double phi_ext) {
  const int m = static_cast<int>(energies.size());
  const double h = grid.step();
  Eigenbasis b;
  for (int i = 0; i < m; ++i) fix_sign(states.col(i));
  MatrixXd dstates(states.rows(), m);
  for (int i = 0; i < m; ++i) dstates.col(i) = derivative(states.col(i), h);
  VectorXd phi(grid.n_points);
  for (int k = 0; k < grid.n_points; ++k) phi(k) = grid.point(k) - kTwoPi * phi_ext;

  MatrixXd a = states.transpose() * dstates;  // <i|d/dphi|j>, antisymmetric
  a = 0.5 * (a - a.transpose());
  b.n_mat = -kI * a.cast<cplx>();
  MatrixXd ph = states.transpose() * phi.asDiagonal() * states;
  ph = 0.5 * (ph + ph.transpose());
  b.phi_mat = ph.cast<cplx>();
  b.degenerate.assign(m, false);
  for (int i = 0; i + 1 < m; ++i) {
    double scale = std::max(1.0, std::abs(energies(i)));
    if (std::abs(energies(i + 1) - energies(i)) < 1e-9 * scale)
      b.degenerate[i] = b.degenerate[i + 1] = true;
  }
  b.energies = std::move(energies);
  b.states = std::move(states);
  return b;
}

}  // namespace

void FluxoniumParams::validate() const {
  require_finite(ec, "E_C");
  require_finite(el, "E_L");
  require_finite(ej, "E_J");
  require_finite(phi_ext, "phi_ext");
  if (ec <= 0) throw InvalidArgument("E_C must be positive");
  if (el <= 0) throw InvalidArgument("E_L must be positive");
  if (ej < 0) throw InvalidArgument("E_J must be non-negative");
}

void FluxGrid::validate() const {
  require_finite(phi_min, "phi_min");
  require_finite(phi_max, "phi_max");
  if (n_points < 201 || n_points % 2 == 0)
    throw InvalidArgument("grid needs an odd number of points, at least 201");
  if (!(phi_min < 0 && phi_max > 0))
    throw InvalidArgument("grid must bracket phi = 0");
  if (std::abs(phi_min + phi_max) > 1e-12 * phi_max)
    throw InvalidArgument("grid must be symmetric about phi = 0");
}

MatrixXd build_hamiltonian(const FluxoniumParams& params, const FluxGrid& grid) {
  params.validate();
  grid.validate();
  Bands b = hamiltonian_bands(params, grid);
  const int n = grid.n_points;
  MatrixXd h = MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) h(k, k) = b.d0(k);
  for (int k = 0; k + 1 < n; ++k) h(k, k + 1) = h(k + 1, k) = b.d1(k);
  for (int k = 0; k + 2 < n; ++k) h(k, k + 2) = h(k + 2, k) = b.d2(k);
  return h;
}

Eigenbasis eigensolve(const MatrixXd& h, int n_levels, const FluxGrid& grid,
                      double phi_ext) {
  grid.validate();
  const int n = static_cast<int>(h.rows());
  if (h.cols() != n) throw InvalidArgument("eigensolve: matrix must be square");
  if (n != grid.n_points) throw InvalidArgument("eigensolve: matrix size differs from grid");
  if (n_levels < 1 || n_levels > n)
    throw InvalidArgument("eigensolve: n_levels must lie in [1, n_points]");
  if (!h.allFinite()) throw InvalidArgument("eigensolve: non-finite matrix entries");

  MatrixXd a = h;  // LAPACK overwrites its input
  VectorXd w(n);
  MatrixXd z(n, n_levels);
  std::vector<lapack_int> isuppz(2 * static_cast<size_t>(n_levels));
  lapack_int found = 0;
  lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0,
                                   0.0, 1, n_levels, 0.0, &found, w.data(), z.data(), n,
                                   isuppz.data());
  if (info != 0 || found != n_levels)
    throw NumericalError("eigensolve: LAPACK dsyevr failed (info " + std::to_string(info) +
                         "); " + conditioning_info(h));
  return assemble(w.head(n_levels), std::move(z), grid, phi_ext);
}

Eigenbasis solve_fluxonium(const FluxoniumParams& params, int n_levels,
                           const FluxGrid& grid) {
  return eigensolve(build_hamiltonian(params, grid), n_levels, grid, params.phi_ext);
}

VectorXd lowest_energies(const FluxoniumParams& params, int n_levels,
                         const FluxGrid& grid) {
  params.validate();
  grid.validate();
  const int n = grid.n_points;
  if (n_levels < 1 || n_levels > n)
    throw InvalidArgument("lowest_energies: n_levels must lie in [1, n_points]");
  const Bands b = hamiltonian_bands(params, grid);
  // Number of eigenvalues below x from the inertia of the banded LDL^T
  // factorization of H - x.
  const double* a = b.d0.data();
  const double* e1 = b.d1.data();
  const double* e2 = b.d2.data();
  auto count_below = [&](double x) {
    auto fix = [](double v) { return v == 0.0 ? -1e-300 : v; };
    double dm2 = fix(a[0] - x);
    double l1p = e1[0] / dm2;
    double dm1 = fix(a[1] - x - l1p * e1[0]);
    int neg = (dm2 < 0) + (dm1 < 0);
    for (int k = 2; k < n; ++k) {
      const double l2 = e2[k - 2] / dm2;
      const double t = e1[k - 1] - e2[k - 2] * l1p;
      const double l1 = t / dm1;
      const double dk = fix(a[k] - x - l1 * t - l2 * e2[k - 2]);
      neg += dk < 0;
      dm2 = dm1;
      dm1 = dk;
      l1p = l1;
    }
    return neg;
  };
  // The fourth-order kinetic stencil is positive semidefinite, so the
  // potential minimum bounds the spectrum from below.
  const double kin = 4.0 * params.ec / (12.0 * grid.step() * grid.step());
  double lo = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) lo = std::min(lo, b.d0(k) - 30.0 * kin);
  double hi = lo + 1.0;
  while (count_below(hi) < n_levels) hi = lo + 2.0 * (hi - lo);
  std::vector<double> lower(n_levels, lo), upper(n_levels, hi);
  VectorXd out(n_levels);
  for (int i = 0; i < n_levels; ++i) {
    for (int it = 0; it < 200; ++it) {
      double a = lower[i], c = upper[i];
      double mid = 0.5 * (a + c);
      if (mid <= a || mid >= c || c - a <= 4e-16 * std::max(1.0, std::abs(mid))) break;
      int cnt = count_below(mid);
      for (int j = 0; j < n_levels; ++j) {
        if (j < cnt)
          upper[j] = std::min(upper[j], mid);
        else
          lower[j] = std::max(lower[j], mid);
      }
    }
    out(i) = 0.5 * (lower[i] + upper[i]);
  }
  return out;
}

TransitionFrequencies transition_frequencies(const FluxoniumParams& params,
                                             const FluxGrid& grid) {
  VectorXd e = lowest_energies(params, 3, grid);
  TransitionFrequencies t;
  t.omega10 = e(1) - e(0);
  t.omega21 = e(2) - e(1);
  t.omega20 = e(2) - e(0);
  t.anharmonicity = (t.omega21 - t.omega10) / t.omega10;
  return t;
}

double flux_sensitivity(const FluxoniumParams& params, const FluxGrid& grid,
                        double dphi) {
  if (!(dphi >= 1e-6 && dphi <= 1e-3))
    throw InvalidArgument("flux_sensitivity: step must lie in [1e-6, 1e-3]");
  auto w10 = [&](double phi) {
    FluxoniumParams p = params;
    p.phi_ext = phi;
    VectorXd e = lowest_energies(p, 2, grid);
    return e(1) - e(0);
  };
  return (w10(params.phi_ext + dphi) - w10(params.phi_ext - dphi)) / (2.0 * dphi);
}

SpectrumFit fit_spectrum(const std::vector<SpectrumPoint>& data,
                         const FluxoniumParams& guess, const FluxGrid& grid,
                         const SpectrumFitOptions& options) {
  guess.validate();
  if (data.size() < 6)
    throw InvalidArgument("fit_spectrum: underdetermined, need at least 6 data points");
  double lo = data.front().phi_ext, hi = lo;
  for (const auto& d : data) {
    require_finite(d.phi_ext, "flux");
    require_finite(d.freq_ghz, "frequency");
    lo = std::min(lo, d.phi_ext);
    hi = std::max(hi, d.phi_ext);
  }
  if (hi - lo < 0.1) throw InvalidArgument("fit_spectrum: data must span at least 0.1 flux quanta");

  auto params_of = [&](const VectorXd& x) {
    FluxoniumParams p = guess;
    p.ec = guess.ec * std::exp(x(0));
    p.el = guess.el * std::exp(x(1));
    p.ej = guess.ej * std::exp(x(2));
    return p;
  };
  auto residuals = [&](const FluxoniumParams& p) {
    VectorXd r(data.size());
    for (size_t i = 0; i < data.size(); ++i) {
      FluxoniumParams q = p;
      q.phi_ext = data[i].phi_ext;
      VectorXd e = lowest_energies(q, 3, grid);
      double model = data[i].label == Transition::kOmega10 ? e(1) - e(0) : e(2) - e(0);
      r(i) = model - data[i].freq_ghz;
    }
    return r;
  };

  SpectrumFit fit;
  if (guess.ej == 0.0) throw InvalidArgument("fit_spectrum: guess E_J must be positive");
  VectorXd r0 = residuals(guess);
  if (std::sqrt(r0.squaredNorm() / r0.size()) < 1e-12) {
    fit.params = guess;
    fit.residuals = r0;
    fit.rms = std::sqrt(r0.squaredNorm() / r0.size());
    fit.converged = true;
    return fit;
  }
  NelderMeadOptions nm;
  nm.max_iterations = options.max_iterations;
  nm.initial_step = VectorXd::Constant(3, options.initial_step);
  nm.ftol_abs = 1e-22;
  nm.ftol_rel = 1e-12;
  nm.xtol = 1e-7;
  auto objective = [&](const VectorXd& x) { return residuals(params_of(x)).squaredNorm(); };
  OptimResult r = nelder_mead(objective, VectorXd::Zero(3), nm);
  // One restart from the best point guards against a collapsed simplex.
  OptimResult r2 = nelder_mead(objective, r.x, nm);
  if (r2.f <= r.f) {
    r2.iterations += r.iterations;
    r = r2;
  } else {
    r.iterations += r2.iterations;
  }
  fit.params = params_of(r.x);
  fit.residuals = residuals(fit.params);
  fit.rms = std::sqrt(fit.residuals.squaredNorm() / fit.residuals.size());
  fit.iterations = r.iterations;
  fit.converged = r.converged;
  return fit;
}

void CoupledSystem::validate() const {
  qubit_a.validate();
  qubit_b.validate();
  grid.validate();
  require_finite(jc, "J_C");
  if (n_levels_each < 4) throw InvalidArgument("coupled system needs at least 4 levels per qubit");
  if (n_levels_each > 64) throw InvalidArgument("coupled system dimension above 64^2 rejected");
}

CoupledModel::CoupledModel(const CoupledSystem& system) : system_(system) {
  system_.validate();
  n_ = system_.n_levels_each;
  basis_a_ = solve_fluxonium(system_.qubit_a, n_, system_.grid);
  basis_b_ = solve_fluxonium(system_.qubit_b, n_, system_.grid);
  const MatrixXd id = MatrixXd::Identity(n_, n_);
  // n = -i A with A real antisymmetric, so n_A ⊗ n_B = -(A_A ⊗ A_B).
  MatrixXd aa = (kI * basis_a_.n_mat).real();
  MatrixXd ab = (kI * basis_b_.n_mat).real();
  MatrixXd ha = basis_a_.energies.asDiagonal();
  MatrixXd hb = basis_b_.energies.asDiagonal();
  h_ref_ = Eigen::kroneckerProduct(ha, id) + Eigen::kroneckerProduct(id, hb) -
           system_.jc * Eigen::kroneckerProduct(aa, ab);
  auto flux_op = [&](const FluxoniumParams& p, const Eigenbasis& b) {
    MatrixXd phi = b.phi_mat.real();
    return MatrixXd(p.el * kTwoPi *
                    (phi + kTwoPi * p.phi_ext * MatrixXd::Identity(n_, n_)));
  };
  single_dflux_a_ = flux_op(system_.qubit_a, basis_a_);
  single_dflux_b_ = flux_op(system_.qubit_b, basis_b_);
  dflux_a_ = Eigen::kroneckerProduct(single_dflux_a_, id);
  dflux_b_ = Eigen::kroneckerProduct(id, single_dflux_b_);
}

double CoupledModel::flux_offset_constant(int qubit, double delta) const {
  const double el = qubit == 0 ? system_.qubit_a.el : system_.qubit_b.el;
  return 0.5 * el * (kTwoPi * delta) * (kTwoPi * delta);
}

MatrixXd CoupledModel::hamiltonian(double phi_a, double phi_b) const {
  require_finite(phi_a, "phi_a");
  require_finite(phi_b, "phi_b");
  const double da = phi_a - system_.qubit_a.phi_ext;
  const double db = phi_b - system_.qubit_b.phi_ext;
  MatrixXd h = h_ref_;
  if (da != 0.0) {
    h += da * dflux_a_;
    h.diagonal().array() += flux_offset_constant(0, da);
  }
  if (db != 0.0) {
    h += db * dflux_b_;
    h.diagonal().array() += flux_offset_constant(1, db);
  }
  return h;
}

MatrixXcd CoupledModel::hamiltonian_complex(double phi_a, double phi_b) const {
  return hamiltonian(phi_a, phi_b).cast<cplx>();
}

MatrixXd CoupledModel::single_qubit_hamiltonian(int qubit, double phi_ext) const {
  const bool is_a = qubit == 0;
  const Eigenbasis& b = is_a ? basis_a_ : basis_b_;
  const double ref = is_a ? system_.qubit_a.phi_ext : system_.qubit_b.phi_ext;
  const double d = phi_ext - ref;
  MatrixXd h = b.energies.asDiagonal();
  h += d * (is_a ? single_dflux_a_ : single_dflux_b_);
  h.diagonal().array() += flux_offset_constant(qubit, d);
  return h;
}

DressedSpectrum dressed_spectrum(const CoupledModel& model, double phi_a, double phi_b) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(model.hamiltonian(phi_a, phi_b));
  if (es.info() != Eigen::Success) throw NumericalError("dressed_spectrum: eigensolver failed");
  DressedSpectrum ds;
  ds.energies = es.eigenvalues();
  ds.vectors = es.eigenvectors();
  std::vector<bool> taken(ds.energies.size(), false);
  for (int label = 0; label < 4; ++label) {
    int bare = model.index(label >> 1, label & 1);
    int best = -1;
    double best_ov = -1.0;
    for (int k = 0; k < ds.energies.size(); ++k) {
      double ov = ds.vectors(bare, k) * ds.vectors(bare, k);
      if (!taken[k] && ov > best_ov + 1e-12) {
        best_ov = ov;
        best = k;
      }
    }
    if (best_ov < 0.5)
      throw NumericalError("dressed_spectrum: ambiguous labelling for computational state " +
                           std::to_string(label >> 1) + std::to_string(label & 1));
    taken[best] = true;
    ds.computational[label] = best;
    ds.overlaps[label] = best_ov;
  }
  return ds;
}

double bare_frequency(const CoupledModel& model, int qubit, double phi_ext) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(model.single_qubit_hamiltonian(qubit, phi_ext),
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1) - es.eigenvalues()(0);
}

double resonance_flux(const CoupledModel& model, double window) {
  const double ref_a = model.system().qubit_a.phi_ext;
  const double target = bare_frequency(model, 1, model.system().qubit_b.phi_ext);
  auto f = [&](double phi) { return bare_frequency(model, 0, phi) - target; };
  const int n_scan = 200;
  double prev_x = ref_a, prev_f = f(ref_a);
  for (int i = 1; i <= n_scan; ++i) {
    double x = ref_a + window * i / n_scan;
    double fx = f(x);
    if ((fx > 0) != (prev_f > 0)) return find_root(f, prev_x, x, 1e-13);
    prev_x = x;
    prev_f = fx;
  }
  throw NumericalError("resonance_flux: no crossing in the scanned flux window");
}

double single_excitation_gap_mhz(const CoupledModel& model, double phi_a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(
      model.hamiltonian(phi_a, model.system().qubit_b.phi_ext));
  const MatrixXd& v = es.eigenvectors();
  const int i01 = model.index(0, 1), i10 = model.index(1, 0);
  double weight = 0.0;
  for (int k = 1; k <= 2; ++k) weight += v(i01, k) * v(i01, k) + v(i10, k) * v(i10, k);
  if (weight < 1.0)
    throw NumericalError("single_excitation_gap: levels 1 and 2 are not the exchange pair");
  return 1e3 * (es.eigenvalues()(2) - es.eigenvalues()(1));
}

ExchangeSplitting exchange_splitting(const CoupledModel& model) {
  ExchangeSplitting out;
  out.phi_a_resonance = resonance_flux(model);
  const double w = 2e-3;
  ScalarMin m = brent_minimize(
      [&](double x) { return single_excitation_gap_mhz(model, x); },
      out.phi_a_resonance - w, out.phi_a_resonance + w, 48);
  out.phi_a_minimum = m.x;
  out.splitting_mhz = m.f;
  // Brent converges slowly on the cusp of an exact crossing.
  double at_res = single_excitation_gap_mhz(model, out.phi_a_resonance);
  if (at_res < out.splitting_mhz) {
    out.splitting_mhz = at_res;
    out.phi_a_minimum = out.phi_a_resonance;
  }
  return out;
}

double calibrate_coupling(const CoupledSystem& system, double target_mhz, double jc_lo,
                          double jc_hi) {
  auto f = [&](double jc) {
    CoupledSystem s = system;
    s.jc = jc;
    return exchange_splitting(CoupledModel(s)).splitting_mhz - target_mhz;
  };
  return find_root(f, jc_lo, jc_hi, 1e-10);
}

double zz_rate(const CoupledModel& model) {
  DressedSpectrum ds = dressed_spectrum(model, model.system().qubit_a.phi_ext,
                                        model.system().qubit_b.phi_ext);
  auto e = [&](int label) { return ds.energies(ds.computational[label]); };
  return 1e3 * (e(3) - e(2) - e(1) + e(0));
}

}  // namespace fluxsim
