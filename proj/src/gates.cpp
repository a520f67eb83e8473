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

#include "fluxsim/gates.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fluxsim/optimize.hpp"
#include "fluxsim/parallel.hpp"

namespace fluxsim {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

DrivenQubit::DrivenQubit(const FluxoniumParams& params, int n_levels, const FluxGrid& grid)
    : params_(params) {
  if (n_levels < 2) throw InvalidArgument("DrivenQubit: need at least two levels");
  basis_ = solve_fluxonium(params, n_levels, grid);
  const cplx n = basis_.n_mat(0, 1);
  if (std::abs(n) < 1e-12) throw InvalidArgument("DrivenQubit: 0-1 transition is not driven by n");
  basis_phase_ = std::conj(n) / std::abs(n);
}

double DrivenQubit::pi_amplitude(double duration) const {
  if (!(duration > 0)) throw InvalidArgument("pi_amplitude: duration must be positive");
  return 1.0 / (2.0 * std::abs(n01()) * duration);
}

TimeDependentHamiltonian DrivenQubit::hamiltonian(const DriveEnvelope& env, double carrier_ghz) const {
  env.validate();
  TimeDependentHamiltonian h;
  h.h0 = basis_.energies.cast<cplx>().asDiagonal();
  h.ops = {basis_.n_mat};
  h.reference = TimeDependentHamiltonian::Reference::kStatic;
  h.coefficients = [env, carrier_ghz](double t, double* c) {
    c[0] = (sample_drive(env, t) * std::polar(1.0, -kTwoPi * carrier_ghz * (t - env.t0))).real();
  };
  return h;
}

MatrixXcd DrivenQubit::frame_propagator(const DriveEnvelope& env, double carrier_ghz,
                                        const EvolutionOptions& options,
                                        EvolutionStats* stats) const {
  const TimeDependentHamiltonian h = hamiltonian(env, carrier_ghz);
  MatrixXcd u = propagator(h, env.t0, env.t0 + env.duration, options, stats);
  const double e0 = basis_.energies(0);
  for (int k = 0; k < u.rows(); ++k)
    u.row(k) *= std::polar(1.0, kTwoPi * (e0 + k * carrier_ghz) * env.duration);
  return u;
}

Matrix2cd DrivenQubit::gate_block(const MatrixXcd& frame_u) const {
  Matrix2cd g = frame_u.topLeftCorner(2, 2);
  g(0, 1) *= basis_phase_;
  g(1, 0) *= std::conj(basis_phase_);
  return g;
}

MatrixXcd DrivenQubit::frame_idle(double t, double carrier_ghz) const {
  const int n = n_levels();
  MatrixXcd u = MatrixXcd::Zero(n, n);
  const double e0 = basis_.energies(0);
  for (int k = 0; k < n; ++k)
    u(k, k) = std::polar(1.0, -kTwoPi * (basis_.energies(k) - e0 - k * carrier_ghz) * t);
  return u;
}

GateReport simulate_single_qubit_gate(const DrivenQubit& qubit, const DriveEnvelope& env,
                                      double carrier_ghz, const Matrix2cd& target,
                                      const EvolutionOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  EvolutionStats stats;
  const MatrixXcd u = qubit.frame_propagator(env, carrier_ghz, options, &stats);
  const Matrix2cd g = qubit.gate_block(u);
  const double alpha = best_post_z(g, target);
  GateReport r;
  r.u_raw = g;
  r.u = apply_post_z(g, alpha);
  r.vz_angles = {alpha, 0.0, 0.0, 0.0};
  r.fidelity = average_fidelity(r.u, target);
  r.leakage = leakage(u.topLeftCorner(2, 2));
  r.converged = stats.tolerance_met;
  r.wall_time = seconds_since(start);
  return r;
}

GateReport simulate_single_qubit_gate(const FluxoniumParams& params, const DriveEnvelope& env,
                                      double carrier_ghz, const Matrix2cd& target, int n_levels) {
  return simulate_single_qubit_gate(DrivenQubit(params, n_levels), env, carrier_ghz, target);
}

IswapSimulator::IswapSimulator(const CoupledSystem& system, IswapSetup setup)
    : model_(system), setup_(std::move(setup)) {
  setup_.evolution.validate();
  idle_ = dressed_spectrum(model_, system.qubit_a.phi_ext, system.qubit_b.phi_ext);
  dflux_ = model_.flux_operator_a().cast<cplx>();
  const double e00 = idle_.energies(idle_.computational[0]);
  omega_a_ = idle_.energies(idle_.computational[2]) - e00;
  omega_b_ = idle_.energies(idle_.computational[1]) - e00;
}

double IswapSimulator::padding() const {
  return setup_.padding >= 0 ? setup_.padding : default_padding(setup_.line);
}

FluxWaveform IswapSimulator::waveform(const FluxPulse& pulse) const {
  return render_flux(pulse, setup_.line, padding());
}

TimeDependentHamiltonian IswapSimulator::hamiltonian(const FluxWaveform& w) const {
  // The c-number (E_L/2)(2πδ)² of a flux step only adds a global phase and is
  // left out.
  TimeDependentHamiltonian h;
  h.h0 = model_.static_hamiltonian().cast<cplx>();
  h.ops = {dflux_};
  h.reference = TimeDependentHamiltonian::Reference::kFrozen;
  h.coefficients = [w](double t, double* c) { c[0] = w.at(t); };
  return h;
}

MatrixXcd IswapSimulator::evolve_columns(const FluxPulse& pulse, const std::vector<int>& inputs,
                                         EvolutionStats* stats) const {
  return evolve_columns(waveform(pulse), inputs, stats);
}

MatrixXcd IswapSimulator::evolve_columns(const FluxWaveform& w, const std::vector<int>& inputs,
                                         EvolutionStats* stats) const {
  const int dim = model_.dim();
  MatrixXcd psi0(dim, inputs.size());
  for (size_t j = 0; j < inputs.size(); ++j) {
    if (inputs[j] < 0 || inputs[j] > 3) throw InvalidArgument("evolve_columns: input label must be 0..3");
    psi0.col(j) = idle_.vectors.col(idle_.computational[inputs[j]]).cast<cplx>();
  }
  const double t0 = w.t_start;
  const double t1 = w.end();
  const MatrixXcd psi = evolve(hamiltonian(w), psi0, t0, t1, setup_.evolution, stats);
  MatrixXcd y = idle_.vectors.cast<cplx>().transpose() * psi;
  const double span = t1 - t0;
  VectorXd frame = idle_.energies;
  const double e00 = idle_.energies(idle_.computational[0]);
  for (int l = 0; l < 4; ++l)
    frame(idle_.computational[l]) = e00 + (l >> 1) * omega_a_ + (l & 1) * omega_b_;
  for (int k = 0; k < dim; ++k) y.row(k) *= std::polar(1.0, kTwoPi * frame(k) * span);
  return y;
}

Matrix4cd IswapSimulator::block(const MatrixXcd& columns) const {
  if (columns.cols() != 4 || columns.rows() != model_.dim())
    throw InvalidArgument("block: expected the four computational columns");
  Matrix4cd b;
  for (int l = 0; l < 4; ++l) b.row(l) = columns.row(idle_.computational[l]);
  return b;
}

GateReport IswapSimulator::simulate(const FluxPulse& pulse) const {
  const auto start = std::chrono::steady_clock::now();
  EvolutionStats stats;
  const Matrix4cd b = block(evolve_columns(pulse, {0, 1, 2, 3}, &stats));
  const VirtualZResult vz = fidelity_with_virtual_z(b);
  GateReport r;
  r.u_raw = b;
  r.u = apply_virtual_z(b, vz.angles);
  r.vz_angles = vz.angles;
  r.fidelity = vz.fidelity;
  r.leakage = leakage(MatrixXcd(b));
  r.converged = stats.tolerance_met && vz.converged;
  r.wall_time = seconds_since(start);
  return r;
}

double dominant_frequency(const std::vector<double>& t, const std::vector<double>& y) {
  const int n = static_cast<int>(t.size());
  if (n < 4 || y.size() != t.size()) throw InvalidArgument("dominant_frequency: need >= 4 samples");
  const double span = t.back() - t.front();
  const double dt = span / (n - 1);
  if (!(dt > 0)) throw InvalidArgument("dominant_frequency: times must increase");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;
  // Zero-padded DFT magnitude on a fine grid up to Nyquist.
  const int pad = 16;
  const int bins = pad * n / 2;
  const double df = 1.0 / (pad * n * dt);
  double best_f = df;
  double best_p = -1.0;
  for (int k = 1; k <= bins; ++k) {
    const double f = k * df;
    cplx s = 0.0;
    for (int i = 0; i < n; ++i) s += (y[i] - mean) * std::polar(1.0, -kTwoPi * f * (t[i] - t[0]));
    if (std::norm(s) > best_p) {
      best_p = std::norm(s);
      best_f = f;
    }
  }
  // Variable projection: offset and quadratures are linear given f.
  auto residual = [&](double f) {
    MatrixXd a(n, 3);
    VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      a(i, 0) = 1.0;
      a(i, 1) = std::cos(kTwoPi * f * t[i]);
      a(i, 2) = std::sin(kTwoPi * f * t[i]);
      b(i) = y[i];
    }
    const VectorXd c = a.colPivHouseholderQr().solve(b);
    return (a * c - b).squaredNorm();
  };
  const double lo = std::max(0.25 * df, best_f - 2.0 * df);
  return brent_minimize(residual, lo, best_f + 2.0 * df, 50).x;
}

ChevronMap chevron_scan(const IswapSimulator& sim, const FluxPulse& base,
                        const std::vector<double>& amplitudes,
                        const std::vector<double>& durations, int threads) {
  if (amplitudes.empty() || durations.empty()) throw InvalidArgument("chevron_scan: empty grid");
  ChevronMap map;
  map.amplitudes = amplitudes;
  map.durations = durations;
  const int na = static_cast<int>(amplitudes.size());
  const int nt = static_cast<int>(durations.size());
  map.p01 = MatrixXd::Zero(na, nt);
  const int row01 = sim.idle().computational[1];
  parallel_for(na * nt, threads, [&](int k) {
    FluxPulse p = base;
    p.amplitude = amplitudes[k / nt];
    p.duration = durations[k % nt];
    const MatrixXcd y = sim.evolve_columns(p, {2});
    map.p01(k / nt, k % nt) = std::clamp(std::norm(y(row01, 0)), 0.0, 1.0);
  });
  if (nt >= 4) {
    for (int i = 0; i < na; ++i) {
      std::vector<double> row(nt);
      for (int j = 0; j < nt; ++j) row[j] = map.p01(i, j);
      map.frequency_mhz.push_back(1e3 * dominant_frequency(durations, row));
    }
  }
  return map;
}

FluxErrorCurve flux_error_sensitivity(const IswapSimulator& sim, const FluxPulse& pulse,
                                      const std::vector<double>& offsets, int threads) {
  FluxErrorCurve curve;
  curve.offsets = offsets;
  curve.angles = fidelity_with_virtual_z(sim.block(pulse)).angles;
  curve.errors.assign(offsets.size(), 0.0);
  parallel_for(static_cast<int>(offsets.size()), threads, [&](int k) {
    FluxPulse p = pulse;
    p.amplitude += offsets[k];
    const Matrix4cd b = apply_virtual_z(sim.block(p), curve.angles);
    curve.errors[k] = 1.0 - average_fidelity(b, iswap_unitary());
  });
  return curve;
}

}  // namespace fluxsim
