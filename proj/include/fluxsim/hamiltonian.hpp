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

#ifndef FLUXSIM_HAMILTONIAN_HPP_
#define FLUXSIM_HAMILTONIAN_HPP_

#include <array>
#include <vector>

#include "fluxsim/types.hpp"

namespace fluxsim {

// Circuit energies in GHz (E/h) and external flux in units of Φ0.
struct FluxoniumParams {
  double ec = 1.0;
  double el = 1.0;
  double ej = 0.0;
  double phi_ext = 0.5;

  void validate() const;
};

// Uniform phase grid with hard walls at both ends. Grid points are values of
// the inductive coordinate theta = phi + 2π Φ_ext, so the walls sit at a fixed
// distance from the inductive-energy minimum for every flux.
struct FluxGrid {
  double phi_min = -5.0 * kPi;
  double phi_max = 5.0 * kPi;
  int n_points = 801;

  void validate() const;
  double step() const { return (phi_max - phi_min) / (n_points - 1); }
  double point(int k) const { return phi_min + k * step(); }
};

struct Eigenbasis {
  VectorXd energies;   // GHz, ascending
  MatrixXd states;     // grid samples, one unit-norm column per level
  MatrixXcd n_mat;     // <i|n|j>
  MatrixXcd phi_mat;   // <i|phi|j>
  std::vector<bool> degenerate;

  int size() const { return static_cast<int>(energies.size()); }
  // E_j - E_i in GHz.
  double frequency(int i, int j) const { return energies(j) - energies(i); }
};

// H = 4 E_C n^2 + (E_L/2)(phi + 2π Φ_ext)^2 - E_J cos(phi), dense n_points^2.
MatrixXd build_hamiltonian(const FluxoniumParams& params, const FluxGrid& grid = {});

// Lowest n_levels eigenpairs of a grid Hamiltonian plus n and phi matrix
// elements. States follow the sign convention: first significant grid
// component positive.
// phi_ext places the phi operator: phi = theta - 2π phi_ext.
Eigenbasis eigensolve(const MatrixXd& h, int n_levels, const FluxGrid& grid = {},
                      double phi_ext = 0.0);

// Same as eigensolve(build_hamiltonian(...)).
Eigenbasis solve_fluxonium(const FluxoniumParams& params, int n_levels,
                           const FluxGrid& grid = {});

// Lowest energies only, via a banded solver. Cheap enough for fitting loops.
VectorXd lowest_energies(const FluxoniumParams& params, int n_levels,
                         const FluxGrid& grid = {});

struct TransitionFrequencies {
  double omega10 = 0.0;
  double omega21 = 0.0;
  double omega20 = 0.0;
  double anharmonicity = 0.0;  // (ω21 - ω10) / ω10
};

TransitionFrequencies transition_frequencies(const FluxoniumParams& params,
                                             const FluxGrid& grid = {});

// Central-difference d(ω10)/dΦ_ext in GHz/Φ0.
double flux_sensitivity(const FluxoniumParams& params, const FluxGrid& grid = {},
                        double dphi = 1e-4);

enum class Transition { kOmega10, kOmega20 };

struct SpectrumPoint {
  double phi_ext = 0.0;
  Transition label = Transition::kOmega10;
  double freq_ghz = 0.0;
};

struct SpectrumFitOptions {
  int max_iterations = 3000;
  double initial_step = 0.05;  // relative simplex size
};

struct SpectrumFit {
  FluxoniumParams params;
  VectorXd residuals;  // model - data, GHz
  double rms = 0.0;
  int iterations = 0;
  bool converged = false;
};

SpectrumFit fit_spectrum(const std::vector<SpectrumPoint>& data,
                         const FluxoniumParams& guess, const FluxGrid& grid = {},
                         const SpectrumFitOptions& options = {});

struct CoupledSystem {
  FluxoniumParams qubit_a;
  FluxoniumParams qubit_b;
  double jc = 0.0;  // GHz, multiplies n_A ⊗ n_B
  int n_levels_each = 8;
  FluxGrid grid;

  void validate() const;
};

// Two fluxonia in the product basis of their reference-flux eigenstates.
// Product index is i_a * n + i_b. The reference flux of each qubit is the
// phi_ext stored in its params (normally the sweet spot).
class CoupledModel {
 public:
  explicit CoupledModel(const CoupledSystem& system);

  const CoupledSystem& system() const { return system_; }
  const Eigenbasis& basis_a() const { return basis_a_; }
  const Eigenbasis& basis_b() const { return basis_b_; }
  int n_levels() const { return n_; }
  int dim() const { return n_ * n_; }
  int index(int level_a, int level_b) const { return level_a * n_ + level_b; }

  // Real symmetric Hamiltonian (GHz) at external fluxes phi_a, phi_b.
  MatrixXd hamiltonian(double phi_a, double phi_b) const;
  // Same, as a complex Hermitian matrix.
  MatrixXcd hamiltonian_complex(double phi_a, double phi_b) const;
  // Hamiltonian of one qubit alone in its truncated reference basis.
  MatrixXd single_qubit_hamiltonian(int qubit, double phi_ext) const;

  // dH/dΦ_A at the reference point, GHz/Φ0 (operator part only).
  const MatrixXd& flux_operator_a() const { return dflux_a_; }
  const MatrixXd& static_hamiltonian() const { return h_ref_; }
  // Scalar offset accompanying a flux step delta on qubit a or b.
  double flux_offset_constant(int qubit, double delta) const;

 private:
  CoupledSystem system_;
  int n_ = 0;
  Eigenbasis basis_a_;
  Eigenbasis basis_b_;
  MatrixXd h_ref_;
  MatrixXd dflux_a_;
  MatrixXd dflux_b_;
  MatrixXd single_dflux_a_;
  MatrixXd single_dflux_b_;
};

// Dressed eigen-decomposition with computational labels.
struct DressedSpectrum {
  VectorXd energies;   // ascending
  MatrixXd vectors;    // columns
  // Indices into energies for |00>, |01>, |10>, |11> (index 2a+b).
  std::array<int, 4> computational{};
  std::array<double, 4> overlaps{};
};

// Labels by maximal overlap with bare product states; overlap^2 < 0.5 is an
// error. Ties are broken by energy order.
DressedSpectrum dressed_spectrum(const CoupledModel& model, double phi_a,
                                 double phi_b);

// Bare (J_C-free) ω10 of qubit a or b in the truncated reference basis.
double bare_frequency(const CoupledModel& model, int qubit, double phi_ext);

// Flux of qubit a, in (ref, ref + window], where bare ω10_A equals ω10_B at
// its reference flux.
double resonance_flux(const CoupledModel& model, double window = 0.25);

// Splitting (MHz) between the two single-excitation dressed levels.
double single_excitation_gap_mhz(const CoupledModel& model, double phi_a);

struct ExchangeSplitting {
  double splitting_mhz = 0.0;  // g/2π, taken as the minimum splitting
  double phi_a_resonance = 0.0;
  double phi_a_minimum = 0.0;
};

ExchangeSplitting exchange_splitting(const CoupledModel& model);

// J_C (GHz) such that the exchange splitting equals target_mhz.
double calibrate_coupling(const CoupledSystem& system, double target_mhz,
                          double jc_lo = 1e-3, double jc_hi = 1.0);

// ζ/2π in MHz at the reference fluxes; positive iff E11 + E00 > E10 + E01.
double zz_rate(const CoupledModel& model);

}  // namespace fluxsim

#endif  // FLUXSIM_HAMILTONIAN_HPP_
