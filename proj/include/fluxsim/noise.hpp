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

#ifndef FLUXSIM_NOISE_HPP_
#define FLUXSIM_NOISE_HPP_

#include <optional>
#include <vector>

#include "fluxsim/hamiltonian.hpp"
#include "fluxsim/types.hpp"

namespace fluxsim {

// Times in µs. Unset optional entries are absent channels.
struct CoherenceTimes {
  double t1 = 0.0;
  double t2 = 0.0;
  std::optional<double> t_phi1;
  std::optional<double> t_phi2;

  void validate() const;
};

// Flux-noise amplitudes in µΦ0 at 1 Hz, infrared cut-off in Hz.
struct FluxNoise {
  double a_echo = 0.0;
  double a_ramsey = 0.0;
  double f_ir = 1.0;

  void validate() const;
};

// 1/2 + e^{-t/T1}/6 + e^{-t/T2}/3, t in ns, T1 and T2 in µs.
double coherence_limit_fidelity(double t_ns, double t1_us, double t2_us);

// Amplitude damping plus dephasing: ρ11 → ρ11 e^{-t/T1}, ρ01 → ρ01 e^{-t/T2}.
Matrix2cd bloch_redfield_apply(const Matrix2cd& rho, double t_ns, double t1_us, double t2_us);

// Γφ2,E = A_E sqrt(ln 2) |∂ω/∂Φ| in 1/µs. slope in GHz/Φ0 (ω = 2π f).
double echo_gaussian_rate(double a_echo_uphi0, double slope_ghz_per_phi0);

struct RamseyRate {
  double rate = 0.0;  // 1/µs
  int iterations = 0;
};

// Fixed point of Γ = A_R sqrt(ln(Γ / 2π f_ir)) |∂ω/∂Φ|, seeded at the echo rate.
RamseyRate ramsey_gaussian_rate(double a_ramsey_uphi0, double slope_ghz_per_phi0,
                                double f_ir_hz = 1.0);

// Right-hand side of the Ramsey relation for a trial rate (1/µs).
double ramsey_rhs(double rate, double a_ramsey_uphi0, double slope_ghz_per_phi0, double f_ir_hz);

// A exp(-Γ1 t/2 - Γφ1 t - Γφ2² t²) + B; rates in 1/µs, t in µs.
double t2_visibility(double t_us, double gamma1, double gamma_phi1, double gamma_phi2, double a,
                     double b);

struct VisibilityFit {
  double a = 0.0;
  double b = 0.0;
  double gamma_phi1 = 0.0;
  double gamma_phi2 = 0.0;
  double rms = 0.0;
  bool converged = false;
};

// Fits A, B, Γφ1, Γφ2 >= 0 for known Γ1.
VisibilityFit fit_t2_visibility(const std::vector<double>& t_us, const std::vector<double>& v,
                                double gamma1);

// Capacitive dielectric loss: Γ1 = (ħω²/4E_C) tanδ |<0|φ|1>|² (coth(ħω/2k_BT) + 1)/2,
// with E_C = h·ec. Returns T1 in µs, or nullopt when tanδ = 0.
std::optional<double> dielectric_t1(const FluxoniumParams& params, double loss_tangent,
                                    double temperature_k, const FluxGrid& grid = {});

// Same from a precomputed transition: ω10 (GHz), |<0|φ|1>|, E_C (GHz).
std::optional<double> dielectric_t1(double omega10_ghz, double phi01, double ec_ghz,
                                    double loss_tangent, double temperature_k);

// 1 / (2π ω10 T1).
double loss_tangent(double omega10_ghz, double t1_us);

// Two-level Boltzmann statistics. Temperatures in mK.
double effective_temperature_mk(double p1, double omega10_ghz);
double thermal_population(double temperature_mk, double omega10_ghz);

struct Histogram {
  std::vector<double> centers;
  std::vector<double> counts;
};

Histogram make_histogram(const std::vector<double>& samples, int bins, double lo, double hi);

struct DoubleGaussianFit {
  double a0 = 0.0;
  double a1 = 0.0;
  double x0 = 0.0;  // lower mode
  double x1 = 0.0;
  double sigma = 0.0;
  double p0 = 0.0;
  double p1 = 0.0;
  bool degenerate = false;  // modes closer than 2σ or one mode empty
  bool converged = false;
};

// Σ a_i exp(-(x - x_i)² / 2σ²) by least squares; state 0 is the lower mode.
DoubleGaussianFit fit_double_gaussian(const Histogram& h);

struct IswapBudgetTimes {
  double t1_a_r = 0.0;       // µs
  double tphi_a_sw = 0.0;
  double t1_b_sw = 0.0;
  double tphi_b_sw = 0.0;
  double tphi_a_r = 0.0;     // Gaussian dephasing time
};

struct IswapBudget {
  std::vector<double> components;  // five terms, each already divided by 3
  double total = 0.0;
};

// (1/3)[t/T1A + t/TφA,sw + t/T1B + t/TφB,sw + t²/TφA,r²], t in ns.
IswapBudget iswap_error_budget(double t_g_ns, const IswapBudgetTimes& times);

}  // namespace fluxsim

#endif  // FLUXSIM_NOISE_HPP_
