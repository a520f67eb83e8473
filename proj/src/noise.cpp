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

#include "fluxsim/noise.hpp"

#include <algorithm>
#include <cmath>

#include "fluxsim/optimize.hpp"

namespace fluxsim {

namespace {

constexpr double kPlanck = 6.62607015e-34;   // J s
constexpr double kBoltzmann = 1.380649e-23;  // J/K

// h f / k_B in kelvin for f in GHz.
double quantum_temperature(double f_ghz) { return kPlanck * f_ghz * 1e9 / kBoltzmann; }

void require_positive(double x, const char* what) {
  if (!(x > 0) || !std::isfinite(x)) throw InvalidArgument(std::string(what) + " must be positive");
}

// Angular flux sensitivity in 1/µs per Φ0.
double angular_slope(double slope_ghz) { return kTwoPi * std::abs(slope_ghz) * 1e3; }

}  // namespace

void CoherenceTimes::validate() const {
  require_positive(t1, "T1");
  require_positive(t2, "T2");
  if (t2 > 2.0 * t1 * (1 + 1e-12)) throw InvalidArgument("T2 must not exceed 2 T1");
  if (t_phi1) require_positive(*t_phi1, "T_phi1");
  if (t_phi2) require_positive(*t_phi2, "T_phi2");
}

void FluxNoise::validate() const {
  require_positive(a_echo, "A_E");
  require_positive(a_ramsey, "A_R");
  require_positive(f_ir, "f_ir");
}

double coherence_limit_fidelity(double t_ns, double t1_us, double t2_us) {
  if (!(t_ns >= 0)) throw InvalidArgument("coherence_limit_fidelity: t must be >= 0");
  require_positive(t1_us, "T1");
  require_positive(t2_us, "T2");
  const double t = t_ns * 1e-3;
  return 0.5 + std::exp(-t / t1_us) / 6.0 + std::exp(-t / t2_us) / 3.0;
}

Matrix2cd bloch_redfield_apply(const Matrix2cd& rho, double t_ns, double t1_us, double t2_us) {
  if (!(t_ns >= 0)) throw InvalidArgument("bloch_redfield_apply: t must be >= 0");
  require_positive(t1_us, "T1");
  require_positive(t2_us, "T2");
  if (t2_us > 2.0 * t1_us * (1 + 1e-12)) throw InvalidArgument("T2 must not exceed 2 T1");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidArgument("density matrix must be Hermitian");
  if (std::abs(rho.trace() - 1.0) > 1e-10) throw InvalidArgument("density matrix must have unit trace");
  Eigen::SelfAdjointEigenSolver<Matrix2cd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-10) throw InvalidArgument("density matrix must be positive");
  const double t = t_ns * 1e-3;
  const double d1 = std::exp(-t / t1_us);
  const double d2 = std::exp(-t / t2_us);
  Matrix2cd out;
  const double excited = rho(1, 1).real() * d1;
  out(1, 1) = excited;
  out(0, 0) = 1.0 - excited;
  out(0, 1) = rho(0, 1) * d2;
  out(1, 0) = std::conj(out(0, 1));
  return out;
}

double echo_gaussian_rate(double a_echo_uphi0, double slope_ghz_per_phi0) {
  if (!(a_echo_uphi0 >= 0)) throw InvalidArgument("A_E must be >= 0");
  return a_echo_uphi0 * 1e-6 * std::sqrt(std::log(2.0)) * angular_slope(slope_ghz_per_phi0);
}

double ramsey_rhs(double rate, double a_ramsey_uphi0, double slope_ghz_per_phi0, double f_ir_hz) {
  const double arg = rate * 1e6 / (kTwoPi * f_ir_hz);
  if (!(arg > 1.0)) throw NumericalError("ramsey_gaussian_rate: rate too small for the 1/f model");
  return a_ramsey_uphi0 * 1e-6 * std::sqrt(std::log(arg)) * angular_slope(slope_ghz_per_phi0);
}

RamseyRate ramsey_gaussian_rate(double a_ramsey_uphi0, double slope_ghz_per_phi0, double f_ir_hz) {
  require_positive(a_ramsey_uphi0, "A_R");
  require_positive(f_ir_hz, "f_ir");
  if (slope_ghz_per_phi0 == 0.0) throw InvalidArgument("ramsey_gaussian_rate: slope must be nonzero");
  RamseyRate r;
  double x = echo_gaussian_rate(a_ramsey_uphi0, slope_ghz_per_phi0);
  for (r.iterations = 1; r.iterations <= 200; ++r.iterations) {
    const double next = ramsey_rhs(x, a_ramsey_uphi0, slope_ghz_per_phi0, f_ir_hz);
    const double change = std::abs(next - x) / next;
    x = next;
    if (change < 1e-10) {
      r.rate = x;
      return r;
    }
  }
  throw NumericalError("ramsey_gaussian_rate: fixed-point iteration did not converge");
}

double t2_visibility(double t_us, double gamma1, double gamma_phi1, double gamma_phi2, double a,
                     double b) {
  return a * std::exp(-0.5 * gamma1 * t_us - gamma_phi1 * t_us - gamma_phi2 * gamma_phi2 * t_us * t_us) + b;
}

VisibilityFit fit_t2_visibility(const std::vector<double>& t_us, const std::vector<double>& v,
                                double gamma1) {
  const int m = static_cast<int>(t_us.size());
  if (m < 5 || v.size() != t_us.size()) throw InvalidArgument("fit_t2_visibility: need >= 5 points");
  if (!(gamma1 >= 0)) throw InvalidArgument("fit_t2_visibility: Γ1 must be >= 0");
  // Start: B from the tail, A from the head, total rate from the 1/e point.
  const double b0 = v.back();
  const double a0 = v.front() - b0;
  double t_e = t_us.back();
  for (int i = 0; i < m; ++i)
    if ((v[i] - b0) < a0 / std::exp(1.0)) {
      t_e = t_us[i];
      break;
    }
  const double total = 1.0 / std::max(t_e, 1e-9);
  const double g_rest = std::max(total - 0.5 * gamma1, 0.1 * total);
  // Rates enter as exp(log-rate) to keep them positive.
  VectorXd x0(4);
  x0 << a0, b0, std::log(0.5 * g_rest), std::log(0.5 * g_rest);
  auto residual = [&](const VectorXd& x) {
    VectorXd r(m);
    const double g1 = std::exp(x(2)), g2 = std::exp(x(3));
    for (int i = 0; i < m; ++i) r(i) = t2_visibility(t_us[i], gamma1, g1, g2, x(0), x(1)) - v[i];
    return r;
  };
  LeastSquaresResult best = levenberg_marquardt(residual, m, x0);
  // The split between exponential and Gaussian parts can be poorly
  // conditioned; restart from lopsided guesses and keep the best.
  for (double w : {0.05, 0.95}) {
    VectorXd x1 = x0;
    x1(2) = std::log(w * g_rest);
    x1(3) = std::log((1 - w) * g_rest);
    LeastSquaresResult r = levenberg_marquardt(residual, m, x1);
    if (r.cost < best.cost) best = r;
  }
  VisibilityFit f;
  f.a = best.x(0);
  f.b = best.x(1);
  f.gamma_phi1 = std::exp(best.x(2));
  f.gamma_phi2 = std::exp(best.x(3));
  f.rms = std::sqrt(best.cost / m);
  f.converged = best.converged && std::isfinite(f.rms);
  return f;
}

std::optional<double> dielectric_t1(double omega10_ghz, double phi01, double ec_ghz,
                                    double loss_tangent, double temperature_k) {
  require_positive(omega10_ghz, "ω10");
  require_positive(ec_ghz, "E_C");
  if (!(temperature_k > 0)) throw InvalidArgument("dielectric_t1: temperature must be positive");
  if (!(loss_tangent >= 0)) throw InvalidArgument("dielectric_t1: loss tangent must be >= 0");
  if (loss_tangent == 0.0 || phi01 == 0.0) return std::nullopt;
  const double omega = kTwoPi * omega10_ghz;  // rad/ns
  // ħω²/(4 E_C) with E_C = h ec is ω²/(8π ec) in 1/ns.
  const double x = quantum_temperature(omega10_ghz) / (2.0 * temperature_k);
  const double thermal = 0.5 * (1.0 / std::tanh(x) + 1.0);
  const double rate = omega * omega / (8.0 * kPi * ec_ghz) * loss_tangent * phi01 * phi01 * thermal;
  return 1e-3 / rate;
}

std::optional<double> dielectric_t1(const FluxoniumParams& params, double loss_tangent,
                                    double temperature_k, const FluxGrid& grid) {
  const Eigenbasis b = solve_fluxonium(params, 2, grid);
  return dielectric_t1(b.frequency(0, 1), std::abs(b.phi_mat(0, 1)), params.ec, loss_tangent,
                       temperature_k);
}

double loss_tangent(double omega10_ghz, double t1_us) {
  require_positive(omega10_ghz, "ω10");
  require_positive(t1_us, "T1");
  return 1.0 / (kTwoPi * omega10_ghz * 1e3 * t1_us);
}

double effective_temperature_mk(double p1, double omega10_ghz) {
  require_positive(omega10_ghz, "ω10");
  if (!(p1 > 0) || !(p1 < 0.5)) throw InvalidArgument("effective_temperature: P1 must lie in (0, 0.5)");
  return 1e3 * quantum_temperature(omega10_ghz) / std::log((1.0 - p1) / p1);
}

double thermal_population(double temperature_mk, double omega10_ghz) {
  require_positive(omega10_ghz, "ω10");
  if (!(temperature_mk >= 0)) throw InvalidArgument("thermal_population: temperature must be >= 0");
  if (temperature_mk == 0.0) return 0.0;
  const double x = quantum_temperature(omega10_ghz) / (1e-3 * temperature_mk);
  return 1.0 / (1.0 + std::exp(x));
}

Histogram make_histogram(const std::vector<double>& samples, int bins, double lo, double hi) {
  if (bins < 2 || !(hi > lo)) throw InvalidArgument("make_histogram: bad binning");
  Histogram h;
  const double w = (hi - lo) / bins;
  h.centers.resize(bins);
  h.counts.assign(bins, 0.0);
  for (int i = 0; i < bins; ++i) h.centers[i] = lo + (i + 0.5) * w;
  for (double s : samples) {
    const int k = static_cast<int>(std::floor((s - lo) / w));
    if (k >= 0 && k < bins) h.counts[k] += 1.0;
  }
  return h;
}

DoubleGaussianFit fit_double_gaussian(const Histogram& h) {
  const int m = static_cast<int>(h.centers.size());
  if (m < 6 || h.counts.size() != h.centers.size())
    throw InvalidArgument("fit_double_gaussian: need >= 6 bins");
  double total = 0.0;
  int top = 0;
  for (int i = 0; i < m; ++i) {
    total += h.counts[i];
    if (h.counts[i] > h.counts[top]) top = i;
  }
  if (!(total > 0)) throw InvalidArgument("fit_double_gaussian: empty histogram");
  // Seeds: the tallest bin and the bin with the largest weighted distance from
  // it, refined by a few one-dimensional k-means passes.
  int second = top;
  double far = -1.0;
  for (int i = 0; i < m; ++i) {
    const double d = h.counts[i] * std::pow(h.centers[i] - h.centers[top], 2);
    if (d > far) {
      far = d;
      second = i;
    }
  }
  double c0 = h.centers[top], c1 = h.centers[second];
  double w0 = 0, w1 = 0, var = 0;
  for (int pass = 0; pass < 20; ++pass) {
    double s0 = 0, s1 = 0;
    w0 = w1 = var = 0;
    for (int i = 0; i < m; ++i) {
      const bool first = std::abs(h.centers[i] - c0) <= std::abs(h.centers[i] - c1);
      (first ? w0 : w1) += h.counts[i];
      (first ? s0 : s1) += h.counts[i] * h.centers[i];
      var += h.counts[i] * std::pow(h.centers[i] - (first ? c0 : c1), 2);
    }
    if (w0 > 0) c0 = s0 / w0;
    if (w1 > 0) c1 = s1 / w1;
  }
  const double bin = std::abs(h.centers[1] - h.centers[0]);
  const double sigma0 = std::sqrt(std::max(var / total, bin * bin / 12.0));
  const double norm = bin / (std::sqrt(kTwoPi) * sigma0);
  VectorXd x0(5);
  x0 << std::max(w0 * norm, 1e-6 * total), std::max(w1 * norm, 1e-6 * total), c0, c1,
      std::log(sigma0);
  auto residual = [&](const VectorXd& x) {
    VectorXd r(m);
    const double s = std::exp(x(4));
    for (int i = 0; i < m; ++i) {
      const double d0 = (h.centers[i] - x(2)) / s;
      const double d1 = (h.centers[i] - x(3)) / s;
      r(i) = x(0) * std::exp(-0.5 * d0 * d0) + x(1) * std::exp(-0.5 * d1 * d1) - h.counts[i];
    }
    return r;
  };
  const LeastSquaresResult r = levenberg_marquardt(residual, m, x0);
  DoubleGaussianFit f;
  f.sigma = std::exp(r.x(4));
  int lo = r.x(2) <= r.x(3) ? 0 : 1;
  f.a0 = r.x(lo);
  f.a1 = r.x(1 - lo);
  f.x0 = r.x(2 + lo);
  f.x1 = r.x(3 - lo);
  const double sum = f.a0 + f.a1;
  f.p0 = sum > 0 ? f.a0 / sum : 0.0;
  f.p1 = sum > 0 ? f.a1 / sum : 0.0;
  f.converged = r.converged;
  f.degenerate = std::abs(f.x1 - f.x0) < 2.0 * f.sigma || std::min(f.p0, f.p1) < 1e-3 ||
                 f.a0 < 0 || f.a1 < 0;
  return f;
}

IswapBudget iswap_error_budget(double t_g_ns, const IswapBudgetTimes& times) {
  if (!(t_g_ns >= 0)) throw InvalidArgument("iswap_error_budget: t_g must be >= 0");
  for (double t : {times.t1_a_r, times.tphi_a_sw, times.t1_b_sw, times.tphi_b_sw, times.tphi_a_r})
    if (!(t > 0)) throw InvalidArgument("iswap_error_budget: times must be positive");
  const double t = t_g_ns * 1e-3;
  IswapBudget b;
  b.components = {t / times.t1_a_r / 3.0, t / times.tphi_a_sw / 3.0, t / times.t1_b_sw / 3.0,
                  t / times.tphi_b_sw / 3.0, t * t / (times.tphi_a_r * times.tphi_a_r) / 3.0};
  for (double c : b.components) b.total += c;
  return b;
}

}  // namespace fluxsim
