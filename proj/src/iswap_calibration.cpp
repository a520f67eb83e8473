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

#include "fluxsim/iswap_calibration.hpp"

#include <cmath>

#include "fluxsim/optimize.hpp"

namespace fluxsim {

Matrix4cd ExchangeGateModel::gate(double amplitude, double duration) const {
  const double g = kPi / (2.0 * optimal_duration);
  const double d = detuning_slope * (amplitude - optimal_amplitude);
  const double w = std::hypot(g, d);
  const double c = std::cos(w * duration);
  const double s = w > 0 ? std::sin(w * duration) / w : duration;
  const cplx e = std::polar(1.0, -gamma);
  Matrix4cd u = Matrix4cd::Zero();
  u(0, 0) = 1.0;
  u(1, 1) = e * cplx(c, -d * s);
  u(2, 2) = e * cplx(c, d * s);
  u(1, 2) = e * (-kI) * g * s * std::polar(1.0, chi);
  u(2, 1) = e * (-kI) * g * s * std::polar(1.0, -chi);
  u(3, 3) = std::polar(1.0, -(2.0 * gamma + phi));
  return u;
}

Matrix4cd PulsedGateSource::gate(double amplitude, double duration) const {
  FluxPulse p = base_;
  p.amplitude = amplitude;
  p.duration = duration;
  return sim_.block(p);
}

Matrix4cd iswap_with_phases(double gamma, double chi, double phi) {
  ExchangeGateModel m;
  m.gamma = gamma;
  m.chi = chi;
  m.phi = phi;
  return m.gate(m.optimal_amplitude, m.optimal_duration);
}

double swap_angle(double p_swap, double p_stay, SwapEstimator estimator) {
  if (p_swap < 0 || p_stay < 0) throw InvalidArgument("swap_angle: negative population");
  if (estimator == SwapEstimator::kAmplitudeRatio)
    return std::atan2(std::sqrt(p_swap), std::sqrt(p_stay));
  return std::atan2(p_swap, p_stay);
}

namespace {

Matrix4cd power(const Matrix4cd& u, int n) {
  Matrix4cd r = Matrix4cd::Identity();
  for (int k = 0; k < n; ++k) r = u * r;
  return r;
}

Matrix4cd kron2(const Matrix2cd& a, const Matrix2cd& b) {
  Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

struct PhaseSeries {
  double slope = 0.0;
  double sigma = 0.0;
  double rms = 0.0;
};

// Unwraps phases (ordered by N) and fits a line against N.
PhaseSeries fit_phase_series(const std::vector<int>& ns, std::vector<double> phases) {
  for (std::size_t i = 1; i < phases.size(); ++i)
    phases[i] += kTwoPi * std::round((phases[i - 1] - phases[i]) / kTwoPi);
  std::vector<double> x(ns.begin(), ns.end());
  const LineFit f = fit_line(x, phases);
  return {f.slope, f.sigma_slope, f.rms};
}

void check_contrast(double contrast, double min_contrast, const char* what) {
  if (contrast < min_contrast)
    throw NumericalError(std::string("calibrate_iswap: ") + what +
                         " contrast below threshold, aborting");
}

}  // namespace

IswapPhases measure_iswap_phases(const Matrix4cd& u, const std::vector<int>& even_n,
                                 double min_contrast) {
  if (even_n.size() < 2) throw InvalidArgument("measure_iswap_phases: need at least two N");
  for (int n : even_n)
    if (n <= 0 || n % 2 != 0) throw InvalidArgument("measure_iswap_phases: N must be even and positive");
  const double s = 1.0 / std::sqrt(2.0);

  // γ: (|0> - i|1>)|0>/√2; the |10>/|00> phase moves by -Nγ on top of Nπ/2.
  Eigen::Vector4cd psi_g = Eigen::Vector4cd::Zero();
  psi_g(0) = s;
  psi_g(2) = -kI * s;
  // φ: |+>|+>; arg(c11 c00 / (c01 c10)) = -Nφ.
  const Eigen::Vector4cd psi_p = Eigen::Vector4cd::Constant(0.5);
  // χ: Y_π on both qubits after every gate.
  const Matrix2cd ypi = rotation_xy(0.5 * kPi, kPi);
  const Matrix4cd unit_chi = kron2(ypi, ypi) * u;

  std::vector<double> pg, pp, pc;
  for (int n : even_n) {
    const Eigen::Vector4cd a = power(u, n) * psi_g;
    check_contrast(2.0 * std::abs(a(0)) * std::abs(a(2)), min_contrast, "common-phase");
    pg.push_back(std::arg(a(2) / a(0)) - 0.5 * kPi * n);
    const Eigen::Vector4cd b = power(u, n) * psi_p;
    check_contrast(4.0 * std::sqrt(std::abs(b(0) * b(1) * b(2) * b(3))), min_contrast,
                   "conditional-phase");
    pp.push_back(std::arg(b(3) * b(0) / (b(1) * b(2))));
    const Eigen::Vector4cd c = power(unit_chi, n) * psi_g;
    check_contrast(2.0 * std::abs(c(0)) * std::abs(c(2)), min_contrast, "relative-phase");
    pc.push_back(std::arg(c(2) / c(0)) - 0.5 * kPi * n);
  }
  const PhaseSeries g = fit_phase_series(even_n, pg);
  const PhaseSeries p = fit_phase_series(even_n, pp);
  const PhaseSeries c = fit_phase_series(even_n, pc);
  IswapPhases out;
  out.gamma = -g.slope;
  out.phi = -p.slope;
  out.chi = c.slope - 0.5 * out.phi;
  const int it = static_cast<int>(even_n.size());
  out.reports = {{"iswap_gamma_rad", out.gamma, g.sigma, it, g.rms},
                 {"iswap_phi_rad", out.phi, p.sigma, it, p.rms},
                 {"iswap_chi_rad", out.chi, std::hypot(c.sigma, 0.5 * p.sigma), it, c.rms}};
  return out;
}

IswapCalibration calibrate_iswap(const TwoQubitGateSource& source,
                                 const IswapCalibrationOptions& options) {
  if (!(options.amplitude0 > 0) || !(options.duration0 > 0) || !(options.amplitude_scale > 0))
    throw InvalidArgument("calibrate_iswap: starting amplitude and duration required");
  if (options.odd_n.empty()) throw InvalidArgument("calibrate_iswap: empty odd_n");
  for (int n : options.odd_n)
    if (n <= 0 || n % 2 == 0) throw InvalidArgument("calibrate_iswap: odd_n must be odd");

  IswapCalibration out;
  auto unpack = [&](const VectorXd& x) {
    return std::pair{options.amplitude0 + options.amplitude_scale * x(0), options.duration0 + x(1)};
  };
  auto objective = [&](const VectorXd& x) {
    const auto [a, t] = unpack(x);
    if (!(t > 0)) return 1e3;
    ++out.evaluations;
    const Matrix4cd u = source.gate(a, t);
    double f = 0.0;
    for (int n : options.odd_n) {
      const Eigen::Vector4cd psi = power(u, n).col(2);
      f += 0.5 * kPi - swap_angle(std::norm(psi(1)), std::norm(psi(2)), options.estimator);
    }
    return f;
  };

  const Matrix4cd u0 = source.gate(options.amplitude0, options.duration0);
  check_contrast(std::norm(u0(1, 2)), options.min_contrast, "swap");

  NelderMeadOptions nm;
  nm.max_iterations = options.max_iterations;
  nm.initial_step = VectorXd::Constant(2, 0.5);
  nm.xtol = 1e-7;
  nm.ftol_abs = 1e-14;
  const OptimResult r = nelder_mead(objective, VectorXd::Zero(2), nm);
  const auto [a, t] = unpack(r.x);
  out.amplitude = a;
  out.duration = t;

  const Matrix4cd u = source.gate(a, t);
  out.theta = swap_angle(std::norm(u(1, 2)), std::norm(u(2, 2)), SwapEstimator::kAmplitudeRatio);
  out.swap_deviation = std::abs(out.theta - 0.5 * kPi);
  out.fidelity = fidelity_with_virtual_z(u).fidelity;
  out.leakage = leakage(MatrixXcd(u));
  out.reports = {{"iswap_amplitude", a, 0.0, r.iterations, r.f},
                 {"iswap_duration_ns", t, 0.0, r.iterations, r.f}};

  const IswapPhases ph = measure_iswap_phases(u, options.even_n, options.min_contrast);
  out.gamma = ph.gamma;
  out.chi = ph.chi;
  out.phi = ph.phi;
  out.reports.insert(out.reports.end(), ph.reports.begin(), ph.reports.end());
  return out;
}

IswapCalibrationOptions iswap_options_for(const IswapSimulator& sim, const FluxPulse& base) {
  const ExchangeSplitting ex = exchange_splitting(sim.model());
  IswapCalibrationOptions o;
  o.amplitude0 = ex.phi_a_minimum - sim.model().system().qubit_a.phi_ext;
  o.duration0 = 1e3 / (2.0 * ex.splitting_mhz) + 8.0 * base.sigma;
  return o;
}

}  // namespace fluxsim
