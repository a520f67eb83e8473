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

#include "fluxsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fluxsim/optimize.hpp"

namespace fluxsim {

SingleQubitSimulator::SingleQubitSimulator(DrivenQubit qubit, double duration,
                                           const EvolutionOptions& options, double carrier_ghz)
    : qubit_(std::move(qubit)), duration_(duration), options_(options),
      carrier_(carrier_ghz > 0 ? carrier_ghz : qubit_.omega10()) {
  if (!(duration > 0)) throw InvalidArgument("SingleQubitSimulator: duration must be positive");
  options_.validate();
}

void SingleQubitSimulator::set_injection(const SingleQubitInjection& injection) {
  if (!(injection.amplitude_scale > 0) || !std::isfinite(injection.frame_shift_mhz) ||
      !std::isfinite(injection.axis_error))
    throw InvalidArgument("SingleQubitSimulator: invalid injection");
  injection_ = injection;
}

void SingleQubitSimulator::set_shots(int shots, std::uint64_t seed) {
  shots_ = std::max(shots, 0);
  rng_.seed(seed);
}

const MatrixXcd& SingleQubitSimulator::pulse_unitary(const SingleQubitPulse& pulse) {
  double phase = pulse.phase;
  if (pulse.amplitude > injection_.axis_threshold) phase += injection_.axis_error;
  const double amplitude = pulse.amplitude * injection_.amplitude_scale;
  const double detuning = detuning_mhz_ + injection_.frame_shift_mhz;
  const auto key = std::make_tuple(amplitude, phase, detuning);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  DriveEnvelope env;
  env.amplitude = amplitude;
  env.duration = duration_;
  env.detuning_mhz = detuning;
  env.phase = phase;
  return cache_.emplace(key, qubit_.frame_propagator(env, carrier_, options_)).first->second;
}

VectorXd SingleQubitSimulator::populations(const std::vector<SingleQubitPulse>& sequence) {
  VectorXcd psi = VectorXcd::Zero(qubit_.n_levels());
  psi(0) = 1.0;
  for (const SingleQubitPulse& p : sequence) psi = pulse_unitary(p) * psi;
  return psi.cwiseAbs2();
}

double SingleQubitSimulator::p0(const std::vector<SingleQubitPulse>& sequence) {
  const double p = std::clamp(populations(sequence)(0), 0.0, 1.0);
  if (shots_ <= 0) return p;
  std::binomial_distribution<int> draw(shots_, p);
  return static_cast<double>(draw(rng_)) / shots_;
}

double SingleQubitSimulator::sigma_z(const std::vector<SingleQubitPulse>& sequence) {
  if (shots_ > 0) return 2.0 * p0(sequence) - 1.0;
  const VectorXd pops = populations(sequence);
  return pops(0) - pops(1);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InvalidArgument("fit_line: need at least two points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw InvalidArgument("fit_line: x values must not all coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  f.sigma_slope = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
  return f;
}

namespace {

struct QuadraticPeak {
  double x = 0.0;
  double sigma = 0.0;
  double rms = 0.0;
  bool is_max = false;
};

// y = c0 + c1 u + c2 u², u = x - center.
QuadraticPeak quadratic_peak(const std::vector<double>& x, const std::vector<double>& y,
                             double center) {
  const int n = static_cast<int>(x.size());
  MatrixXd a(n, 3);
  VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const double u = x[i] - center;
    a(i, 0) = 1.0;
    a(i, 1) = u;
    a(i, 2) = u * u;
    b(i) = y[i];
  }
  const VectorXd c = a.colPivHouseholderQr().solve(b);
  const VectorXd r = a * c - b;
  QuadraticPeak q;
  q.rms = std::sqrt(r.squaredNorm() / n);
  q.is_max = c(2) < 0;
  q.x = center - c(1) / (2.0 * c(2));
  if (n > 3) {
    const MatrixXd cov = (a.transpose() * a).inverse() * (r.squaredNorm() / (n - 3));
    const double g1 = -1.0 / (2.0 * c(2));
    const double g2 = c(1) / (2.0 * c(2) * c(2));
    q.sigma = std::sqrt(std::max(0.0, g1 * g1 * cov(1, 1) + g2 * g2 * cov(2, 2) +
                                          2.0 * g1 * g2 * cov(1, 2)));
  }
  return q;
}

// Argmax of f on a uniform grid, then Brent inside the neighbouring cells.
double grid_then_brent_max(const std::function<double(double)>& f, double lo, double hi,
                           int points) {
  double best_x = lo, best_f = -1e300;
  const double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) {
    const double x = lo + i * step;
    const double v = f(x);
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
  }
  return brent_minimize([&](double x) { return -f(x); }, best_x - step, best_x + step, 30).x;
}

}  // namespace

DetuningCalibration calibrate_detuning(SingleQubitSimulator& sim, double pi_amplitude,
                                       const DetuningOptions& options) {
  if (options.n_list.empty() || options.coarse_points < 3 || !(options.span_mhz > 0))
    throw InvalidArgument("calibrate_detuning: invalid options");
  std::vector<int> ns = options.n_list;
  for (int n : ns)
    if (n < 1) throw InvalidArgument("calibrate_detuning: N must be positive");
  std::sort(ns.begin(), ns.end());

  const SingleQubitPulse xp{pi_amplitude, 0.0};
  const SingleQubitPulse xm{pi_amplitude, kPi};
  auto p0_at = [&](double df, int n) {
    sim.set_detuning_mhz(df);
    std::vector<SingleQubitPulse> seq;
    seq.reserve(2 * n);
    for (int k = 0; k < n; ++k) {
      seq.push_back(xp);
      seq.push_back(xm);
    }
    return sim.p0(seq);
  };
  auto total = [&](double df) {
    double s = 0.0;
    for (int n : ns) s += p0_at(df, n);
    return s;
  };
  // Width (MHz) over which N pairs dephase by about one radian.
  auto width = [&](int n) { return 1000.0 / (2.0 * kPi * n * 2.0 * sim.duration()); };

  DetuningCalibration out;
  out.n_list = ns;
  // Far off resonance the pulses do nothing and P0 is trivially 1, so the
  // coarse scan only accepts detunings where a single X_π still inverts.
  double estimate = grid_then_brent_max(
      [&](double df) {
        sim.set_detuning_mhz(df);
        if (sim.p0({xp}) > 0.5) return -1.0;
        return p0_at(df, ns.front());
      },
      options.center_mhz - 0.5 * options.span_mhz, options.center_mhz + 0.5 * options.span_mhz,
      std::max(options.coarse_points,
               static_cast<int>(std::ceil(2.0 * options.span_mhz / width(ns.front()))) + 1));
  for (int n : ns) {
    const double w = std::min(2.0 * width(n), 0.5 * options.span_mhz);
    estimate = grid_then_brent_max([&](double df) { return p0_at(df, n); }, estimate - w,
                                   estimate + w, 21);
    out.peak_mhz.push_back(estimate);
  }
  const double w_min = width(ns.back());
  const double joint = grid_then_brent_max(total, estimate - 2.0 * w_min, estimate + 2.0 * w_min, 21);

  std::vector<double> xs, ys;
  const double h = w_min / 6.0;
  for (int i = -3; i <= 3; ++i) {
    xs.push_back(joint + i * h);
    ys.push_back(total(joint + i * h));
  }
  const QuadraticPeak q = quadratic_peak(xs, ys, joint);
  out.detuning_mhz = (q.is_max && std::abs(q.x - joint) < 3.0 * h) ? q.x : joint;

  for (std::size_t i = 0; i < ns.size(); ++i) {
    out.p0_at_peak.push_back(p0_at(out.peak_mhz[i], ns[i]));
    if (std::abs(out.peak_mhz[i] - out.detuning_mhz) > options.agreement * w_min ||
        out.p0_at_peak.back() < 0.5)
      out.common_peak = false;
  }
  if (!q.is_max) out.common_peak = false;
  sim.set_detuning_mhz(out.detuning_mhz);
  out.report = {"detuning_mhz", out.detuning_mhz, q.sigma, static_cast<int>(ns.size()), q.rms};
  return out;
}

double amplitude_signal(int n, double epsilon) {
  const double sign = (n % 2 == 0) ? -1.0 : 1.0;
  return sign * std::sin((n + 0.5) * epsilon);
}

AmplitudeCalibration calibrate_amplitude(SingleQubitSimulator& sim, double amplitude,
                                         RotationTarget target, std::vector<int> n_list) {
  if (!(amplitude > 0)) throw InvalidArgument("calibrate_amplitude: amplitude must be positive");
  if (n_list.empty())
    for (int n = 0; n <= 20; ++n) n_list.push_back(n);
  for (int n : n_list)
    if (n < 0) throw InvalidArgument("calibrate_amplitude: n must be non-negative");

  const bool pi = target == RotationTarget::kPi;
  const SingleQubitPulse prep{pi ? 0.5 * amplitude : amplitude, 0.0};
  const SingleQubitPulse unit{amplitude, 0.0};
  const int per_unit = pi ? 1 : 2;

  AmplitudeCalibration out;
  out.amplitude = amplitude;
  out.n_list = n_list;
  for (int n : n_list) {
    std::vector<SingleQubitPulse> seq{prep};
    for (int k = 0; k < n * per_unit; ++k) seq.push_back(unit);
    out.sigma_z.push_back(sim.sigma_z(seq));
  }
  auto cost = [&](double eps) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      const double r = out.sigma_z[i] - amplitude_signal(n_list[i], eps);
      s += r * r;
    }
    return s;
  };
  const double eps = grid_then_brent_max([&](double e) { return -cost(e); }, -0.5, 0.5, 2001);
  if (std::abs(eps) > 0.3)
    throw NumericalError("calibrate_amplitude: |epsilon| > 0.3 rad, coarse recalibration required");

  double jj = 0.0;
  for (int n : n_list) {
    const double d = (n + 0.5) * std::cos((n + 0.5) * eps);
    jj += d * d;
  }
  const double ss = cost(eps);
  const int dof = std::max<int>(1, static_cast<int>(n_list.size()) - 1);
  out.epsilon = eps;
  out.corrected_amplitude = amplitude / (1.0 + eps / kPi);
  out.report = {pi ? "amplitude_pi" : "amplitude_half_pi", out.corrected_amplitude,
                out.corrected_amplitude / kPi * std::sqrt(ss / dof / jj), 1,
                std::sqrt(ss / n_list.size())};
  return out;
}

AxisCalibration calibrate_axis(SingleQubitSimulator& sim, const SingleQubitPulse& gate,
                               double ideal_phase, double half_pi_amplitude, std::vector<int> n_list) {
  if (!(half_pi_amplitude > 0)) throw InvalidArgument("calibrate_axis: amplitude must be positive");
  if (n_list.empty()) n_list = {1, 2, 4, 8, 12, 16, 20, 24, 32, 40};
  std::sort(n_list.begin(), n_list.end());
  if (n_list.front() < 1 || n_list.size() < 2)
    throw InvalidArgument("calibrate_axis: need at least two positive N");

  const SingleQubitPulse half{half_pi_amplitude, 0.0};
  std::vector<double> raw;
  for (int n : n_list) {
    std::vector<SingleQubitPulse> seq{half};
    for (int k = 0; k < n; ++k) {
      seq.push_back(gate);
      seq.push_back(half);
      seq.push_back(half);
    }
    const double psi = -0.5 * kPi - 2.0 * n * ideal_phase;
    seq.push_back({half_pi_amplitude, psi});
    const double z1 = sim.sigma_z(seq);
    seq.back().phase = psi + 0.5 * kPi;
    const double z2 = sim.sigma_z(seq);
    raw.push_back(std::atan2(-z1, -z2));
  }

  AxisCalibration out;
  out.n_list = n_list;
  std::vector<double> xs;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double predicted = raw[0];
    if (xs.empty() && std::abs(raw[0]) > 0.5 * kPi) {
      throw NumericalError("calibrate_axis: ambiguous phase unwrap, reduce N");
    } else if (xs.size() == 1) {
      predicted = out.phases[0] * n_list[i] / n_list[0];
    } else if (xs.size() >= 2) {
      const LineFit f = fit_line(xs, out.phases);
      predicted = f.intercept + f.slope * n_list[i];
    }
    const double unwrapped = raw[i] + kTwoPi * std::round((predicted - raw[i]) / kTwoPi);
    if (std::abs(unwrapped - predicted) > 0.5 * kPi)
      throw NumericalError("calibrate_axis: ambiguous phase unwrap, reduce N");
    out.phases.push_back(unwrapped);
    xs.push_back(n_list[i]);
  }
  const LineFit fit = fit_line(xs, out.phases);
  out.delta_phi = 0.5 * fit.slope;
  out.report = {"axis_error_rad", out.delta_phi, 0.5 * fit.sigma_slope, 1, fit.rms};
  return out;
}

namespace {

// Unwrapped phase of ρ_{0,1} of qubit A versus time, rotating at f_ref.
std::vector<double> ramsey_phase(const DressedSpectrum& ds,
                                 const Eigen::SelfAdjointEigenSolver<MatrixXd>& eig, int b,
                                 const std::vector<double>& t, double f_ref) {
  const VectorXd d0 = ds.vectors.col(ds.computational[b]);
  const VectorXd d1 = ds.vectors.col(ds.computational[2 + b]);
  const VectorXcd psi0 = ((d0 + d1) / std::sqrt(2.0)).cast<cplx>();
  const MatrixXcd v = eig.eigenvectors().cast<cplx>();
  const VectorXcd c0 = v.adjoint() * psi0;
  const VectorXcd a0 = v.adjoint() * d0.cast<cplx>();
  const VectorXcd a1 = v.adjoint() * d1.cast<cplx>();
  std::vector<double> phase;
  double prev = 0.0;
  for (double tk : t) {
    VectorXcd c = c0;
    for (int i = 0; i < c.size(); ++i)
      c(i) *= std::polar(1.0, -kTwoPi * eig.eigenvalues()(i) * tk);
    const cplx amp0 = a0.dot(c);
    const cplx amp1 = a1.dot(c);
    double ph = std::arg(amp0 * std::conj(amp1) * std::polar(1.0, -kTwoPi * f_ref * tk));
    if (!phase.empty()) ph += kTwoPi * std::round((prev - ph) / kTwoPi);
    phase.push_back(ph);
    prev = ph;
  }
  return phase;
}

}  // namespace

ZzMeasurement measure_zz(const CoupledModel& model, const ZzOptions& options) {
  if (!(options.duration_ns > 0) || options.points < 3)
    throw InvalidArgument("measure_zz: invalid options");
  const double phi_a = model.system().qubit_a.phi_ext;
  const double phi_b = model.system().qubit_b.phi_ext;
  const DressedSpectrum ds = dressed_spectrum(model, phi_a, phi_b);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(model.hamiltonian(phi_a, phi_b));
  const double f_ref = bare_frequency(model, 0, phi_a);

  std::vector<double> t(options.points);
  for (int k = 0; k < options.points; ++k)
    t[k] = options.duration_ns * k / (options.points - 1);

  ZzMeasurement out;
  for (int b = 0; b < 2; ++b) {
    const std::vector<double> ph = ramsey_phase(ds, eig, b, t, f_ref);
    const LineFit fit = fit_line(t, ph);
    out.fringe_mhz[b] = 1e3 * fit.slope / kTwoPi;
    out.residual_rad = std::max(out.residual_rad, fit.rms);
  }
  out.zeta_mhz = out.fringe_mhz[1] - out.fringe_mhz[0];
  out.fit_ok = out.residual_rad <= options.max_residual_rad;
  out.report = {"zz_mhz", out.zeta_mhz, 0.0, 2, out.residual_rad};
  return out;
}

}  // namespace fluxsim
