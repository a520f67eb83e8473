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

#include "fluxsim/pulses.hpp"

#include <algorithm>
#include <cmath>

namespace fluxsim {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace

void DriveEnvelope::validate() const {
  require(std::isfinite(amplitude) && std::isfinite(duration) && std::isfinite(detuning_mhz) &&
              std::isfinite(phase) && std::isfinite(t0),
          "drive envelope fields must be finite");
  require(duration > 0, "drive duration must be positive");
}

double drive_envelope(const DriveEnvelope& env, double t) {
  const double s = t - env.t0;
  if (s < 0 || s > env.duration) return 0.0;
  return env.amplitude * (1.0 - std::cos(kTwoPi * s / env.duration));
}

cplx sample_drive(const DriveEnvelope& env, double t) {
  const double e = drive_envelope(env, t);
  if (e == 0.0) return 0.0;
  const double s = t - env.t0;
  return e * std::exp(kI * (-kTwoPi * env.detuning_mhz * 1e-3 * s + env.phase));
}

void FluxPulse::validate() const {
  require(std::isfinite(amplitude) && std::isfinite(duration) && std::isfinite(sigma),
          "flux pulse fields must be finite");
  require(sigma > 0, "flux pulse sigma must be positive");
  require(duration > 8.0 * sigma, "flux pulse needs t_g > 8 sigma");
}

double sample_flux(const FluxPulse& p, double t) {
  auto one = [&](double s) {
    const double w = std::sqrt(2.0) * p.sigma;
    return 0.5 * p.amplitude *
           (std::erf((s - 4.0 * p.sigma) / w) - std::erf((s - p.duration + 4.0 * p.sigma) / w));
  };
  double v = one(t);
  if (p.net_zero) v -= one(t - p.duration);
  return v;
}

std::vector<double> sample_flux(const FluxPulse& pulse, double t_start, double dt, int n) {
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = sample_flux(pulse, t_start + k * dt);
  return out;
}

double lowpass_sigma_ns(double fc_mhz) {
  const double f_sigma = fc_mhz * 1e-3 / std::sqrt(2.0 * std::log(2.0));
  return 1.0 / (kTwoPi * f_sigma);
}

std::vector<double> gaussian_lowpass(const std::vector<double>& x, double fc_mhz, double dt) {
  require(fc_mhz > 0 && std::isfinite(fc_mhz), "cut-off must be positive");
  require(dt > 0, "sample spacing must be positive");
  if (fc_mhz * 1e-3 * dt > 0.5)
    throw InvalidArgument("gaussian_lowpass: sampling too coarse for the cut-off");
  const int n = static_cast<int>(x.size());
  if (n == 0) return {};
  const double st = lowpass_sigma_ns(fc_mhz);
  const int half = static_cast<int>(std::ceil(7.0 * st / dt));
  std::vector<double> taps(2 * half + 1);
  double sum = 0.0;
  for (int k = -half; k <= half; ++k) {
    const double u = k * dt / st;
    taps[k + half] = std::exp(-0.5 * u * u);
    sum += taps[k + half];
  }
  for (double& t : taps) t /= sum;
  auto reflect = [n](long j) {
    const long period = 2L * n;
    j %= period;
    if (j < 0) j += period;
    return static_cast<int>(j < n ? j : period - 1 - j);
  };
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -half; k <= half; ++k) acc += taps[k + half] * x[reflect(i - k)];
    y[i] = acc;
  }
  return y;
}

void DistortionModel::validate() const {
  for (const auto& c : components) {
    require(std::isfinite(c.amplitude) && std::isfinite(c.tau), "distortion fields must be finite");
    require(c.tau > 0, "distortion time constants must be positive");
    require(std::abs(c.amplitude) < 1.0, "distortion amplitudes must satisfy |a| < 1");
  }
}

double DistortionModel::amplitude_sum() const {
  double s = 0.0;
  for (const auto& c : components) s += c.amplitude;
  return s;
}

std::vector<double> apply_distortion(const std::vector<double>& x, const DistortionModel& model,
                                     double dt) {
  model.validate();
  require(dt > 0, "sample spacing must be positive");
  const size_t m = model.components.size();
  std::vector<double> alpha(m), state(m, 0.0);
  for (size_t i = 0; i < m; ++i) alpha[i] = std::exp(-dt / model.components[i].tau);
  std::vector<double> y(x.size());
  double prev = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    double out = x[k];
    for (size_t i = 0; i < m; ++i) {
      state[i] = alpha[i] * state[i] + x[k] - prev;
      out += model.components[i].amplitude * state[i];
    }
    y[k] = out;
    prev = x[k];
  }
  return y;
}

std::vector<double> predistort(const std::vector<double>& y, const DistortionModel& model,
                               double dt) {
  model.validate();
  require(dt > 0, "sample spacing must be positive");
  const double gain = 1.0 + model.amplitude_sum();
  if (!(gain > 1e-12)) throw InvalidArgument("predistort: response is not invertible");
  const size_t m = model.components.size();
  std::vector<double> alpha(m), state(m, 0.0);
  for (size_t i = 0; i < m; ++i) alpha[i] = std::exp(-dt / model.components[i].tau);
  std::vector<double> x(y.size());
  double prev = 0.0;
  for (size_t k = 0; k < y.size(); ++k) {
    double rest = 0.0;
    for (size_t i = 0; i < m; ++i)
      rest += model.components[i].amplitude * (alpha[i] * state[i] - prev);
    const double xk = (y[k] - rest) / gain;
    for (size_t i = 0; i < m; ++i) state[i] = alpha[i] * state[i] + xk - prev;
    x[k] = xk;
    prev = xk;
  }
  return x;
}

void CrosstalkMatrix::validate() const {
  require(m.allFinite(), "crosstalk matrix must be finite");
  require(std::abs(m(0, 0) - 1.0) < 1e-12 && std::abs(m(1, 1) - 1.0) < 1e-12,
          "crosstalk matrix needs a unit diagonal");
  if (std::abs(m.determinant()) < 1e-12) throw InvalidArgument("crosstalk matrix is singular");
}

CrosstalkMatrix device_crosstalk() {
  CrosstalkMatrix c;
  c.m << 1.0, -0.08375, -0.07722, 1.0;
  return c;
}

Vector2d crosstalk_compensate(const Vector2d& target, const CrosstalkMatrix& m) {
  m.validate();
  return m.m.partialPivLu().solve(target);
}

Vector2d crosstalk_apply(const Vector2d& settings, const CrosstalkMatrix& m) {
  m.validate();
  return m.m * settings;
}

std::vector<double> quantize(const std::vector<double>& x, double resolution) {
  require(resolution > 0, "quantization step must be positive");
  std::vector<double> y(x.size());
  for (size_t k = 0; k < x.size(); ++k) y[k] = resolution * std::round(x[k] / resolution);
  return y;
}

double FluxWaveform::at(double t) const {
  const int n = static_cast<int>(values.size());
  if (n == 0) return 0.0;
  const double u = (t - t_start) / dt;
  if (u < 0 || u > n - 1) return 0.0;
  int k = static_cast<int>(std::floor(u));
  if (k >= n - 1) k = n - 2;
  if (k < 0) return values[0];
  const double s = u - k;
  auto v = [&](int j) { return values[std::clamp(j, 0, n - 1)]; };
  const double p0 = v(k - 1), p1 = v(k), p2 = v(k + 1), p3 = v(k + 2);
  return p1 + 0.5 * s *
                  (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                  s * (3.0 * (p1 - p2) + p3 - p0)));
}

double default_padding(const FluxLine& line) {
  return line.lowpass_mhz > 0 ? std::ceil(8.0 * lowpass_sigma_ns(line.lowpass_mhz)) : 1.0;
}

FluxWaveform render_flux(const FluxPulse& pulse, const FluxLine& line, double padding) {
  pulse.validate();
  require(line.dt > 0, "flux line dt must be positive");
  require(padding >= 0, "padding must be non-negative");
  FluxWaveform w;
  w.dt = line.dt;
  w.t_start = -padding;
  const int n = static_cast<int>(std::ceil((pulse.total_duration() + 2.0 * padding) / line.dt)) + 1;
  std::vector<double> x = sample_flux(pulse, w.t_start, line.dt, n);
  if (!line.predistortion.components.empty()) x = predistort(x, line.predistortion, line.dt);
  if (line.dac_resolution > 0) x = quantize(x, line.dac_resolution);
  if (!line.distortion.components.empty()) x = apply_distortion(x, line.distortion, line.dt);
  if (line.lowpass_mhz > 0) x = gaussian_lowpass(x, line.lowpass_mhz, line.dt);
  w.values = std::move(x);
  return w;
}

}  // namespace fluxsim
