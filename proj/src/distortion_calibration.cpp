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

#include "fluxsim/distortion_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "fluxsim/optimize.hpp"

namespace fluxsim {

void DistortionExperiment::validate() const {
  qubit.validate();
  if (!(z0 != 0) || !std::isfinite(z0)) throw InvalidArgument("DistortionExperiment: z0 must be nonzero");
  if (!(reference_ns > 0) || !(t_p > 0) || !(dt > 0) || !(z_p != 0))
    throw InvalidArgument("DistortionExperiment: invalid timing or probe flux");
  for (double t : delays)
    if (!(t >= 0)) throw InvalidArgument("DistortionExperiment: delays must be non-negative");
}

std::vector<double> default_distortion_delays() {
  std::vector<double> d;
  const int n = 60;
  for (int k = 0; k < n; ++k) d.push_back(std::round(2.0 * std::pow(2000.0, double(k) / (n - 1)) * 2.0) / 2.0);
  d.erase(std::unique(d.begin(), d.end()), d.end());
  return d;
}

DistortionProbe::DistortionProbe(const DistortionExperiment& experiment) : exp_(experiment) {
  exp_.validate();
  delays_ = exp_.delays.empty() ? default_distortion_delays() : exp_.delays;
  for (double& t : delays_) t = std::round(t / exp_.dt) * exp_.dt;

  // Table over the flux range a distorted probe can visit.
  const double span = 0.5 * std::abs(exp_.z_p) + 0.5 * std::abs(exp_.z0);
  const double lo = exp_.z_p - span, hi = exp_.z_p + span;
  const int n = 81;
  const double h = (hi - lo) / (n - 1);
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k) {
    FluxoniumParams p = exp_.qubit;
    p.phi_ext += lo + k * h;
    w[k] = transition_frequencies(p).omega10;
  }
  auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
      w.begin(), w.end(), lo, h);
  omega_ = [spline, lo, hi](double z) {
    if (z < lo || z > hi) throw NumericalError("DistortionProbe: flux outside the frequency table");
    return (*spline)(z);
  };
  FluxoniumParams p = exp_.qubit;
  p.phi_ext += exp_.z_p;
  sensitivity_ = flux_sensitivity(p);
}

double DistortionProbe::frequency(double z) const { return omega_(z); }

std::vector<double> DistortionProbe::phase_shifts(const DistortionModel& line,
                                                  const DistortionModel& predistortion) const {
  const double dt = exp_.dt;
  const long n_ref = std::lround(exp_.reference_ns / dt);
  const long n_probe = std::lround(exp_.t_p / dt);
  std::vector<double> out;
  out.reserve(delays_.size());
  for (double td : delays_) {
    const long n_delay = std::lround(td / dt);
    const long total = n_ref + n_delay + n_probe + 1;
    std::vector<double> with(total, 0.0), without(total, 0.0);
    for (long k = 0; k < n_ref; ++k) with[k] = exp_.z0;
    for (long k = n_ref + n_delay; k <= n_ref + n_delay + n_probe; ++k) {
      with[k] += exp_.z_p;
      without[k] = exp_.z_p;
    }
    auto render = [&](std::vector<double> x) {
      if (!predistortion.components.empty()) x = predistort(x, predistortion, dt);
      if (!line.components.empty()) x = apply_distortion(x, line, dt);
      return x;
    };
    const std::vector<double> a = render(with), b = render(without);
    double phase = 0.0;
    for (long k = n_ref + n_delay; k <= n_ref + n_delay + n_probe; ++k) {
      const double wgt = (k == n_ref + n_delay || k == n_ref + n_delay + n_probe) ? 0.5 : 1.0;
      phase += wgt * (omega_(a[k]) - omega_(b[k]));
    }
    out.push_back(-kTwoPi * phase * dt);
  }
  return out;
}

std::vector<double> distortion_phase_model(const std::vector<double>& delays, double z0,
                                           double sensitivity, double t_p,
                                           const DistortionModel& model) {
  std::vector<double> y(delays.size(), 0.0);
  const double k = kTwoPi * z0 * sensitivity;
  for (std::size_t i = 0; i < delays.size(); ++i)
    for (const DistortionComponent& c : model.components)
      y[i] += k * c.tau * c.amplitude *
              (std::exp(-delays[i] / c.tau) - std::exp(-(delays[i] + t_p) / c.tau));
  return y;
}

double phase_error_rms(const std::vector<double>& phases) {
  if (phases.empty()) return 0.0;
  double s = 0.0;
  for (double p : phases) s += p * p;
  return std::sqrt(s / phases.size());
}

namespace {

struct ProjectedFit {
  std::vector<double> tau;
  VectorXd amplitude;
  double cost = 0.0;
};

class Projection {
 public:
  Projection(const std::vector<double>& delays, const std::vector<double>& phases, double k,
             double t_p)
      : delays_(delays), y_(Eigen::Map<const VectorXd>(phases.data(), phases.size())), k_(k),
        t_p_(t_p) {}

  int rows() const { return static_cast<int>(y_.size()); }

  VectorXd column(double tau) const {
    VectorXd c(delays_.size());
    for (std::size_t i = 0; i < delays_.size(); ++i)
      c(i) = k_ * tau * (std::exp(-delays_[i] / tau) - std::exp(-(delays_[i] + t_p_) / tau));
    return c;
  }

  ProjectedFit solve(const std::vector<double>& tau) const {
    MatrixXd a(rows(), tau.size());
    for (std::size_t j = 0; j < tau.size(); ++j) a.col(j) = column(tau[j]);
    ProjectedFit f;
    f.tau = tau;
    f.amplitude = a.colPivHouseholderQr().solve(y_);
    f.cost = (a * f.amplitude - y_).squaredNorm();
    return f;
  }

  VectorXd residual(const std::vector<double>& tau, const VectorXd& amp) const {
    VectorXd r = -y_;
    for (std::size_t j = 0; j < tau.size(); ++j) r += amp(j) * column(tau[j]);
    return r;
  }

 private:
  std::vector<double> delays_;
  VectorXd y_;
  double k_;
  double t_p_;
};

ProjectedFit polish(const Projection& proj, std::vector<double> tau, double tau_min,
                    double tau_max) {
  const int k = static_cast<int>(tau.size());
  auto clamp_tau = [&](const VectorXd& x) {
    std::vector<double> t(k);
    for (int j = 0; j < k; ++j) t[j] = std::exp(std::clamp(x(j), std::log(tau_min), std::log(tau_max)));
    return t;
  };
  VectorXd x0(k);
  for (int j = 0; j < k; ++j) x0(j) = std::log(tau[j]);
  NelderMeadOptions nm;
  nm.initial_step = VectorXd::Constant(k, 0.2);
  nm.max_iterations = 4000;
  nm.xtol = 1e-10;
  nm.ftol_abs = 0.0;
  const OptimResult r = nelder_mead([&](const VectorXd& x) { return proj.solve(clamp_tau(x)).cost; }, x0, nm);
  return proj.solve(clamp_tau(r.x));
}

void combinations(int n, int k, int start, std::vector<int>& cur,
                  const std::function<void(const std::vector<int>&)>& f) {
  if (static_cast<int>(cur.size()) == k) {
    f(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, f);
    cur.pop_back();
  }
}

DistortionModel to_model(const ProjectedFit& f) {
  DistortionModel m;
  for (std::size_t j = 0; j < f.tau.size(); ++j) m.components.push_back({f.amplitude(j), f.tau[j]});
  std::sort(m.components.begin(), m.components.end(),
            [](const DistortionComponent& a, const DistortionComponent& b) { return a.tau < b.tau; });
  return m;
}

}  // namespace

DistortionFit fit_distortion(const std::vector<double>& delays, const std::vector<double>& phases,
                             double z0, double sensitivity, double t_p,
                             const DistortionFitOptions& options) {
  if (delays.size() != phases.size() || delays.empty())
    throw InvalidArgument("fit_distortion: delays and phases must match");
  if (options.max_components < 1 || options.requested_components < 1 ||
      options.requested_components > options.max_components || options.tau_grid < options.max_components ||
      !(options.tau_min > 0) || !(options.tau_max > options.tau_min))
    throw InvalidArgument("fit_distortion: invalid options");
  if (static_cast<int>(delays.size()) <= 2 * options.max_components)
    throw InvalidArgument("fit_distortion: not enough delays for the model order");

  const Projection proj(delays, phases, kTwoPi * z0 * sensitivity, t_p);
  std::vector<double> grid(options.tau_grid);
  for (int i = 0; i < options.tau_grid; ++i)
    grid[i] = options.tau_min * std::pow(options.tau_max / options.tau_min, double(i) / (options.tau_grid - 1));

  DistortionFit out;
  std::vector<ProjectedFit> fits;
  for (int k = 1; k <= options.max_components; ++k) {
    ProjectedFit best;
    best.cost = 1e300;
    std::vector<int> cur;
    combinations(options.tau_grid, k, 0, cur, [&](const std::vector<int>& idx) {
      std::vector<double> tau;
      for (int i : idx) tau.push_back(grid[i]);
      ProjectedFit f = proj.solve(tau);
      if (f.cost < best.cost) best = std::move(f);
    });
    ProjectedFit cand = polish(proj, best.tau, options.tau_min, options.tau_max);
    if (!fits.empty()) {
      // Nested start: previous order plus the best single added time constant.
      const ProjectedFit& prev = fits.back();
      ProjectedFit nested;
      nested.cost = 1e300;
      for (double g : grid) {
        std::vector<double> tau = prev.tau;
        tau.push_back(g);
        ProjectedFit f = proj.solve(tau);
        if (f.cost < nested.cost) nested = std::move(f);
      }
      nested = polish(proj, nested.tau, options.tau_min, options.tau_max);
      if (nested.cost < cand.cost) cand = std::move(nested);
      if (cand.cost > prev.cost) {
        cand.tau = prev.tau;
        cand.tau.push_back(options.tau_max);
        cand.amplitude = VectorXd::Zero(k);
        cand.amplitude.head(k - 1) = prev.amplitude;
        cand.cost = prev.cost;
      }
    }
    fits.push_back(cand);
    out.cost_by_order.push_back(cand.cost);
    out.model_by_order.push_back(to_model(cand));
  }

  int sel = 1;
  const double floor_cost = options.noise_floor_rad * options.noise_floor_rad * delays.size();
  while (sel < options.max_components && fits[sel - 1].cost > floor_cost &&
         fits[sel - 1].cost > options.selection_ratio * fits[sel].cost)
    ++sel;
  out.selected_components = sel;
  out.component_mismatch = sel != options.requested_components;
  out.model = out.model_by_order[sel - 1];
  out.rms = std::sqrt(fits[sel - 1].cost / delays.size());

  // Joint refinement for uncertainties.
  const int k = sel;
  const std::vector<double> tau0 = fits[sel - 1].tau;
  const VectorXd a0 = fits[sel - 1].amplitude;
  VectorXd x0(2 * k);
  for (int j = 0; j < k; ++j) {
    x0(j) = a0(j);
    x0(k + j) = std::log(tau0[j]);
  }
  auto residual = [&](const VectorXd& x) {
    std::vector<double> tau(k);
    for (int j = 0; j < k; ++j) tau[j] = std::exp(x(k + j));
    return proj.residual(tau, x.head(k));
  };
  const LeastSquaresResult lm = levenberg_marquardt(residual, proj.rows(), x0);
  VectorXd xs = x0;
  MatrixXd cov = lm.covariance;
  if (lm.cost <= fits[sel - 1].cost && lm.x.allFinite()) {
    xs = lm.x;
    out.rms = std::sqrt(lm.cost / delays.size());
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return xs(k + i) < xs(k + j); });
  DistortionModel sorted;
  for (int j : order) {
    sorted.components.push_back({xs(j), std::exp(xs(k + j))});
    const bool ok = cov.rows() == 2 * k && std::isfinite(cov(j, j)) && std::isfinite(cov(k + j, k + j));
    out.sigma_amplitude.push_back(ok ? std::sqrt(std::max(0.0, cov(j, j))) : 0.0);
    out.sigma_tau.push_back(ok ? std::exp(xs(k + j)) * std::sqrt(std::max(0.0, cov(k + j, k + j))) : 0.0);
  }
  out.model = sorted;
  return out;
}

DistortionMeasurement measure_distortion(const DistortionProbe& probe, const DistortionModel& injected,
                                         const DistortionFitOptions& options) {
  DistortionMeasurement m;
  m.delays = probe.delays();
  m.phases = probe.phase_shifts(injected);
  m.sensitivity = probe.sensitivity();
  const DistortionExperiment& e = probe.experiment();
  m.fit = fit_distortion(m.delays, m.phases, e.z0, m.sensitivity, e.t_p, options);
  return m;
}

}  // namespace fluxsim
