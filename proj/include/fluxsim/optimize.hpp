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

#ifndef FLUXSIM_OPTIMIZE_HPP_
#define FLUXSIM_OPTIMIZE_HPP_

#include <functional>

#include "fluxsim/types.hpp"

namespace fluxsim {

struct NelderMeadOptions {
  int max_iterations = 2000;
  double ftol_abs = 1e-15;
  double ftol_rel = 1e-12;
  double xtol = 1e-8;
  VectorXd initial_step;  // per-coordinate simplex offsets; default 0.05
};

struct OptimResult {
  VectorXd x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Derivative-free simplex minimization (standard reflection, expansion,
// contraction and shrink coefficients).
OptimResult nelder_mead(const std::function<double(const VectorXd&)>& f,
                        const VectorXd& x0, const NelderMeadOptions& options = {});

struct ScalarMin {
  double x = 0.0;
  double f = 0.0;
  int evaluations = 0;
};

// Brent minimization on [lo, hi].
ScalarMin brent_minimize(const std::function<double(double)>& f, double lo,
                         double hi, int bits = 40, int max_iter = 200);

// Bracketed root of f on [lo, hi]; throws NumericalError if f(lo), f(hi) share sign.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double xtol = 1e-13, int max_iter = 200);

// Root by plain bisection, used as an independent cross-check.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol = 1e-14, int max_iter = 400);

struct LeastSquaresOptions {
  int max_evaluations = 4000;
  double ftol = 1e-14;
  double xtol = 1e-14;
};

struct LeastSquaresResult {
  VectorXd x;
  VectorXd residuals;
  MatrixXd covariance;  // s^2 (J^T J)^-1 at the solution
  double cost = 0.0;    // sum of squared residuals
  int evaluations = 0;
  bool converged = false;
};

// Levenberg-Marquardt with forward-difference Jacobian. residual(x) must
// return m entries.
LeastSquaresResult levenberg_marquardt(
    const std::function<VectorXd(const VectorXd&)>& residual, int m,
    const VectorXd& x0, const LeastSquaresOptions& options = {});

// Central-difference Jacobian of residual at x.
MatrixXd numerical_jacobian(const std::function<VectorXd(const VectorXd&)>& residual,
                            const VectorXd& x);

}  // namespace fluxsim

#endif  // FLUXSIM_OPTIMIZE_HPP_
