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

#include "fluxsim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/NonLinearOptimization>

namespace fluxsim {

OptimResult nelder_mead(const std::function<double(const VectorXd&)>& f,
                        const VectorXd& x0, const NelderMeadOptions& options) {
  const int n = static_cast<int>(x0.size());
  if (n == 0) throw InvalidArgument("nelder_mead: empty parameter vector");
  VectorXd step = options.initial_step;
  if (step.size() == 0) step = VectorXd::Constant(n, 0.05);
  if (step.size() != n) throw InvalidArgument("nelder_mead: step size mismatch");

  std::vector<VectorXd> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  OptimResult res;
  auto eval = [&](const VectorXd& x) {
    ++res.evaluations;
    double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  for (int i = 0; i < n; ++i) pts[i + 1](i) += step(i);
  for (int i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<int> order(n + 1);
  for (int it = 0; it < options.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order.front(), worst = order.back(), second = order[n - 1];

    double spread = vals[worst] - vals[best];
    double xspread = 0.0;
    for (int i = 0; i <= n; ++i)
      xspread = std::max(xspread, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
    if (spread <= options.ftol_abs + options.ftol_rel * std::abs(vals[best]) &&
        xspread <= options.xtol) {
      res.converged = true;
      res.iterations = it;
      break;
    }
    res.iterations = it + 1;

    VectorXd centroid = VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= n;

    VectorXd xr = centroid + (centroid - pts[worst]);
    double fr = eval(xr);
    if (fr < vals[best]) {
      VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    bool outside = fr < vals[worst];
    VectorXd xc = outside ? VectorXd(centroid + 0.5 * (xr - centroid))
                          : VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    double fc = eval(xc);
    if (fc < std::min(fr, vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
  }
  int best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  res.x = pts[best];
  res.f = vals[best];
  return res;
}

ScalarMin brent_minimize(const std::function<double(double)>& f, double lo,
                         double hi, int bits, int max_iter) {
  if (!(lo < hi)) throw InvalidArgument("brent_minimize: empty interval");
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  auto r = boost::math::tools::brent_find_minima(f, lo, hi, bits, iters);
  return {r.first, r.second, static_cast<int>(iters)};
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double xtol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw NumericalError("find_root: root not bracketed");
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  auto tol = [xtol](double a, double b) { return std::abs(b - a) <= xtol; };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if ((flo > 0) == (fhi > 0) && flo != 0.0 && fhi != 0.0)
    throw NumericalError("bisect_root: root not bracketed");
  for (int i = 0; i < max_iter && hi - lo > xtol * std::max(1.0, std::abs(lo)); ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

MatrixXd numerical_jacobian(const std::function<VectorXd(const VectorXd&)>& residual,
                            const VectorXd& x) {
  VectorXd r0 = residual(x);
  MatrixXd j(r0.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    j.col(i) = (residual(xp) - residual(xm)) / (2.0 * h);
  }
  return j;
}

namespace {

struct LmFunctor {
  using Scalar = double;
  using InputType = VectorXd;
  using ValueType = VectorXd;
  using JacobianType = MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::function<VectorXd(const VectorXd&)>* fn;
  int n_in;
  int n_out;
  int* counter;

  int inputs() const { return n_in; }
  int values() const { return n_out; }
  int operator()(const VectorXd& x, VectorXd& fvec) const {
    ++*counter;
    fvec = (*fn)(x);
    for (int i = 0; i < fvec.size(); ++i)
      if (!std::isfinite(fvec(i))) fvec(i) = 1e150;
    return 0;
  }
};

}  // namespace

LeastSquaresResult levenberg_marquardt(
    const std::function<VectorXd(const VectorXd&)>& residual, int m,
    const VectorXd& x0, const LeastSquaresOptions& options) {
  const int n = static_cast<int>(x0.size());
  if (m < n) throw InvalidArgument("levenberg_marquardt: fewer residuals than parameters");
  int counter = 0;
  LmFunctor functor{&residual, n, m, &counter};
  Eigen::NumericalDiff<LmFunctor> numdiff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<LmFunctor>> lm(numdiff);
  lm.parameters.maxfev = options.max_evaluations;
  lm.parameters.ftol = options.ftol;
  lm.parameters.xtol = options.xtol;
  VectorXd x = x0;
  auto status = lm.minimize(x);

  LeastSquaresResult out;
  out.x = x;
  out.residuals = residual(x);
  out.cost = out.residuals.squaredNorm();
  out.evaluations = counter;
  out.converged = status == Eigen::LevenbergMarquardtSpace::RelativeReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorAndReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::CosinusTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::XtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::FtolTooSmall;
  MatrixXd jac = numerical_jacobian(residual, x);
  double dof = std::max(1, m - n);
  double s2 = out.cost / dof;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(jac.transpose() * jac);
  out.covariance = s2 * cod.pseudoInverse();
  return out;
}

}  // namespace fluxsim
