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

#ifndef FLUXSIM_EVOLUTION_HPP_
#define FLUXSIM_EVOLUTION_HPP_

#include <functional>
#include <vector>

#include "fluxsim/types.hpp"

namespace fluxsim {

struct EvolutionOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_segment = 0.5;  // ns, frozen-reference segment length
  double min_step = 1e-9;    // ns
  long max_steps = 20'000'000;

  void validate() const;
};

// H(t) = h0 + Σ_k c_k(t) ops[k], all in GHz. Evolution is exp(-i 2π ∫H dt).
struct TimeDependentHamiltonian {
  enum class Reference {
    kStatic,  // interaction picture of h0 over the whole span
    kFrozen,  // per segment, interaction picture of H at the segment midpoint
  };

  MatrixXcd h0;
  std::vector<MatrixXcd> ops;
  // Writes ops.size() coefficients at time t.
  std::function<void(double t, double* c)> coefficients;
  Reference reference = Reference::kStatic;

  int dim() const { return static_cast<int>(h0.rows()); }
  MatrixXcd at(double t) const;
};

struct EvolutionStats {
  long steps = 0;
  long rejected = 0;
  int segments = 0;
  bool tolerance_met = true;
};

// Adaptive Dormand-Prince integration of the columns of initial from t0 to
// each time in stops (ascending, all >= t0). Returns the states at each stop.
std::vector<MatrixXcd> evolve(const TimeDependentHamiltonian& h, const MatrixXcd& initial,
                              double t0, const std::vector<double>& stops,
                              const EvolutionOptions& options = {},
                              EvolutionStats* stats = nullptr);

MatrixXcd evolve(const TimeDependentHamiltonian& h, const MatrixXcd& initial, double t0,
                 double t1, const EvolutionOptions& options = {},
                 EvolutionStats* stats = nullptr);

// Full propagator from t0 to t1.
MatrixXcd propagator(const TimeDependentHamiltonian& h, double t0, double t1,
                     const EvolutionOptions& options = {}, EvolutionStats* stats = nullptr);

// Fixed-step product of exact exponentials of H at step midpoints.
MatrixXcd evolve_trotter(const TimeDependentHamiltonian& h, const MatrixXcd& initial,
                         double t0, double t1, double dt);

// exp(-i 2π H t) for Hermitian H.
MatrixXcd hermitian_exp(const MatrixXcd& h, double t);

// max |U†U - I|.
double unitarity_defect(const MatrixXcd& u);

}  // namespace fluxsim

#endif  // FLUXSIM_EVOLUTION_HPP_
