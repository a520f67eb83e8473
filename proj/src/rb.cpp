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

#include "fluxsim/rb.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "fluxsim/fidelity.hpp"
#include "fluxsim/optimize.hpp"
#include "fluxsim/parallel.hpp"

namespace fluxsim {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int uniform_index(std::uint64_t x, int n) {
  return static_cast<int>((static_cast<unsigned __int128>(x) * static_cast<unsigned>(n)) >> 64);
}

const CliffordGroup& group_for(int n_qubits) {
  if (n_qubits == 1) return CliffordGroup::single();
  if (n_qubits == 2) return CliffordGroup::two();
  throw InvalidArgument("RB supports 1 or 2 qubits");
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

MatrixXcd embed(const MatrixXcd& g, int qubit, int n_qubits) {
  if (n_qubits == 1) return g;
  const MatrixXcd id = MatrixXcd::Identity(2, 2);
  return qubit == 0 ? kron(g, id) : kron(id, g);
}

using Kraus = std::vector<MatrixXcd>;

MatrixXcd superop(const Kraus& ks) {
  const Eigen::Index d = ks.front().rows();
  MatrixXcd check = MatrixXcd::Zero(d, d);
  MatrixXcd s = MatrixXcd::Zero(d * d, d * d);
  for (const auto& k : ks) {
    check += k.adjoint() * k;
    s += kron(k.conjugate(), k);
  }
  if ((check - MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-12)
    throw NumericalError("RB noise channel is not trace preserving");
  return s;
}

Kraus single_depolarizing(double eps) {
  const double w = std::sqrt(eps / 4.0);
  return {std::sqrt(1.0 - 0.75 * eps) * MatrixXcd(Matrix2cd::Identity()), w * MatrixXcd(pauli_x()),
          w * MatrixXcd(pauli_y()), w * MatrixXcd(pauli_z())};
}

Kraus register_depolarizing(double eps, int n_qubits) {
  if (n_qubits == 1) return single_depolarizing(eps);
  const std::array<Matrix2cd, 4> p = {Matrix2cd::Identity(), pauli_x(), pauli_y(), pauli_z()};
  Kraus out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double w = (a == 0 && b == 0) ? std::sqrt(1.0 - 15.0 * eps / 16.0) : std::sqrt(eps / 16.0);
      out.push_back(w * kron(p[a], p[b]));
    }
  return out;
}

Kraus bloch_redfield_kraus(double t_ns, const CoherenceTimes& c) {
  const double t = t_ns * 1e-3;
  const double keep = std::exp(-t / c.t1);
  const double f = std::min(1.0, std::exp(-t / c.t2 + t / (2.0 * c.t1)));
  Matrix2cd a0 = Matrix2cd::Zero(), a1 = Matrix2cd::Zero();
  a0(0, 0) = 1.0;
  a0(1, 1) = std::sqrt(keep);
  a1(0, 1) = std::sqrt(1.0 - keep);
  const Matrix2cd d0 = std::sqrt((1.0 + f) / 2.0) * Matrix2cd::Identity();
  const Matrix2cd d1 = std::sqrt((1.0 - f) / 2.0) * pauli_z();
  return {d0 * a0, d0 * a1, d1 * a0, d1 * a1};
}

Kraus embed_all(const Kraus& ks, int qubit, int n_qubits) {
  Kraus out;
  for (const auto& k : ks) out.push_back(embed(k, qubit, n_qubits));
  return out;
}

MatrixXcd unitary_superop(const MatrixXcd& u) { return kron(u.conjugate(), u); }

void validate_channel(const PrimitiveChannel& c, const char* what) {
  if (!(c.duration_ns >= 0)) throw InvalidArgument(std::string(what) + ": duration must be >= 0");
  if (!(c.depolarizing >= 0 && c.depolarizing <= 1))
    throw InvalidArgument(std::string(what) + ": depolarizing strength must lie in [0, 1]");
}

double residual_cost(const VectorXd& m, const VectorXd& y, double p, double* a, double* b) {
  MatrixXd x(m.size(), 2);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    x(i, 0) = std::pow(p, m(i));
    x(i, 1) = 1.0;
  }
  const Eigen::Vector2d coef = x.completeOrthogonalDecomposition().solve(y);
  if (a) *a = coef(0);
  if (b) *b = coef(1);
  return (x * coef - y).squaredNorm();
}

}  // namespace

std::uint64_t rb_stream_key(std::uint64_t seed, std::uint64_t m, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ (m * 0xD1B54A32D192ED03ULL)) ^
                    (index * 0x8CB92BA72F3D8DD7ULL));
}

std::uint64_t rb_stream_value(std::uint64_t key, std::uint64_t j) {
  return splitmix64(key + (j + 1) * 0x9E3779B97F4A7C15ULL);
}

RBCircuit sample_rb_circuit(int n_qubits, int m, std::uint64_t seed, int sequence_index,
                            const std::optional<std::vector<GateOp>>& interleave) {
  if (m < 1) throw InvalidArgument("sample_rb_circuit: m must be >= 1");
  if (sequence_index < 0) throw InvalidArgument("sample_rb_circuit: sequence index must be >= 0");
  const CliffordGroup& group = group_for(n_qubits);
  std::optional<int> target;
  if (interleave) target = group.index_of(decomposition_unitary(*interleave, n_qubits));
  const std::uint64_t key = rb_stream_key(seed, static_cast<std::uint64_t>(m),
                                          static_cast<std::uint64_t>(sequence_index));
  RBCircuit c;
  c.n_qubits = n_qubits;
  c.m = m;
  std::vector<int> applied;
  for (int j = 0; j < m; ++j) {
    const int idx = uniform_index(rb_stream_value(key, j), group.size());
    c.cliffords.push_back(idx);
    c.ops.push_back(group[idx].decomposition);
    applied.push_back(idx);
    if (target) {
      c.cliffords.push_back(-1);
      c.ops.push_back(*interleave);
      applied.push_back(*target);
    }
  }
  const int r = group.recovery(applied);
  c.cliffords.push_back(r);
  c.ops.push_back(group[r].decomposition);
  return c;
}

std::vector<std::vector<GateOp>> schedule_moments(const std::vector<GateOp>& ops, int n_qubits) {
  std::vector<std::vector<GateOp>> moments;
  std::array<int, 2> next = {0, 0};
  for (const auto& op : ops) {
    int slot;
    if (op.gate == Primitive::kIswap) {
      if (n_qubits != 2) throw InvalidArgument("schedule_moments: iSWAP needs two qubits");
      slot = std::max(next[0], next[1]);
      next = {slot + 1, slot + 1};
    } else {
      if (op.qubit < 0 || op.qubit >= n_qubits) throw InvalidArgument("schedule_moments: bad qubit");
      slot = next[op.qubit]++;
    }
    if (static_cast<int>(moments.size()) <= slot) moments.resize(slot + 1);
    moments[slot].push_back(op);
  }
  return moments;
}

std::vector<TimedOp> schedule(const RBCircuit& circuit, const GateDurations& durations) {
  std::vector<TimedOp> out;
  double t = 0.0;
  for (const auto& ops : circuit.ops)
    for (const auto& moment : schedule_moments(ops, circuit.n_qubits)) {
      double span = 0.0;
      for (const auto& op : moment) {
        out.push_back({op, t});
        span = std::max(span, op.gate == Primitive::kIswap ? durations.iswap_ns : durations.single_ns);
      }
      t += span;
    }
  return out;
}

void RBNoiseModel::validate(int n_qubits) const {
  if (n_qubits != 1 && n_qubits != 2) throw InvalidArgument("RB supports 1 or 2 qubits");
  for (int q = 0; q < n_qubits; ++q) {
    validate_channel(single_qubit[q], "single-qubit channel");
    if (coherence[q]) coherence[q]->validate();
  }
  validate_channel(iswap, "iSWAP channel");
  if (!(clifford_depolarizing >= 0 && clifford_depolarizing <= 1))
    throw InvalidArgument("Clifford depolarizing strength must lie in [0, 1]");
  if (shots < 0) throw InvalidArgument("shots must be >= 0");
}

MatrixXcd decomposition_superoperator(const std::vector<GateOp>& ops, int n_qubits,
                                      const RBNoiseModel& noise) {
  const int d = 1 << n_qubits;
  MatrixXcd s = MatrixXcd::Identity(d * d, d * d);
  for (const auto& moment : schedule_moments(ops, n_qubits)) {
    MatrixXcd u = MatrixXcd::Identity(d, d);
    double span = 0.0;
    std::vector<MatrixXcd> channels;
    for (const auto& op : moment) {
      u = decomposition_unitary({op}, n_qubits) * u;
      if (op.gate == Primitive::kIswap) {
        span = std::max(span, noise.iswap.duration_ns);
        if (noise.iswap.depolarizing > 0)
          channels.push_back(superop(register_depolarizing(noise.iswap.depolarizing, 2)));
      } else {
        const auto& ch = noise.single_qubit[op.qubit];
        span = std::max(span, ch.duration_ns);
        if (ch.depolarizing > 0)
          channels.push_back(superop(embed_all(single_depolarizing(ch.depolarizing), op.qubit, n_qubits)));
      }
    }
    s = unitary_superop(u) * s;
    for (const auto& c : channels) s = c * s;
    for (int q = 0; q < n_qubits; ++q)
      if (noise.coherence[q] && span > 0)
        s = superop(embed_all(bloch_redfield_kraus(span, *noise.coherence[q]), q, n_qubits)) * s;
  }
  if (noise.clifford_depolarizing > 0)
    s = superop(register_depolarizing(noise.clifford_depolarizing, n_qubits)) * s;
  return s;
}

namespace {

double run_circuit(const RBCircuit& c, const std::vector<const MatrixXcd*>& superops) {
  const int d = 1 << c.n_qubits;
  VectorXcd rho = VectorXcd::Zero(d * d);
  rho(0) = 1.0;
  for (const MatrixXcd* s : superops) rho = (*s) * rho;
  return std::clamp(rho(0).real(), 0.0, 1.0);
}

}  // namespace

double sequence_fidelity(const RBCircuit& circuit, const RBNoiseModel& noise) {
  noise.validate(circuit.n_qubits);
  std::vector<MatrixXcd> store;
  store.reserve(circuit.ops.size());
  for (const auto& ops : circuit.ops) store.push_back(decomposition_superoperator(ops, circuit.n_qubits, noise));
  std::vector<const MatrixXcd*> ptrs;
  for (const auto& s : store) ptrs.push_back(&s);
  return run_circuit(circuit, ptrs);
}

RBFit fit_rb_decay(const std::vector<double>& m_values, const std::vector<double>& fidelities) {
  if (m_values.size() != fidelities.size()) throw InvalidArgument("fit_rb_decay: size mismatch");
  if (std::set<double>(m_values.begin(), m_values.end()).size() < 4)
    throw InvalidArgument("fit_rb_decay: needs at least 4 distinct sequence lengths");
  const Eigen::Index n = static_cast<Eigen::Index>(m_values.size());
  const VectorXd m = Eigen::Map<const VectorXd>(m_values.data(), n);
  const VectorXd y = Eigen::Map<const VectorXd>(fidelities.data(), n);
  RBFit fit;
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  if (y.maxCoeff() - y.minCoeff() <= 1e-12 * scale) {
    fit.p = 1.0;
    fit.a = 0.0;
    fit.b = y.mean();
    fit.converged = true;
    fit.near_boundary = true;
    return fit;
  }
  // p = 1 - 10^{-x}
  auto p_of = [](double x) { return 1.0 - std::pow(10.0, -x); };
  auto cost = [&](double x) { return residual_cost(m, y, p_of(x), nullptr, nullptr); };
  const int grid = 600;
  const double x_lo = 0.005, x_hi = 12.0;
  int best = 0;
  double best_cost = cost(x_lo);
  for (int i = 1; i <= grid; ++i) {
    const double c = cost(x_lo + (x_hi - x_lo) * i / grid);
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  const double h = (x_hi - x_lo) / grid;
  const double lo = x_lo + std::max(0, best - 1) * h;
  const double hi = x_lo + std::min(grid, best + 1) * h;
  const ScalarMin r = brent_minimize(cost, lo, hi, 52, 300);
  double x = r.x;
  double c = r.f;
  if (best_cost < c) {
    x = x_lo + best * h;
    c = best_cost;
  }
  fit.p = p_of(x);
  fit.cost = residual_cost(m, y, fit.p, &fit.a, &fit.b);
  MatrixXd jac(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    jac(i, 0) = std::pow(fit.p, m(i));
    jac(i, 1) = 1.0;
    jac(i, 2) = m(i) > 0 ? fit.a * m(i) * std::pow(fit.p, m(i) - 1.0) : 0.0;
  }
  const double s2 = n > 3 ? fit.cost / static_cast<double>(n - 3) : 0.0;
  const MatrixXd jtj = jac.transpose() * jac;
  const auto cod = jtj.completeOrthogonalDecomposition();
  const MatrixXd cov = s2 * cod.pseudoInverse();
  fit.sigma_a = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.sigma_b = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.sigma_p = std::sqrt(std::max(0.0, cov(2, 2)));
  const bool interior = best > 0 && best < grid;
  fit.converged = cod.rank() == 3 && std::isfinite(fit.p) && fit.p > 0 && fit.p <= 1 &&
                  (interior || best == grid);
  fit.near_boundary = best == grid || 1.0 - fit.p < std::max(1e-6, 2.0 * fit.sigma_p);
  return fit;
}

RBResult simulate_rb(const RBNoiseModel& noise, int n_qubits, const std::vector<int>& m_values, int k,
                     std::uint64_t seed, const std::optional<std::vector<GateOp>>& interleave,
                     int threads) {
  noise.validate(n_qubits);
  if (k < 1) throw InvalidArgument("simulate_rb: k must be >= 1");
  if (m_values.empty()) throw InvalidArgument("simulate_rb: no sequence lengths");
  for (int m : m_values)
    if (m < 1) throw InvalidArgument("simulate_rb: m must be >= 1");
  const CliffordGroup& group = group_for(n_qubits);
  const int tasks = static_cast<int>(m_values.size()) * k;
  std::vector<RBCircuit> circuits(tasks);
  parallel_for(tasks, threads, [&](int t) {
    circuits[t] = sample_rb_circuit(n_qubits, m_values[t / k], seed, t % k, interleave);
  });

  std::vector<int> used;
  {
    std::set<int> u;
    for (const auto& c : circuits)
      for (int i : c.cliffords)
        if (i >= 0) u.insert(i);
    used.assign(u.begin(), u.end());
  }
  std::vector<MatrixXcd> cache(used.size());
  parallel_for(static_cast<int>(used.size()), threads, [&](int i) {
    cache[i] = decomposition_superoperator(group[used[i]].decomposition, n_qubits, noise);
  });
  MatrixXcd target_superop;
  if (interleave) target_superop = decomposition_superoperator(*interleave, n_qubits, noise);

  std::vector<double> values(tasks);
  parallel_for(tasks, threads, [&](int t) {
    const RBCircuit& c = circuits[t];
    std::vector<const MatrixXcd*> ptrs;
    ptrs.reserve(c.cliffords.size());
    for (int i : c.cliffords) {
      if (i < 0) {
        ptrs.push_back(&target_superop);
      } else {
        const auto it = std::lower_bound(used.begin(), used.end(), i);
        ptrs.push_back(&cache[it - used.begin()]);
      }
    }
    double f = run_circuit(c, ptrs);
    if (noise.shots > 0) {
      const std::uint64_t key = rb_stream_key(seed, static_cast<std::uint64_t>(c.m),
                                              static_cast<std::uint64_t>(t % k));
      std::mt19937_64 gen(rb_stream_value(key, 1ULL << 40));
      std::binomial_distribution<int> dist(noise.shots, f);
      f = static_cast<double>(dist(gen)) / noise.shots;
    }
    values[t] = f;
  });

  RBResult res;
  res.n_qubits = n_qubits;
  res.m_values = m_values;
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    double sum = 0.0;
    for (int s = 0; s < k; ++s) sum += values[i * k + s];
    const double mean = sum / k;
    double var = 0.0;
    for (int s = 0; s < k; ++s) var += (values[i * k + s] - mean) * (values[i * k + s] - mean);
    res.mean.push_back(mean);
    res.std.push_back(k > 1 ? std::sqrt(var / (k - 1)) : 0.0);
  }
  if (std::set<int>(m_values.begin(), m_values.end()).size() >= 4) {
    std::vector<double> mv(m_values.begin(), m_values.end());
    res.fit = fit_rb_decay(mv, res.mean);
  }
  return res;
}

double clifford_fidelity_from_decay(double p, int d, double gates_per_clifford) {
  if (d != 2 && d != 4) throw InvalidArgument("clifford_fidelity_from_decay: d must be 2 or 4");
  if (!(gates_per_clifford > 0)) throw InvalidArgument("gates per Clifford must be > 0");
  return 1.0 - (1.0 - p) * (d - 1) / d / gates_per_clifford;
}

InterleavedFidelity interleaved_fidelity(double p_ref, double p_g, int d) {
  if (p_ref == 0.0) throw InvalidArgument("interleaved_fidelity: p_ref must be nonzero");
  if (d < 2) throw InvalidArgument("interleaved_fidelity: d must be >= 2");
  InterleavedFidelity out;
  out.fidelity = 1.0 - (1.0 - p_g / p_ref) * (d - 1) / d;
  out.in_domain = p_g > 0 && p_g <= p_ref && p_ref <= 1;
  return out;
}

Clifford2Errors clifford2_error_estimate(double r_iswap, double r_pa, double r_pb) {
  if (!(r_iswap >= 0 && r_pa >= 0 && r_pb >= 0))
    throw InvalidArgument("clifford2_error_estimate: errors must be >= 0");
  Clifford2Errors e;
  e.r1 = 45.0 / 24.0 * r_pa + 45.0 / 24.0 * r_pb;
  e.r2 = 109.0 / 24.0 * r_pa + 85.0 / 24.0 * r_pb + 2.0 * r_iswap;
  e.r3 = 85.0 / 24.0 * r_pa + 85.0 / 24.0 * r_pb + r_iswap;
  e.r4 = 69.0 / 24.0 * r_pa + 69.0 / 24.0 * r_pb + 3.0 * r_iswap;
  e.r_c2 = (576.0 * e.r1 + 5184.0 * e.r2 + 5184.0 * e.r3 + 576.0 * e.r4) / 11520.0;
  return e;
}

}  // namespace fluxsim
