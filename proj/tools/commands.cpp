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

#include "commands.hpp"

#include <cmath>
#include <map>
#include <random>

#include "fluxsim/calibration.hpp"
#include "fluxsim/clifford.hpp"
#include "fluxsim/distortion_calibration.hpp"
#include "fluxsim/fidelity.hpp"
#include "fluxsim/gates.hpp"
#include "fluxsim/hamiltonian.hpp"
#include "fluxsim/iswap_calibration.hpp"
#include "fluxsim/noise.hpp"
#include "fluxsim/parallel.hpp"
#include "fluxsim/rb.hpp"
#include "run_config.hpp"

namespace fluxsim::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) { return format_number(x); }

Json params_json(const FluxoniumParams& p) {
  return {{"EC_GHz", p.ec}, {"EL_GHz", p.el}, {"EJ_GHz", p.ej}, {"phi_ext", p.phi_ext}};
}

// Coherence times of the device qubits, µs.
std::optional<CoherenceTimes> default_coherence(const std::string& name) {
  if (name == "A") return CoherenceTimes{80.0, 30.0, std::nullopt, std::nullopt};
  if (name == "B") return CoherenceTimes{57.0, 17.0, std::nullopt, std::nullopt};
  return std::nullopt;
}

CoherenceTimes parse_coherence(const Section& s) {
  CoherenceTimes c;
  c.t1 = s.required_number("T1_us");
  c.t2 = s.required_number("T2_us");
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(s.where() + ": " + e.what());
  }
  return c;
}

void check_qubit(const RunContext& ctx, const Section& s, const std::string& name) {
  for (const DeviceQubit& q : ctx.device.qubits)
    if (q.name == name) return;
  s.fail("qubit", "device has no qubit named \"" + name + "\"");
}

// ---------------------------------------------------------------- spectrum

struct SpectrumOptions {
  double phi_min = 0.0;
  double phi_max = 1.0;
  int points = 101;
  int grid_points = 801;
  std::vector<std::string> qubits;
};

SpectrumOptions parse_spectrum(const RunContext& ctx) {
  const Section s = ctx.section("spectrum", {"phi_min", "phi_max", "points", "grid_points", "qubits"});
  SpectrumOptions o;
  o.phi_min = s.number("phi_min", o.phi_min);
  o.phi_max = s.number("phi_max", o.phi_max);
  if (!(o.phi_max > o.phi_min)) s.fail("phi_max", "must exceed phi_min");
  o.points = s.integer("points", o.points, 2);
  o.grid_points = s.integer("grid_points", o.grid_points, 101);
  std::vector<std::string> all;
  for (const DeviceQubit& q : ctx.device.qubits) all.push_back(q.name);
  o.qubits = s.texts("qubits", all);
  if (o.qubits.empty()) s.fail("qubits", "must not be empty");
  for (const std::string& n : o.qubits) check_qubit(ctx, s, n);
  return o;
}

void cmd_spectrum(const RunContext& ctx, OutputSet& files, std::ostream& log) {
  const SpectrumOptions o = parse_spectrum(ctx);
  FluxGrid grid;
  grid.n_points = o.grid_points;
  Json summary;
  summary["qubits"] = Json::array();
  for (const std::string& name : o.qubits) {
    const FluxoniumParams base = ctx.device.qubit(name).params;
    std::vector<TransitionFrequencies> rows(o.points);
    std::vector<double> phis(o.points);
    for (int i = 0; i < o.points; ++i) phis[i] = o.phi_min + (o.phi_max - o.phi_min) * i / (o.points - 1);
    parallel_for(o.points, ctx.threads, [&](int i) {
      FluxoniumParams p = base;
      p.phi_ext = phis[i];
      rows[i] = transition_frequencies(p, grid);
    });
    CsvTable t;
    t.header = {"phi_ext", "omega10_GHz", "omega21_GHz", "omega20_GHz"};
    for (int i = 0; i < o.points; ++i) t.rows.push_back({phis[i], rows[i].omega10, rows[i].omega21, rows[i].omega20});
    files.add(ctx.out / ("spectrum_" + name + ".csv"), t.to_string());

    const TransitionFrequencies idle = transition_frequencies(base, grid);
    Json q = {{"name", name}};
    q["params"] = params_json(base);
    q["idle"] = {{"phi_ext", base.phi_ext},
                 {"omega10_GHz", idle.omega10},
                 {"omega21_GHz", idle.omega21},
                 {"omega20_GHz", idle.omega20},
                 {"anharmonicity", idle.anharmonicity}};
    summary["qubits"].push_back(q);
    log << name << ": omega10 = " << fmt(idle.omega10) << " GHz, omega21 = " << fmt(idle.omega21)
        << " GHz, anharmonicity = " << fmt(idle.anharmonicity) << " at phi_ext = " << fmt(base.phi_ext)
        << "\n";
  }
  summary["JC_GHz"] = ctx.device.jc_ghz;
  summary["grid_points"] = o.grid_points;
  files.add(ctx.out / "spectrum.json", dump_json(summary));
}

// --------------------------------------------------------------------- fit

struct FitOptions {
  std::optional<fs::path> data;
  std::string qubit = "A";
  FluxoniumParams truth;
  FluxoniumParams guess;
  int points = 11;
  double phi_min = 0.35;
  double phi_max = 0.65;
  double noise_mhz = 1.0;
  int max_iterations = 3000;
};

FluxoniumParams parse_energies(const Section& s, FluxoniumParams p) {
  p.ec = s.number("EC_GHz", p.ec);
  p.el = s.number("EL_GHz", p.el);
  p.ej = s.number("EJ_GHz", p.ej);
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(s.where() + ": " + e.what());
  }
  return p;
}

FitOptions parse_fit(const RunContext& ctx) {
  const Section s = ctx.section("fit", {"data", "qubit", "truth", "guess", "points", "phi_min", "phi_max",
                                        "noise_MHz", "max_iterations"});
  FitOptions o;
  if (s.has("data")) o.data = ctx.resolve(s.text("data", ""));
  o.qubit = s.text("qubit", o.qubit);
  check_qubit(ctx, s, o.qubit);
  o.truth = parse_energies(s.child("truth", {"EC_GHz", "EL_GHz", "EJ_GHz"}), ctx.device.qubit(o.qubit).params);
  FluxoniumParams start = o.truth;
  start.ec *= 1.05;
  start.el *= 0.95;
  start.ej *= 1.05;
  o.guess = parse_energies(s.child("guess", {"EC_GHz", "EL_GHz", "EJ_GHz"}), start);
  o.points = s.integer("points", o.points, 4);
  o.phi_min = s.number("phi_min", o.phi_min);
  o.phi_max = s.number("phi_max", o.phi_max);
  if (!(o.phi_max > o.phi_min)) s.fail("phi_max", "must exceed phi_min");
  o.noise_mhz = s.number("noise_MHz", o.noise_mhz);
  if (o.noise_mhz < 0) s.fail("noise_MHz", "must be >= 0");
  o.max_iterations = s.integer("max_iterations", o.max_iterations, 1);
  return o;
}

std::vector<SpectrumPoint> read_spectrum_csv(const fs::path& path) {
  const CsvTable t = parse_csv(read_file(path));
  if (t.header != std::vector<std::string>{"phi_ext", "transition", "freq_GHz"})
    throw ConfigError(path.string() + ": expected header phi_ext,transition,freq_GHz");
  std::vector<SpectrumPoint> data;
  for (const auto& r : t.rows) {
    Transition label;
    if (r[1] == 10)
      label = Transition::kOmega10;
    else if (r[1] == 20)
      label = Transition::kOmega20;
    else
      throw ConfigError(path.string() + ": transition must be 10 or 20");
    data.push_back({r[0], label, r[2]});
  }
  return data;
}

void cmd_fit(const RunContext& ctx, OutputSet& files, std::ostream& log) {
  const FitOptions o = parse_fit(ctx);
  std::vector<SpectrumPoint> data;
  Json report;
  report["qubit"] = o.qubit;
  if (o.data) {
    data = read_spectrum_csv(*o.data);
    report["source"] = o.data->filename().string();
  } else {
    std::mt19937_64 rng(ctx.require_seed("fit"));
    std::normal_distribution<double> noise(0.0, o.noise_mhz * 1e-3);
    for (int i = 0; i < o.points; ++i) {
      FluxoniumParams p = o.truth;
      p.phi_ext = o.phi_min + (o.phi_max - o.phi_min) * i / (o.points - 1);
      const TransitionFrequencies f = transition_frequencies(p);
      data.push_back({p.phi_ext, Transition::kOmega10, f.omega10 + (o.noise_mhz > 0 ? noise(rng) : 0.0)});
      data.push_back({p.phi_ext, Transition::kOmega20, f.omega20 + (o.noise_mhz > 0 ? noise(rng) : 0.0)});
    }
    report["source"] = "synthetic";
    report["seed"] = *ctx.seed;
    report["noise_MHz"] = o.noise_mhz;
    report["truth"] = params_json(o.truth);
  }
  SpectrumFitOptions fo;
  fo.max_iterations = o.max_iterations;
  const SpectrumFit fit = fit_spectrum(data, o.guess, {}, fo);
  report["n_points"] = data.size();
  report["guess"] = params_json(o.guess);
  report["fitted"] = params_json(fit.params);
  report["rms_MHz"] = fit.rms * 1e3;
  report["iterations"] = fit.iterations;
  report["converged"] = fit.converged;
  files.add(ctx.out / "fit.json", dump_json(report));

  CsvTable t;
  t.header = {"phi_ext", "transition", "freq_GHz", "residual_MHz"};
  for (std::size_t i = 0; i < data.size(); ++i)
    t.rows.push_back({data[i].phi_ext, data[i].label == Transition::kOmega10 ? 10.0 : 20.0, data[i].freq_ghz,
                      fit.residuals(static_cast<Eigen::Index>(i)) * 1e3});
  files.add(ctx.out / "fit_residuals.csv", t.to_string());
  log << "fit: EC = " << fmt(fit.params.ec) << " GHz, EL = " << fmt(fit.params.el) << " GHz, EJ = "
      << fmt(fit.params.ej) << " GHz, rms = " << fmt(fit.rms * 1e3) << " MHz\n";
}

// ------------------------------------------------------------- calibration

struct SingleQubitCalibrationOptions {
  double duration_ns = 10.0;
  int n_levels = 5;
  int amplitude_passes = 2;
  bool axis = true;
  int shots = 0;
  std::uint64_t seed = 0;
};

struct SingleQubitCalibrationResult {
  double carrier_ghz = 0.0;
  double detuning_mhz = 0.0;
  double pi_amplitude = 0.0;
  double half_pi_amplitude = 0.0;
  double half_pi_detuning_mhz = 0.0;
  std::optional<double> axis_rad;
  bool common_peak = true;
  std::vector<CalibrationReport> reports;
};

SingleQubitCalibrationResult calibrate_single_qubit(const FluxoniumParams& params,
                                                    const SingleQubitCalibrationOptions& o,
                                                    const EvolutionOptions& evolution) {
  SingleQubitSimulator sim(DrivenQubit(params, o.n_levels), o.duration_ns, evolution);
  if (o.shots > 0) sim.set_shots(o.shots, o.seed);
  SingleQubitCalibrationResult r;
  r.carrier_ghz = sim.carrier();
  double a = sim.qubit().pi_amplitude(o.duration_ns);
  const DetuningCalibration d = calibrate_detuning(sim, a);
  r.detuning_mhz = d.detuning_mhz;
  r.common_peak = d.common_peak;
  r.reports.push_back(d.report);
  for (int i = 0; i < o.amplitude_passes; ++i) {
    const AmplitudeCalibration c = calibrate_amplitude(sim, a, RotationTarget::kPi);
    a = c.corrected_amplitude;
    r.reports.push_back(c.report);
  }
  // The frequency shift of the drive scales with the amplitude squared.
  double h = 0.5 * a;
  for (int i = 0; i < o.amplitude_passes; ++i) {
    sim.set_detuning_mhz(r.detuning_mhz * (h / a) * (h / a));
    const AmplitudeCalibration c = calibrate_amplitude(sim, h, RotationTarget::kHalfPi);
    h = c.corrected_amplitude;
    r.reports.push_back(c.report);
  }
  r.half_pi_detuning_mhz = r.detuning_mhz * (h / a) * (h / a);
  sim.set_detuning_mhz(r.detuning_mhz);
  r.pi_amplitude = a;
  r.half_pi_amplitude = h;
  if (o.axis) {
    const AxisCalibration ax = calibrate_axis(sim, {a, 0.0}, 0.0, h);
    r.axis_rad = ax.delta_phi;
    r.reports.push_back(ax.report);
  }
  return r;
}

double report_uncertainty(const std::vector<CalibrationReport>& reports, const std::string& name) {
  double u = 0.0;
  for (const CalibrationReport& r : reports)
    if (r.name == name) u = r.uncertainty;
  return u;
}

void store_single_qubit(CalibrationStore& store, const std::string& q, double duration,
                        const SingleQubitCalibrationResult& r, const std::string& ts) {
  store.set(q + ".duration_ns", duration, 0.0, ts);
  store.set(q + ".carrier_GHz", r.carrier_ghz, 0.0, ts);
  store.set(q + ".detuning_MHz", r.detuning_mhz, report_uncertainty(r.reports, "detuning_mhz"), ts);
  store.set(q + ".pi_amplitude", r.pi_amplitude, report_uncertainty(r.reports, "amplitude_pi"), ts);
  store.set(q + ".half_pi_amplitude", r.half_pi_amplitude, report_uncertainty(r.reports, "amplitude_half_pi"),
            ts);
  store.set(q + ".half_pi_detuning_MHz", r.half_pi_detuning_mhz, 0.0, ts);
  if (r.axis_rad) store.set(q + ".pi_axis_rad", *r.axis_rad, report_uncertainty(r.reports, "axis_error_rad"), ts);
}

void store_iswap(CalibrationStore& store, const IswapCalibration& c, const std::string& ts) {
  store.set("iswap.amplitude_phi0", c.amplitude, 0.0, ts);
  store.set("iswap.duration_ns", c.duration, 0.0, ts);
  store.set("iswap.swap_angle_rad", c.theta, 0.0, ts);
  store.set("iswap.gamma_rad", c.gamma, report_uncertainty(c.reports, "iswap_gamma_rad"), ts);
  store.set("iswap.chi_rad", c.chi, report_uncertainty(c.reports, "iswap_chi_rad"), ts);
  store.set("iswap.phi_rad", c.phi, report_uncertainty(c.reports, "iswap_phi_rad"), ts);
}

Json reports_json(const std::vector<CalibrationReport>& reports) {
  Json j = Json::array();
  for (const CalibrationReport& r : reports)
    j.push_back({{"name", r.name},
                 {"value", r.value},
                 {"uncertainty", r.uncertainty},
                 {"iterations", r.iterations},
                 {"residual", r.residual}});
  return j;
}

IswapCalibration run_iswap_calibration(const IswapSimulator& sim) {
  const FluxPulse base;
  const PulsedGateSource source(sim, base);
  return calibrate_iswap(source, iswap_options_for(sim, base));
}

IswapSetup iswap_setup(const RunContext& ctx) {
  IswapSetup setup;
  setup.evolution = ctx.evolution;
  return setup;
}

struct CalibrateOptions {
  std::vector<std::string> qubits;
  SingleQubitCalibrationOptions single;
  bool iswap = true;
  bool zz = true;
  int n_levels_coupled = 8;
  fs::path store;
};

CalibrateOptions parse_calibrate(const RunContext& ctx) {
  const Section s = ctx.section("calibrate", {"qubits", "duration_ns", "n_levels", "amplitude_passes", "axis",
                                              "iswap", "zz", "coupled_levels", "shots", "store"});
  CalibrateOptions o;
  o.qubits = s.texts("qubits", {ctx.device.qubits[0].name, ctx.device.qubits[1].name});
  for (const std::string& n : o.qubits) check_qubit(ctx, s, n);
  o.single.duration_ns = s.number("duration_ns", o.single.duration_ns);
  if (!(o.single.duration_ns > 0)) s.fail("duration_ns", "must be positive");
  o.single.n_levels = s.integer("n_levels", o.single.n_levels, 2);
  o.single.amplitude_passes = s.integer("amplitude_passes", o.single.amplitude_passes, 1);
  o.single.axis = s.boolean("axis", o.single.axis);
  o.single.shots = s.integer("shots", 0, 0);
  o.iswap = s.boolean("iswap", o.iswap);
  o.zz = s.boolean("zz", o.zz);
  o.n_levels_coupled = s.integer("coupled_levels", o.n_levels_coupled, 3);
  o.store = s.has("store") ? ctx.resolve(s.text("store", "")) : ctx.out / "calibration.json";
  if (o.single.shots > 0) o.single.seed = ctx.require_seed("calibrate");
  return o;
}

void cmd_calibrate(const RunContext& ctx, OutputSet& files, std::ostream& log) {
  const CalibrateOptions o = parse_calibrate(ctx);
  const std::string ts = calibration_timestamp();
  // Independent loops: one per qubit, then iSWAP and ZZ.
  const int nq = static_cast<int>(o.qubits.size());
  std::vector<SingleQubitCalibrationResult> single(nq);
  std::optional<IswapCalibration> iswap;
  std::optional<ZzMeasurement> zz;
  parallel_for(nq + 2, ctx.threads, [&](int task) {
    if (task < nq) {
      SingleQubitCalibrationOptions so = o.single;
      so.seed = o.single.seed + static_cast<std::uint64_t>(task);
      single[task] = calibrate_single_qubit(ctx.device.qubit(o.qubits[task]).params, so, ctx.evolution);
    } else if (task == nq && o.iswap) {
      const IswapSimulator sim(ctx.device.system(o.n_levels_coupled), iswap_setup(ctx));
      iswap = run_iswap_calibration(sim);
    } else if (task == nq + 1 && o.zz) {
      zz = measure_zz(CoupledModel(ctx.device.system(6)));
    }
  });

  CalibrationStore store;
  Json report;
  report["timestamp"] = ts;
  report["qubits"] = Json::array();
  for (int i = 0; i < nq; ++i) {
    store_single_qubit(store, o.qubits[i], o.single.duration_ns, single[i], ts);
    report["qubits"].push_back({{"name", o.qubits[i]},
                                {"common_detuning_peak", single[i].common_peak},
                                {"reports", reports_json(single[i].reports)}});
    log << o.qubits[i] << ": detuning " << fmt(single[i].detuning_mhz) << " MHz, pi amplitude "
        << fmt(single[i].pi_amplitude) << ", half-pi amplitude " << fmt(single[i].half_pi_amplitude) << "\n";
  }
  if (iswap) {
    store_iswap(store, *iswap, ts);
    report["iswap"] = {{"amplitude_phi0", iswap->amplitude},
                       {"duration_ns", iswap->duration},
                       {"swap_deviation_rad", iswap->swap_deviation},
                       {"fidelity", iswap->fidelity},
                       {"leakage", iswap->leakage},
                       {"evaluations", iswap->evaluations},
                       {"reports", reports_json(iswap->reports)}};
    log << "iSWAP: amplitude " << fmt(iswap->amplitude) << " Phi0, duration " << fmt(iswap->duration)
        << " ns, coherent error " << fmt(1.0 - iswap->fidelity) << "\n";
  }
  if (zz) {
    store.set("zz.zeta_MHz", zz->zeta_mhz, zz->report.uncertainty, ts);
    report["zz"] = {{"zeta_MHz", zz->zeta_mhz}, {"fit_ok", zz->fit_ok}, {"residual_rad", zz->residual_rad}};
    log << "ZZ: zeta/2pi = " << fmt(zz->zeta_mhz) << " MHz" << (zz->fit_ok ? "" : " (fringe fit flagged)")
        << "\n";
  }
  files.add(o.store, dump_json(store.to_json()));
  files.add(ctx.out / "calibrate_report.json", dump_json(report));
}

// -------------------------------------------------------------------- gate

struct GateOptions {
  std::string kind = "single";
  std::string qubit = "A";
  std::string target = "x_pi";
  int n_levels = 5;
  int coupled_levels = 8;
  bool autocalibrate = false;
  fs::path calibration;
  std::vector<double> scan;
  std::optional<CoherenceTimes> coherence;
  IswapBudgetTimes budget_times{60.0, 30.0, 57.0, 13.0, 1.0};
  std::vector<double> chevron_amplitudes;
  std::vector<double> chevron_durations;
  std::optional<double> duration_ns;
};

GateOptions parse_gate(const RunContext& ctx) {
  const Section s = ctx.section("gate", {"kind", "qubit", "target", "duration_ns", "n_levels", "coupled_levels",
                                         "autocalibrate", "calibration", "duration_scan", "coherence",
                                         "budget_times", "chevron"});
  GateOptions o;
  o.kind = s.choice("kind", o.kind, {"single", "iswap"});
  o.qubit = s.text("qubit", ctx.device.qubits[0].name);
  check_qubit(ctx, s, o.qubit);
  o.target = s.choice("target", o.target, {"x_pi", "x_pi2"});
  if (s.has("duration_ns")) {
    o.duration_ns = s.required_number("duration_ns");
    if (!(*o.duration_ns > 0)) s.fail("duration_ns", "must be positive");
  }
  o.n_levels = s.integer("n_levels", o.n_levels, 2);
  o.coupled_levels = s.integer("coupled_levels", o.coupled_levels, 3);
  o.autocalibrate = s.boolean("autocalibrate", o.autocalibrate);
  o.calibration = s.has("calibration") ? ctx.resolve(s.text("calibration", "")) : ctx.out / "calibration.json";
  if (s.has("duration_scan")) o.scan = parse_range(s.text("duration_scan", ""), "gate.duration_scan");
  if (!o.scan.empty() && !(o.scan.front() > 0)) s.fail("duration_scan", "durations must be positive");
  o.coherence = s.has("coherence") ? parse_coherence(s.child("coherence", {"T1_us", "T2_us"}))
                                   : default_coherence(o.qubit);
  if (o.kind == "single" && !o.coherence)
    s.fail("coherence", "required for qubits without built-in coherence times");
  const Section bt = s.child("budget_times", {"T1_A_r_us", "Tphi_A_sw_us", "T1_B_sw_us", "Tphi_B_sw_us",
                                              "Tphi_A_r_us"});
  if (s.has("budget_times")) {
    o.budget_times = {bt.time_or_inf("T1_A_r_us"), bt.time_or_inf("Tphi_A_sw_us"), bt.time_or_inf("T1_B_sw_us"),
                      bt.time_or_inf("Tphi_B_sw_us"), bt.time_or_inf("Tphi_A_r_us")};
  }
  const Section ch = s.child("chevron", {"amplitudes", "durations_ns"});
  if (s.has("chevron")) {
    if (o.kind != "iswap") s.fail("chevron", "only available for kind \"iswap\"");
    o.chevron_amplitudes = parse_range(ch.text("amplitudes", ""), ch.where() + ".amplitudes");
    o.chevron_durations = parse_range(ch.text("durations_ns", ""), ch.where() + ".durations_ns");
    if (o.chevron_durations.size() < 4) ch.fail("durations_ns", "need at least 4 durations");
  }
  return o;
}

struct SingleQubitGateSettings {
  double duration = 0.0;
  double carrier = 0.0;
  double detuning = 0.0;
  double amplitude = 0.0;
};

void cmd_gate(const RunContext& ctx, OutputSet& files, std::ostream& log) {
  const GateOptions o = parse_gate(ctx);
  Json report;
  report["kind"] = o.kind;
  std::optional<CalibrationStore> store;
  if (!o.autocalibrate) store = CalibrationStore::load(o.calibration);
  const std::string ts = calibration_timestamp();

  if (o.kind == "single") {
    const FluxoniumParams params = ctx.device.qubit(o.qubit).params;
    const DrivenQubit qubit(params, o.n_levels);
    SingleQubitGateSettings g;
    if (o.autocalibrate) {
      SingleQubitCalibrationOptions so;
      so.duration_ns = o.duration_ns.value_or(so.duration_ns);
      so.n_levels = o.n_levels;
      so.axis = false;
      const SingleQubitCalibrationResult r = calibrate_single_qubit(params, so, ctx.evolution);
      store.emplace();
      store_single_qubit(*store, o.qubit, so.duration_ns, r, ts);
      report["calibration_source"] = "autocalibrate";
    } else {
      report["calibration_source"] = o.calibration.filename().string();
    }
    g.duration = store->value(o.qubit + ".duration_ns");
    if (o.duration_ns && std::abs(*o.duration_ns - g.duration) > 1e-9)
      throw MissingCalibration("calibration for qubit " + o.qubit + " was taken at " + fmt(g.duration) +
                               " ns, not " + fmt(*o.duration_ns) + " ns; rerun `fluxsim calibrate` or pass --autocalibrate");
    g.carrier = store->value(o.qubit + ".carrier_GHz");
    const bool pi = o.target == "x_pi";
    g.detuning = store->value(o.qubit + (pi ? ".detuning_MHz" : ".half_pi_detuning_MHz"));
    g.amplitude = store->value(o.qubit + (pi ? ".pi_amplitude" : ".half_pi_amplitude"));
    const Matrix2cd target = pi ? pauli_x() : rotation_xy(0.0, kPi / 2);

    auto simulate = [&](double duration) {
      // Rescaled to other lengths: amplitude ∝ 1/T, frequency shift ∝ amplitude².
      const double r = g.duration / duration;
      DriveEnvelope env;
      env.amplitude = g.amplitude * r;
      env.duration = duration;
      env.detuning_mhz = g.detuning * r * r;
      return std::make_pair(env, simulate_single_qubit_gate(qubit, env, g.carrier, target, ctx.evolution));
    };
    const auto [env, r] = simulate(g.duration);
    const double overlay = coherence_limit_fidelity(g.duration, o.coherence->t1, o.coherence->t2);
    report["qubit"] = o.qubit;
    report["target"] = o.target;
    report["duration_ns"] = g.duration;
    report["amplitude"] = env.amplitude;
    report["detuning_MHz"] = env.detuning_mhz;
    report["carrier_GHz"] = g.carrier;
    report["report"] = gate_report_to_json(r);
    report["coherence_limit"] = {{"T1_us", o.coherence->t1}, {"T2_us", o.coherence->t2}, {"fidelity", overlay}};
    log << "gate " << o.target << " on " << o.qubit << ": fidelity " << fmt(r.fidelity) << ", leakage "
        << fmt(r.leakage) << ", coherence limit " << fmt(overlay) << "\n";

    if (!o.scan.empty()) {
      std::vector<GateReport> rows(o.scan.size());
      std::vector<DriveEnvelope> envs(o.scan.size());
      parallel_for(static_cast<int>(o.scan.size()), ctx.threads, [&](int i) {
        auto [e, rep] = simulate(o.scan[i]);
        envs[i] = e;
        rows[i] = rep;
      });
      CsvTable t;
      t.header = {"duration_ns", "amplitude", "detuning_MHz", "fidelity", "leakage", "coherence_limit"};
      for (std::size_t i = 0; i < o.scan.size(); ++i)
        t.rows.push_back({o.scan[i], envs[i].amplitude, envs[i].detuning_mhz, rows[i].fidelity, rows[i].leakage,
                          coherence_limit_fidelity(o.scan[i], o.coherence->t1, o.coherence->t2)});
      files.add(ctx.out / "gate_scan.csv", t.to_string());
    }
  } else {
    const IswapSimulator sim(ctx.device.system(o.coupled_levels), iswap_setup(ctx));
    if (o.autocalibrate) {
      const IswapCalibration c = run_iswap_calibration(sim);
      store.emplace();
      store_iswap(*store, c, ts);
      report["calibration_source"] = "autocalibrate";
    } else {
      report["calibration_source"] = o.calibration.filename().string();
    }
    FluxPulse pulse;
    pulse.amplitude = store->value("iswap.amplitude_phi0");
    pulse.duration = store->value("iswap.duration_ns");
    if (o.duration_ns && std::abs(*o.duration_ns - pulse.duration) > 1e-9)
      throw MissingCalibration("iSWAP calibration is for " + fmt(pulse.duration) + " ns, not " +
                               fmt(*o.duration_ns) + " ns; rerun `fluxsim calibrate` or pass --autocalibrate");
    const GateReport r = sim.simulate(pulse);
    const IswapBudget budget = iswap_error_budget(pulse.duration, o.budget_times);
    report["amplitude_phi0"] = pulse.amplitude;
    report["duration_ns"] = pulse.duration;
    report["sigma_ns"] = pulse.sigma;
    report["report"] = gate_report_to_json(r);
    report["coherence_limit"] = {{"error_budget", budget.total}, {"fidelity", 1.0 - budget.total}};
    log << "iSWAP: fidelity " << fmt(r.fidelity) << ", leakage " << fmt(r.leakage) << ", coherence limit "
        << fmt(1.0 - budget.total) << "\n";

    if (!o.scan.empty()) {
      std::vector<GateReport> rows(o.scan.size());
      parallel_for(static_cast<int>(o.scan.size()), ctx.threads, [&](int i) {
        FluxPulse p = pulse;
        p.duration = o.scan[i];
        rows[i] = sim.simulate(p);
      });
      CsvTable t;
      t.header = {"duration_ns", "amplitude", "detuning_MHz", "fidelity", "leakage", "coherence_limit"};
      for (std::size_t i = 0; i < o.scan.size(); ++i)
        t.rows.push_back({o.scan[i], pulse.amplitude, 0.0, rows[i].fidelity, rows[i].leakage,
                          1.0 - iswap_error_budget(o.scan[i], o.budget_times).total});
      files.add(ctx.out / "gate_scan.csv", t.to_string());
    }
    if (!o.chevron_amplitudes.empty()) {
      const ChevronMap map = chevron_scan(sim, pulse, o.chevron_amplitudes, o.chevron_durations, ctx.threads);
      CsvTable t;
      t.header = {"phi_amp", "t_g_ns", "p01"};
      for (std::size_t i = 0; i < map.amplitudes.size(); ++i)
        for (std::size_t j = 0; j < map.durations.size(); ++j)
          t.rows.push_back({map.amplitudes[i], map.durations[j], map.p01(i, j)});
      files.add(ctx.out / "chevron.csv", t.to_string());
      report["chevron_frequency_MHz"] = map.frequency_mhz;
    }
  }
  files.add(ctx.out / "gate.json", dump_json(report));
}

// ---------------------------------------------------------------------- rb

struct RbOptions {
  int qubits = 1;
  std::vector<int> m;
  int k = 20;
  std::optional<GateOp> interleave;
  RBNoiseModel noise;
  std::optional<double> r_iswap, r_pa, r_pb;
};

PrimitiveChannel parse_channel(const Section& s, PrimitiveChannel c) {
  c.duration_ns = s.number("duration_ns", c.duration_ns);
  c.depolarizing = s.number("depolarizing", c.depolarizing);
  if (c.duration_ns < 0) s.fail("duration_ns", "must be >= 0");
  if (c.depolarizing < 0 || c.depolarizing > 1) s.fail("depolarizing", "must lie in [0, 1]");
  return c;
}

RbOptions parse_rb(const RunContext& ctx) {
  const Section s = ctx.section("rb", {"qubits", "m", "k", "interleave", "interleave_qubit", "noise", "consistency"});
  RbOptions o;
  o.qubits = s.integer("qubits", 1, 1);
  if (o.qubits > 2) s.fail("qubits", "must be 1 or 2");
  const std::vector<int> default_m =
      o.qubits == 1 ? std::vector<int>{1, 2, 4, 8, 16, 32, 64, 128, 256, 512} : std::vector<int>{1, 2, 4, 8, 16, 32, 64};
  o.m = s.integers("m", default_m, 0);
  if (o.m.empty()) s.fail("m", "the sequence-length grid is empty");
  o.k = s.integer("k", o.k, 1);
  if (s.has("interleave")) {
    const std::string name = s.text("interleave", "");
    const auto p = primitive_from_name(name);
    if (!p) s.fail("interleave", "unknown gate \"" + name + "\" (I, X, Y, X90, X-90, Y90, Y-90, iSWAP)");
    if (*p == Primitive::kIswap && o.qubits != 2) s.fail("interleave", "iSWAP needs two qubits");
    const int q = s.integer("interleave_qubit", 0, 0);
    if (q >= o.qubits) s.fail("interleave_qubit", "out of range");
    o.interleave = GateOp{*p, q};
  }

  const bool custom = s.has("noise");
  const Section n = s.child("noise", {"single_qubit", "iswap", "coherence", "clifford_depolarizing", "shots"});
  PrimitiveChannel single{10.0, 0.0};
  for (int q = 0; q < 2; ++q) o.noise.single_qubit[q] = single;
  if (n.has("single_qubit")) {
    const Json& sq = n.raw("single_qubit");
    if (sq.is_array()) {
      if (sq.size() != 2) n.fail("single_qubit", "expected one object or an array of two");
      for (int q = 0; q < 2; ++q)
        o.noise.single_qubit[q] = parse_channel(
            Section(&sq[q], n.where() + ".single_qubit[" + std::to_string(q) + "]", {"duration_ns", "depolarizing"}),
            single);
    } else {
      const PrimitiveChannel c = parse_channel(n.child("single_qubit", {"duration_ns", "depolarizing"}), single);
      o.noise.single_qubit = {c, c};
    }
  }
  o.noise.iswap = parse_channel(n.child("iswap", {"duration_ns", "depolarizing"}), o.noise.iswap);
  if (n.has("coherence")) {
    const Json& c = n.raw("coherence");
    if (!c.is_array() || c.size() != 2) n.fail("coherence", "expected an array of two entries (object or null)");
    for (int q = 0; q < 2; ++q)
      if (!c[q].is_null())
        o.noise.coherence[q] = parse_coherence(
            Section(&c[q], n.where() + ".coherence[" + std::to_string(q) + "]", {"T1_us", "T2_us"}));
  } else if (!custom) {
    for (int q = 0; q < 2; ++q) o.noise.coherence[q] = default_coherence(ctx.device.qubits[q].name);
  }
  o.noise.clifford_depolarizing = n.number("clifford_depolarizing", 0.0);
  o.noise.shots = n.integer("shots", 0, 0);
  try {
    o.noise.validate(o.qubits);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("rb.noise: ") + e.what());
  }
  const Section c = s.child("consistency", {"r_iswap", "r_pa", "r_pb"});
  if (c.has("r_iswap")) o.r_iswap = c.required_number("r_iswap");
  if (c.has("r_pa")) o.r_pa = c.required_number("r_pa");
  if (c.has("r_pb")) o.r_pb = c.required_number("r_pb");
  return o;
}

double coherence_error(const std::optional<CoherenceTimes>& c, double t_ns) {
  return c ? 1.0 - coherence_limit_fidelity(t_ns, c->t1, c->t2) : 0.0;
}

struct FidelityEstimate {
  double value = 0.0;
  double sigma = 0.0;
};

FidelityEstimate clifford_estimate(const RBFit& fit, int d, double gates) {
  const double scale = (d - 1.0) / d / gates;
  return {clifford_fidelity_from_decay(fit.p, d, gates), scale * fit.sigma_p};
}

Json estimate_json(const FidelityEstimate& e) { return {{"value", e.value}, {"sigma", e.sigma}}; }

void cmd_rb(const RunContext& ctx, OutputSet& files, std::ostream& log) {
  const RbOptions o = parse_rb(ctx);
  const std::uint64_t seed = ctx.require_seed("rb");
  const int d = 1 << o.qubits;
  const RBResult ref = simulate_rb(o.noise, o.qubits, o.m, o.k, seed, std::nullopt, ctx.threads);
  files.add(ctx.out / "rb.csv", rb_csv(ref));

  Json report;
  report["qubits"] = o.qubits;
  report["seed"] = seed;
  report["k"] = o.k;
  report["m"] = o.m;
  report["fit"] = rb_fit_to_json(ref.fit);
  const FidelityEstimate fc = clifford_estimate(ref.fit, d, 1.0);
  report["clifford_fidelity"] = estimate_json(fc);
  log << "reference: p = " << fmt(ref.fit.p) << " +- " << fmt(ref.fit.sigma_p) << ", Clifford fidelity "
      << fmt(fc.value) << " +- " << fmt(fc.sigma) << "\n";
  if (o.qubits == 1) {
    const FidelityEstimate fp = clifford_estimate(ref.fit, 2, 1.875);
    report["primitive_fidelity"] = estimate_json(fp);
    log << "average primitive-gate fidelity " << fmt(fp.value) << " +- " << fmt(fp.sigma) << "\n";
  }

  std::optional<double> r_iswap_fit;
  if (o.interleave) {
    // Same seed: reference and interleaved runs share their random Cliffords.
    const RBResult il = simulate_rb(o.noise, o.qubits, o.m, o.k, seed, std::vector<GateOp>{*o.interleave},
                                    ctx.threads);
    files.add(ctx.out / "rb_interleaved.csv", rb_csv(il));
    const InterleavedFidelity f = interleaved_fidelity(ref.fit.p, il.fit.p, d);
    const double scale = (d - 1.0) / d;
    const double sigma = scale * std::hypot(il.fit.sigma_p / ref.fit.p, il.fit.p * ref.fit.sigma_p / (ref.fit.p * ref.fit.p));
    report["interleaved"] = {{"gate", primitive_name(o.interleave->gate)},
                             {"qubit", o.interleave->qubit},
                             {"fit", rb_fit_to_json(il.fit)},
                             {"gate_fidelity", {{"value", f.fidelity}, {"sigma", sigma}}},
                             {"in_domain", f.in_domain}};
    log << "interleaved " << primitive_name(o.interleave->gate) << ": p = " << fmt(il.fit.p) << " +- "
        << fmt(il.fit.sigma_p) << ", gate fidelity " << fmt(f.fidelity) << " +- " << fmt(sigma)
        << (f.in_domain ? "" : " (outside the valid domain)") << "\n";
    if (o.interleave->gate == Primitive::kIswap) r_iswap_fit = 1.0 - f.fidelity;
  }

  if (o.qubits == 2) {
    const auto& sq = o.noise.single_qubit;
    const double r_iswap = o.r_iswap.value_or(r_iswap_fit.value_or(
        0.75 * o.noise.iswap.depolarizing + coherence_error(o.noise.coherence[0], o.noise.iswap.duration_ns) +
        coherence_error(o.noise.coherence[1], o.noise.iswap.duration_ns)));
    const double r_pa =
        o.r_pa.value_or(0.5 * sq[0].depolarizing + coherence_error(o.noise.coherence[0], sq[0].duration_ns));
    const double r_pb =
        o.r_pb.value_or(0.5 * sq[1].depolarizing + coherence_error(o.noise.coherence[1], sq[1].duration_ns));
    const Clifford2Errors e = clifford2_error_estimate(r_iswap, r_pa, r_pb);
    report["consistency"] = {{"r_iswap", r_iswap},   {"r_pa", r_pa},         {"r_pb", r_pb},
                             {"r_c2", e.r_c2},       {"r_c2_fit", 1.0 - fc.value},
                             {"r_iswap_source", o.r_iswap ? "config" : r_iswap_fit ? "interleaved fit" : "noise model"}};
    log << "r_C2 consistency: r_iSWAP = " << fmt(r_iswap) << ", r_pA = " << fmt(r_pa) << ", r_pB = " << fmt(r_pb)
        << " -> r_C2 = " << fmt(e.r_c2) << " (fitted r_C2 = " << fmt(1.0 - fc.value) << ")\n";
  }
  files.add(ctx.out / "rb_fit.json", dump_json(report));
}

// ------------------------------------------------------------------ budget

struct BudgetOptions {
  double t_g_ns = 50.0;
  IswapBudgetTimes times;
  std::array<std::string, 5> sources;
  std::optional<double> reference_total;
  double reference_tolerance = 0.05;
  std::vector<std::pair<std::string, double>> loss;  // qubit, T1 µs
};

BudgetOptions parse_budget(const RunContext& ctx) {
  const Section s = ctx.section("budget", {"t_g_ns", "times", "reference_total", "reference_tolerance", "loss"});
  BudgetOptions o;
  o.t_g_ns = s.number("t_g_ns", o.t_g_ns);
  if (!(o.t_g_ns >= 0)) s.fail("t_g_ns", "must be >= 0");
  if (!s.has("times")) s.fail("times", "coherence-times block is required");
  const std::array<std::string, 5> keys = {"T1_A_r_us", "Tphi_A_sw_us", "T1_B_sw_us", "Tphi_B_sw_us", "Tphi_A_r_us"};
  const Section t = s.child("times", {keys.begin(), keys.end()});
  std::array<double, 5> v{};
  for (int i = 0; i < 5; ++i) {
    if (!t.has(keys[i])) t.fail(keys[i], "missing");
    v[i] = t.time_or_inf(keys[i]);
    o.sources[i] = "budget.times." + keys[i];
  }
  o.times = {v[0], v[1], v[2], v[3], v[4]};
  if (s.has("reference_total")) o.reference_total = s.required_number("reference_total");
  o.reference_tolerance = s.number("reference_tolerance", o.reference_tolerance);
  if (s.has("loss")) {
    const Json& l = s.raw("loss");
    if (!l.is_array()) s.fail("loss", "expected an array");
    for (std::size_t i = 0; i < l.size(); ++i) {
      const Section e(&l[i], "budget.loss[" + std::to_string(i) + "]", {"qubit", "T1_us"});
      const std::string q = e.text("qubit", "");
      check_qubit(ctx, e, q);
      const double t1 = e.required_number("T1_us");
      if (!(t1 > 0)) e.fail("T1_us", "must be positive");
      o.loss.emplace_back(q, t1);
    }
  }
  return o;
}

void cmd_budget(const RunContext& ctx, OutputSet& files, std::ostream& log) {
  const BudgetOptions o = parse_budget(ctx);
  const IswapBudget b = iswap_error_budget(o.t_g_ns, o.times);
  const std::array<double, 5> t = {o.times.t1_a_r, o.times.tphi_a_sw, o.times.t1_b_sw, o.times.tphi_b_sw,
                                   o.times.tphi_a_r};
  const std::array<const char*, 5> terms = {"t_g/(3 T1_A,r)", "t_g/(3 Tphi_A,sw)", "t_g/(3 T1_B,sw)",
                                            "t_g/(3 Tphi_B,sw)", "t_g^2/(3 Tphi_A,r^2)"};
  const std::array<const char*, 5> meaning = {
      "energy relaxation of Q_A at its idle flux",
      "white-noise dephasing of Q_A at the swap flux",
      "energy relaxation of Q_B during the swap",
      "white-noise dephasing of Q_B during the swap",
      "Gaussian (1/f) dephasing of Q_A at its idle flux"};
  Json report;
  report["t_g_ns"] = o.t_g_ns;
  report["components"] = Json::array();
  for (int i = 0; i < 5; ++i) {
    Json c = {{"term", terms[i]}, {"value", b.components[i]}};
    c["input_us"] = std::isinf(t[i]) ? Json("inf") : Json(t[i]);
    c["provenance"] = std::string(meaning[i]) + "; time from " + o.sources[i];
    report["components"].push_back(c);
  }
  report["total"] = b.total;
  log << "iSWAP error budget at t_g = " << fmt(o.t_g_ns) << " ns: total " << fmt(b.total) << "\n";
  if (o.reference_total) {
    const double rel = *o.reference_total != 0 ? (b.total - *o.reference_total) / *o.reference_total : 0.0;
    const bool ok = std::abs(rel) <= o.reference_tolerance;
    report["reference"] = {
        {"total", *o.reference_total},
        {"relative_difference", rel},
        {"within_tolerance", ok},
        {"note", "the sum of the five listed terms is " + fmt(b.total) + "; the quoted total " +
                     fmt(*o.reference_total) + " differs by " + fmt(100.0 * rel) + "%" +
                     (ok ? " (accepted, flagged)" : " (outside tolerance)")}};
    log << "note: quoted total " << fmt(*o.reference_total) << " differs from the exact sum by "
        << fmt(100.0 * rel) << "%\n";
  }
  if (!o.loss.empty()) {
    report["loss_tangents"] = Json::array();
    for (const auto& [q, t1] : o.loss) {
      const double w = transition_frequencies(ctx.device.qubit(q).params).omega10;
      const double tan_delta = loss_tangent(w, t1);
      report["loss_tangents"].push_back({{"qubit", q}, {"omega10_GHz", w}, {"T1_us", t1}, {"tan_delta", tan_delta}});
      log << q << ": loss tangent " << fmt(tan_delta) << " (omega10 = " << fmt(w) << " GHz, T1 = " << fmt(t1)
          << " us)\n";
    }
  }
  files.add(ctx.out / "budget.json", dump_json(report));
}

// -------------------------------------------------------------- distortion

struct DistortionOptions {
  std::string qubit = "A";
  DistortionExperiment experiment;
  DistortionModel line;
  DistortionFitOptions fit;
};

DistortionModel device_line() {
  DistortionModel m;
  m.components = {{-0.0352, 18.5}, {-0.0115, 143.6}, {-0.0169, 755.1}};
  return m;
}

DistortionOptions parse_distortion(const RunContext& ctx) {
  const Section s = ctx.section("distortion", {"qubit", "z0", "reference_ns", "z_p", "t_p_ns", "dt_ns",
                                               "delays_ns", "line", "fit"});
  DistortionOptions o;
  o.qubit = s.text("qubit", ctx.device.qubits[0].name);
  check_qubit(ctx, s, o.qubit);
  DistortionExperiment& e = o.experiment;
  e.qubit = ctx.device.qubit(o.qubit).params;
  e.z0 = s.number("z0", e.z0);
  e.reference_ns = s.number("reference_ns", e.reference_ns);
  e.z_p = s.number("z_p", e.z_p);
  e.t_p = s.number("t_p_ns", e.t_p);
  e.dt = s.number("dt_ns", e.dt);
  e.delays = s.numbers("delays_ns", {});
  try {
    e.validate();
  } catch (const InvalidArgument& err) {
    throw ConfigError(std::string("distortion: ") + err.what());
  }
  o.line = s.has("line") ? parse_distortion_model(s.raw("line")) : device_line();
  const Section f = s.child("fit", {"requested_components", "max_components", "noise_floor_rad", "selection_ratio"});
  o.fit.requested_components = f.integer("requested_components", o.fit.requested_components, 1);
  o.fit.max_components = f.integer("max_components", o.fit.max_components, o.fit.requested_components);
  o.fit.noise_floor_rad = f.number("noise_floor_rad", o.fit.noise_floor_rad);
  o.fit.selection_ratio = f.number("selection_ratio", o.fit.selection_ratio);
  return o;
}

void cmd_distortion(const RunContext& ctx, OutputSet& files, std::ostream& log) {
  const DistortionOptions o = parse_distortion(ctx);
  const DistortionProbe probe(o.experiment);
  const DistortionMeasurement m = measure_distortion(probe, o.line, o.fit);
  const std::vector<double> model = distortion_phase_model(m.delays, o.experiment.z0, m.sensitivity,
                                                           o.experiment.t_p, m.fit.model);
  const std::vector<double> corrected = probe.phase_shifts(o.line, m.fit.model);
  const double before = phase_error_rms(m.phases);
  const double after = phase_error_rms(corrected);

  Json fit;
  fit["components"] = Json::array();
  for (std::size_t i = 0; i < m.fit.model.components.size(); ++i)
    fit["components"].push_back({{"a", m.fit.model.components[i].amplitude},
                                 {"tau_ns", m.fit.model.components[i].tau},
                                 {"sigma_a", m.fit.sigma_amplitude[i]},
                                 {"sigma_tau_ns", m.fit.sigma_tau[i]}});
  fit["selected_components"] = m.fit.selected_components;
  fit["component_mismatch"] = m.fit.component_mismatch;
  fit["cost_by_order"] = m.fit.cost_by_order;
  fit["rms_rad"] = m.fit.rms;
  Json report;
  report["qubit"] = o.qubit;
  report["sensitivity_GHz_per_phi0"] = m.sensitivity;
  report["injected"] = distortion_model_to_json(o.line);
  report["fit"] = fit;
  report["phase_error_rms_rad"] = {{"uncorrected", before}, {"predistorted", after}};
  report["reduction_factor"] = after > 0 ? Json(before / after) : Json("inf");
  files.add(ctx.out / "distortion_fit.json", dump_json(report));

  CsvTable t;
  t.header = {"t_d_ns", "dphi_rad", "dphi_fit_rad", "dphi_predistorted_rad"};
  for (std::size_t i = 0; i < m.delays.size(); ++i) t.rows.push_back({m.delays[i], m.phases[i], model[i], corrected[i]});
  files.add(ctx.out / "distortion_phases.csv", t.to_string());

  log << "distortion: " << m.fit.selected_components << " components"
      << (m.fit.component_mismatch ? " (differs from the requested count)" : "") << ", fit rms " << fmt(m.fit.rms)
      << " rad, phase error " << fmt(before) << " -> " << fmt(after) << " rad after predistortion\n";
  for (const DistortionComponent& c : m.fit.model.components)
    log << "  a = " << fmt(c.amplitude) << ", tau = " << fmt(c.tau) << " ns\n";
}

using Command = void (*)(const RunContext&, OutputSet&, std::ostream&);

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> m = {
      {"spectrum", cmd_spectrum}, {"fit", cmd_fit},       {"gate", cmd_gate},
      {"rb", cmd_rb},             {"budget", cmd_budget}, {"calibrate", cmd_calibrate},
      {"distortion", cmd_distortion}};
  return m;
}

// Schema checks of every block present, before any computation.
void validate_sections(const RunContext& ctx) {
  if (ctx.config.contains("spectrum")) parse_spectrum(ctx);
  if (ctx.config.contains("fit")) parse_fit(ctx);
  if (ctx.config.contains("gate")) parse_gate(ctx);
  if (ctx.config.contains("rb")) parse_rb(ctx);
  if (ctx.config.contains("budget")) parse_budget(ctx);
  if (ctx.config.contains("calibrate")) parse_calibrate(ctx);
  if (ctx.config.contains("distortion")) parse_distortion(ctx);
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"spectrum", "fit", "gate", "rb", "budget", "calibrate", "distortion"};
  return names;
}

int run_command(const std::string& command, const std::optional<fs::path>& config, const Json& overlay,
                std::ostream& out, std::ostream& err) {
  const auto it = commands().find(command);
  if (it == commands().end()) {
    err << "error: unknown command \"" << command << "\"\n";
    return kExitConfig;
  }
  try {
    const RunContext ctx = make_context(config, overlay);
    validate_sections(ctx);
    OutputSet files;
    it->second(ctx, files, out);
    files.commit();
    for (const auto& f : files.files()) out << "wrote " << f.first.string() << "\n";
    return kExitOk;
  } catch (const MissingCalibration& e) {
    err << "error: " << e.what() << "\n";
    return kExitMissingCalibration;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fluxsim::cli
