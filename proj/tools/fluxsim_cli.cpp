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

#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "run_config.hpp"

namespace {

namespace fs = std::filesystem;
using fluxsim::Json;

// Flag values that land in the config overlay at `path` when given.
class Overlay {
 public:
  template <class T>
  CLI::Option* value(CLI::App* app, const std::string& flag, std::vector<std::string> path, const std::string& help) {
    auto v = std::make_shared<T>();
    CLI::Option* o = app->add_option(flag, *v, help);
    setters_.push_back([o, v, path](Json& j) {
      if (o->count()) node(j, path) = *v;
    });
    return o;
  }

  CLI::Option* file(CLI::App* app, const std::string& flag, std::vector<std::string> path, const std::string& help) {
    auto v = std::make_shared<std::string>();
    CLI::Option* o = app->add_option(flag, *v, help);
    setters_.push_back([o, v, path](Json& j) {
      if (o->count()) node(j, path) = fs::absolute(*v).string();
    });
    return o;
  }

  CLI::Option* flag(CLI::App* app, const std::string& flag, std::vector<std::string> path, bool value,
                    const std::string& help) {
    CLI::Option* o = app->add_flag(flag, help);
    setters_.push_back([o, value, path](Json& j) {
      if (o->count()) node(j, path) = value;
    });
    return o;
  }

  Json build() const {
    Json j = Json::object();
    for (const auto& s : setters_) s(j);
    return j;
  }

 private:
  static Json& node(Json& j, const std::vector<std::string>& path) {
    Json* n = &j;
    for (const std::string& k : path) n = &(*n)[k];
    return *n;
  }

  std::vector<std::function<void(Json&)>> setters_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fluxsim: fluxonium spectra, gates, randomized benchmarking, budgets and calibrations"};
  app.require_subcommand(1);
  app.fallthrough();
  Overlay overlay;
  std::string config;
  app.add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
  overlay.value<std::uint64_t>(&app, "--seed", {"seed"}, "random seed");
  overlay.file(&app, "--out", {"out"}, "output directory");
  overlay.value<int>(&app, "--threads", {"threads"}, "worker threads");
  overlay.file(&app, "--device", {"device"}, "device parameter file");

  auto* spectrum = app.add_subcommand("spectrum", "transition frequencies versus external flux");
  overlay.value<double>(spectrum, "--phi-min", {"spectrum", "phi_min"}, "first flux point (Phi0)");
  overlay.value<double>(spectrum, "--phi-max", {"spectrum", "phi_max"}, "last flux point (Phi0)");
  overlay.value<int>(spectrum, "--points", {"spectrum", "points"}, "number of flux points");
  overlay.value<std::vector<std::string>>(spectrum, "--qubit", {"spectrum", "qubits"}, "qubit names");

  auto* fit = app.add_subcommand("fit", "fit circuit energies to a measured or synthetic spectrum");
  overlay.file(fit, "--data", {"fit", "data"}, "CSV phi_ext,transition,freq_GHz");
  overlay.value<std::string>(fit, "--qubit", {"fit", "qubit"}, "qubit name");
  overlay.value<double>(fit, "--noise-mhz", {"fit", "noise_MHz"}, "synthetic noise (MHz)");

  auto* gate = app.add_subcommand("gate", "simulate a calibrated single-qubit gate or iSWAP");
  overlay.value<std::string>(gate, "--kind", {"gate", "kind"}, "single or iswap");
  overlay.value<std::string>(gate, "--qubit", {"gate", "qubit"}, "driven qubit (single)");
  overlay.value<std::string>(gate, "--target", {"gate", "target"}, "x_pi or x_pi2 (single)");
  overlay.value<double>(gate, "--duration", {"gate", "duration_ns"}, "gate length (ns)");
  overlay.flag(gate, "--autocalibrate", {"gate", "autocalibrate"}, true, "calibrate before simulating");
  overlay.value<std::string>(gate, "--duration-scan", {"gate", "duration_scan"}, "lo:hi:step in ns");
  overlay.file(gate, "--calibration", {"gate", "calibration"}, "calibration store");

  auto* rb = app.add_subcommand("rb", "randomized benchmarking under a noise model");
  overlay.value<int>(rb, "--qubits", {"rb", "qubits"}, "1 or 2");
  overlay.value<std::vector<int>>(rb, "--m", {"rb", "m"}, "sequence lengths")->delimiter(',');
  overlay.value<int>(rb, "--k", {"rb", "k"}, "sequences per length");
  overlay.value<std::string>(rb, "--interleave", {"rb", "interleave"}, "gate to interleave");

  auto* budget = app.add_subcommand("budget", "iSWAP decoherence error budget");
  overlay.value<double>(budget, "--t-g", {"budget", "t_g_ns"}, "gate length (ns)");

  auto* calibrate = app.add_subcommand("calibrate", "closed-loop calibrations; writes the calibration store");
  overlay.value<std::vector<std::string>>(calibrate, "--qubit", {"calibrate", "qubits"}, "qubits to calibrate");
  overlay.value<double>(calibrate, "--duration", {"calibrate", "duration_ns"}, "single-qubit pulse length (ns)");
  overlay.file(calibrate, "--store", {"calibrate", "store"}, "calibration store path");
  overlay.flag(calibrate, "--skip-iswap", {"calibrate", "iswap"}, false, "skip the iSWAP loop");
  overlay.flag(calibrate, "--skip-zz", {"calibrate", "zz"}, false, "skip the ZZ measurement");

  auto* distortion = app.add_subcommand("distortion", "measure and fit flux-line distortion");
  overlay.value<std::string>(distortion, "--qubit", {"distortion", "qubit"}, "probed qubit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fluxsim::cli::kExitConfig;
  }

  std::optional<fs::path> config_path;
  if (!config.empty()) config_path = config;
  const std::string command = app.get_subcommands().front()->get_name();
  return fluxsim::cli::run_command(command, config_path, overlay.build(), std::cout, std::cerr);
}
