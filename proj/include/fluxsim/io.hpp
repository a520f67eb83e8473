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

#ifndef FLUXSIM_IO_HPP_
#define FLUXSIM_IO_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fluxsim/calibration.hpp"
#include "fluxsim/gates.hpp"
#include "fluxsim/hamiltonian.hpp"
#include "fluxsim/pulses.hpp"
#include "fluxsim/rb.hpp"

namespace fluxsim {

using Json = nlohmann::ordered_json;

// Input that fails schema or syntax checks.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// 12 significant digits, shortest form ("%.12g").
std::string format_number(double x);
// x rounded to 12 significant digits; non-finite values throw NumericalError.
double round12(double x);
// Pretty JSON (two-space indent, trailing newline) with every number rounded
// to 12 significant digits.
std::string dump_json(const Json& j);
Json parse_json(const std::string& text, const std::string& what);
Json load_json(const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string to_string() const;
};

CsvTable parse_csv(const std::string& text);

// Write to a sibling temporary file, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Files staged in memory and written together at commit; nothing touches the
// disk before commit.
class OutputSet {
 public:
  void add(const std::filesystem::path& path, std::string content);
  void commit() const;
  const std::vector<std::pair<std::filesystem::path, std::string>>& files() const { return files_; }

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

// Rejects keys of `j` outside `allowed`; `where` names the object in messages.
void require_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& where);

struct DeviceQubit {
  std::string name;
  FluxoniumParams params;
};

struct DeviceFile {
  std::vector<DeviceQubit> qubits;
  double jc_ghz = 0.0;

  const DeviceQubit& qubit(const std::string& name) const;
  CoupledSystem system(int n_levels = 8) const;  // first two qubits
};

DeviceFile parse_device(const Json& j);
DeviceFile load_device(const std::filesystem::path& path);
Json device_to_json(const DeviceFile& device);

DistortionModel parse_distortion_model(const Json& j);
Json distortion_model_to_json(const DistortionModel& model);

// U as row-major [re, im] pairs, leakage, fidelity, vz_angles.
Json gate_report_to_json(const GateReport& report);

std::string rb_csv(const RBResult& result);
Json rb_fit_to_json(const RBFit& fit);
Json circuit_to_json(const std::vector<TimedOp>& ops);

// SOURCE_DATE_EPOCH as ISO-8601 UTC, or the epoch itself when unset.
std::string calibration_timestamp();

struct CalibrationEntry {
  double value = 0.0;
  double uncertainty = 0.0;
  std::string timestamp;
};

// Parameter name -> entry, serialized in name order.
class CalibrationStore {
 public:
  void set(const std::string& name, double value, double uncertainty, const std::string& timestamp);
  void set(const CalibrationReport& report, const std::string& timestamp);
  bool has(const std::string& name) const { return entries_.count(name) != 0; }
  // Throws MissingCalibration.
  const CalibrationEntry& get(const std::string& name) const;
  double value(const std::string& name) const { return get(name).value; }
  const std::map<std::string, CalibrationEntry>& entries() const { return entries_; }

  Json to_json() const;
  static CalibrationStore from_json(const Json& j);
  // Throws MissingCalibration when the file does not exist.
  static CalibrationStore load(const std::filesystem::path& path);

 private:
  std::map<std::string, CalibrationEntry> entries_;
};

}  // namespace fluxsim

#endif  // FLUXSIM_IO_HPP_
