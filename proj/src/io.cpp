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

#include "fluxsim/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace fluxsim {

std::string format_number(double x) {
  if (!std::isfinite(x)) throw NumericalError("format_number: non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) { return x == 0.0 ? 0.0 : std::strtod(format_number(x).c_str(), nullptr); }

namespace {

Json rounded(const Json& j) {
  if (j.is_number_float()) return round12(j.get<double>());
  if (j.is_array()) {
    Json out = Json::array();
    for (const Json& v : j) out.push_back(rounded(v));
    return out;
  }
  if (j.is_object()) {
    Json out = Json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = rounded(it.value());
    return out;
  }
  return j;
}

double number_field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
  if (!j[key].is_number()) throw ConfigError(where + ": \"" + key + "\" must be a number");
  return j[key].get<double>();
}

}  // namespace

std::string dump_json(const Json& j) { return rounded(j).dump(2) + "\n"; }

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(what + ": malformed JSON: " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json load_json(const std::filesystem::path& path) { return parse_json(read_file(path), path.string()); }

std::string CsvTable::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw InvalidArgument("CsvTable: row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_number(row[i]);
    s += "\n";
  }
  return s;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = cells;
      first = false;
      continue;
    }
    if (cells.size() != t.header.size()) throw ConfigError("CSV: row width differs from header");
    std::vector<double> row;
    for (const std::string& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0') throw ConfigError("CSV: not a number: " + c);
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (first) throw ConfigError("CSV: empty input");
  return t;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void OutputSet::add(const std::filesystem::path& path, std::string content) {
  files_.emplace_back(path, std::move(content));
}

void OutputSet::commit() const {
  for (const auto& [path, content] : files_) write_file_atomic(path, content);
}

void require_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const std::string& a : allowed) ok = ok || a == it.key();
    if (!ok) throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
  }
}

const DeviceQubit& DeviceFile::qubit(const std::string& name) const {
  for (const DeviceQubit& q : qubits)
    if (q.name == name) return q;
  throw ConfigError("device: no qubit named \"" + name + "\"");
}

CoupledSystem DeviceFile::system(int n_levels) const {
  if (qubits.size() < 2) throw ConfigError("device: two qubits required");
  CoupledSystem s;
  s.qubit_a = qubits[0].params;
  s.qubit_b = qubits[1].params;
  s.jc = jc_ghz;
  s.n_levels_each = n_levels;
  return s;
}

DeviceFile parse_device(const Json& j) {
  require_keys(j, {"qubits", "JC_GHz"}, "device");
  if (!j.contains("qubits") || !j["qubits"].is_array() || j["qubits"].empty())
    throw ConfigError("device: \"qubits\" must be a non-empty array");
  DeviceFile d;
  d.jc_ghz = j.contains("JC_GHz") ? number_field(j, "JC_GHz", "device") : 0.0;
  for (const Json& q : j["qubits"]) {
    require_keys(q, {"name", "EC_GHz", "EL_GHz", "EJ_GHz", "phi_ext"}, "device qubit");
    if (!q.contains("name") || !q["name"].is_string()) throw ConfigError("device qubit: \"name\" must be a string");
    DeviceQubit dq;
    dq.name = q["name"].get<std::string>();
    dq.params.ec = number_field(q, "EC_GHz", "device qubit " + dq.name);
    dq.params.el = number_field(q, "EL_GHz", "device qubit " + dq.name);
    dq.params.ej = number_field(q, "EJ_GHz", "device qubit " + dq.name);
    dq.params.phi_ext = q.contains("phi_ext") ? number_field(q, "phi_ext", "device qubit " + dq.name) : 0.5;
    try {
      dq.params.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError("device qubit " + dq.name + ": " + e.what());
    }
    for (const DeviceQubit& other : d.qubits)
      if (other.name == dq.name) throw ConfigError("device: duplicate qubit name " + dq.name);
    d.qubits.push_back(dq);
  }
  if (!std::isfinite(d.jc_ghz) || d.jc_ghz < 0) throw ConfigError("device: JC_GHz must be >= 0");
  return d;
}

DeviceFile load_device(const std::filesystem::path& path) { return parse_device(load_json(path)); }

Json device_to_json(const DeviceFile& device) {
  Json j;
  j["qubits"] = Json::array();
  for (const DeviceQubit& q : device.qubits)
    j["qubits"].push_back({{"name", q.name},
                           {"EC_GHz", q.params.ec},
                           {"EL_GHz", q.params.el},
                           {"EJ_GHz", q.params.ej},
                           {"phi_ext", q.params.phi_ext}});
  j["JC_GHz"] = device.jc_ghz;
  return j;
}

DistortionModel parse_distortion_model(const Json& j) {
  require_keys(j, {"components"}, "distortion model");
  if (!j.contains("components") || !j["components"].is_array())
    throw ConfigError("distortion model: \"components\" must be an array");
  DistortionModel m;
  for (const Json& c : j["components"]) {
    require_keys(c, {"a", "tau_ns"}, "distortion component");
    m.components.push_back({number_field(c, "a", "distortion component"),
                            number_field(c, "tau_ns", "distortion component")});
  }
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("distortion model: ") + e.what());
  }
  return m;
}

Json distortion_model_to_json(const DistortionModel& model) {
  Json j;
  j["components"] = Json::array();
  for (const DistortionComponent& c : model.components)
    j["components"].push_back({{"a", c.amplitude}, {"tau_ns", c.tau}});
  return j;
}

Json gate_report_to_json(const GateReport& report) {
  Json u = Json::array();
  for (int r = 0; r < report.u.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < report.u.cols(); ++c) row.push_back({report.u(r, c).real(), report.u(r, c).imag()});
    u.push_back(row);
  }
  Json j;
  j["U"] = u;
  j["leakage"] = report.leakage;
  j["fidelity"] = report.fidelity;
  j["vz_angles"] = {report.vz_angles[0], report.vz_angles[1], report.vz_angles[2], report.vz_angles[3]};
  j["converged"] = report.converged;
  return j;
}

std::string rb_csv(const RBResult& result) {
  CsvTable t;
  t.header = {"m", "mean_fidelity", "std"};
  for (std::size_t i = 0; i < result.m_values.size(); ++i)
    t.rows.push_back({double(result.m_values[i]), result.mean[i], result.std[i]});
  return t.to_string();
}

Json rb_fit_to_json(const RBFit& fit) {
  Json j;
  j["A"] = fit.a;
  j["B"] = fit.b;
  j["p"] = fit.p;
  j["sigma_A"] = fit.sigma_a;
  j["sigma_B"] = fit.sigma_b;
  j["sigma_p"] = fit.sigma_p;
  j["cost"] = fit.cost;
  j["converged"] = fit.converged;
  j["near_boundary"] = fit.near_boundary;
  return j;
}

Json circuit_to_json(const std::vector<TimedOp>& ops) {
  Json j = Json::array();
  for (const TimedOp& t : ops) {
    Json qubits = t.op.gate == Primitive::kIswap ? Json{0, 1} : Json{t.op.qubit};
    j.push_back({{"gate", primitive_name(t.op.gate)}, {"qubits", qubits}, {"t_start_ns", t.t_start_ns}});
  }
  return j;
}

std::string calibration_timestamp() {
  long long epoch = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    char* end = nullptr;
    epoch = std::strtoll(env, &end, 10);
    if (*end != '\0' || epoch < 0) throw ConfigError("SOURCE_DATE_EPOCH must be a non-negative integer");
  }
  const std::time_t t = static_cast<std::time_t>(epoch);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void CalibrationStore::set(const std::string& name, double value, double uncertainty,
                           const std::string& timestamp) {
  if (name.empty()) throw InvalidArgument("CalibrationStore: empty parameter name");
  if (!std::isfinite(value) || !std::isfinite(uncertainty))
    throw NumericalError("CalibrationStore: non-finite value for " + name);
  entries_[name] = {value, uncertainty, timestamp};
}

void CalibrationStore::set(const CalibrationReport& report, const std::string& timestamp) {
  set(report.name, report.value, report.uncertainty, timestamp);
}

const CalibrationEntry& CalibrationStore::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end())
    throw MissingCalibration("calibration entry \"" + name + "\" is missing; run `fluxsim calibrate`");
  return it->second;
}

Json CalibrationStore::to_json() const {
  Json j = Json::object();
  for (const auto& [name, e] : entries_)
    j[name] = {{"value", e.value}, {"uncertainty", e.uncertainty}, {"timestamp", e.timestamp}};
  return j;
}

CalibrationStore CalibrationStore::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("calibration store: expected an object");
  CalibrationStore s;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& e = it.value();
    require_keys(e, {"value", "uncertainty", "timestamp"}, "calibration entry " + it.key());
    if (!e.contains("timestamp") || !e["timestamp"].is_string())
      throw ConfigError("calibration entry " + it.key() + ": \"timestamp\" must be a string");
    s.set(it.key(), number_field(e, "value", it.key()), number_field(e, "uncertainty", it.key()),
          e["timestamp"].get<std::string>());
  }
  return s;
}

CalibrationStore CalibrationStore::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw MissingCalibration("calibration store " + path.string() +
                             " not found; run `fluxsim calibrate` or pass --autocalibrate");
  return from_json(load_json(path));
}

}  // namespace fluxsim
