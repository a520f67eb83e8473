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

#include "run_config.hpp"

#include <cmath>
#include <limits>

#include "fluxsim/device.hpp"

namespace fluxsim::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kTopLevel = {"device", "seed",  "out",    "threads",  "tolerances",
                                            "spectrum", "fit", "gate", "rb", "budget",
                                            "calibrate", "distortion"};

const Json& empty_object() {
  static const Json e = Json::object();
  return e;
}

}  // namespace

Section::Section(const Json* j, std::string where, std::vector<std::string> allowed)
    : j_(j && !j->is_null() ? j : &empty_object()), where_(std::move(where)) {
  require_keys(*j_, allowed, where_);
}

bool Section::has(const std::string& key) const { return j_->contains(key) && !(*j_)[key].is_null(); }

const Json& Section::raw(const std::string& key) const {
  if (!has(key)) fail(key, "missing");
  return (*j_)[key];
}

void Section::fail(const std::string& key, const std::string& message) const {
  throw ConfigError(where_ + "." + key + ": " + message);
}

double Section::number(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  return required_number(key);
}

double Section::required_number(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_number()) fail(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "expected a finite number");
  return x;
}

double Section::time_or_inf(const std::string& key) const {
  const Json& v = raw(key);
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  if (!v.is_number()) fail(key, "expected a number or \"inf\"");
  const double x = v.get<double>();
  if (!(x > 0)) fail(key, "expected a positive time");
  return x;
}

int Section::integer(const std::string& key, int fallback, int min_value) const {
  int x = fallback;
  if (has(key)) {
    const Json& v = raw(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    const long long w = v.get<long long>();
    if (w > std::numeric_limits<int>::max() || w < std::numeric_limits<int>::min()) fail(key, "out of range");
    x = static_cast<int>(w);
  }
  if (x < min_value) fail(key, "must be >= " + std::to_string(min_value));
  return x;
}

bool Section::boolean(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

std::string Section::text(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

std::string Section::choice(const std::string& key, const std::string& fallback,
                            const std::vector<std::string>& options) const {
  const std::string v = text(key, fallback);
  for (const std::string& o : options)
    if (o == v) return v;
  std::string list;
  for (const std::string& o : options) list += (list.empty() ? "" : ", ") + o;
  fail(key, "expected one of " + list);
}

std::vector<double> Section::numbers(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_array()) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const Json& e : v) {
    if (!e.is_number() || !std::isfinite(e.get<double>())) fail(key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<int> Section::integers(const std::string& key, const std::vector<int>& fallback,
                                   int min_value) const {
  std::vector<int> out = fallback;
  if (has(key)) {
    const Json& v = raw(key);
    if (!v.is_array()) fail(key, "expected an array of integers");
    out.clear();
    for (const Json& e : v) {
      if (!e.is_number_integer()) fail(key, "expected an array of integers");
      out.push_back(e.get<int>());
    }
  }
  for (int x : out)
    if (x < min_value) fail(key, "entries must be >= " + std::to_string(min_value));
  return out;
}

std::vector<std::string> Section::texts(const std::string& key,
                                        const std::vector<std::string>& fallback) const {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_array()) fail(key, "expected an array of strings");
  std::vector<std::string> out;
  for (const Json& e : v) {
    if (!e.is_string()) fail(key, "expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Section Section::child(const std::string& key, std::vector<std::string> allowed) const {
  if (has(key) && !raw(key).is_object()) fail(key, "expected an object");
  return Section(has(key) ? &raw(key) : nullptr, where_ + "." + key, std::move(allowed));
}

std::uint64_t RunContext::require_seed(const std::string& command) const {
  if (!seed) throw ConfigError(command + ": a seed is required (--seed N or \"seed\" in the config)");
  return *seed;
}

fs::path RunContext::resolve(const std::string& path) const {
  const fs::path p(path);
  return p.is_absolute() ? p : base / p;
}

Section RunContext::section(const std::string& name, std::vector<std::string> allowed) const {
  if (config.contains(name) && !config[name].is_object()) throw ConfigError(name + ": expected an object");
  return Section(config.contains(name) ? &config[name] : nullptr, name, std::move(allowed));
}

DeviceFile default_device() {
  DeviceFile d;
  d.qubits = {{"A", device_qubit_a()}, {"B", device_qubit_b()}};
  d.jc_ghz = kCalibratedJcGhz;
  return d;
}

void merge_json(Json& base, const Json& overlay) {
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object())
      merge_json(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

RunContext make_context(const std::optional<fs::path>& config_path, const Json& overlay) {
  RunContext ctx;
  ctx.base = fs::current_path();
  if (config_path) {
    ctx.config = load_json(*config_path);
    if (!ctx.config.is_object()) throw ConfigError(config_path->string() + ": expected a JSON object");
    ctx.base = fs::absolute(*config_path).parent_path();
  }
  merge_json(ctx.config, overlay);
  const Section top(&ctx.config, "config", kTopLevel);

  if (top.has("seed")) {
    const Json& s = top.raw("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      top.fail("seed", "expected a non-negative integer");
    ctx.seed = s.get<std::uint64_t>();
  }
  ctx.out = ctx.resolve(top.text("out", "out"));
  ctx.threads = top.integer("threads", 1, 1);
  ctx.device = top.has("device") ? load_device(ctx.resolve(top.text("device", ""))) : default_device();
  if (ctx.device.qubits.size() < 2) throw ConfigError("device: two qubits are required");

  const Section tol = top.child("tolerances", {"rel_tol", "abs_tol", "max_segment_ns"});
  ctx.evolution.rel_tol = tol.number("rel_tol", ctx.evolution.rel_tol);
  ctx.evolution.abs_tol = tol.number("abs_tol", ctx.evolution.abs_tol);
  ctx.evolution.max_segment = tol.number("max_segment_ns", ctx.evolution.max_segment);
  try {
    ctx.evolution.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("tolerances: ") + e.what());
  }
  return ctx;
}

std::vector<double> parse_range(const std::string& spec, const std::string& where) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = spec.find(':', start);
    const std::string cell = spec.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0' || !std::isfinite(v))
      throw ConfigError(where + ": expected lo:hi:step, got \"" + spec + "\"");
    parts.push_back(v);
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3) throw ConfigError(where + ": expected lo:hi:step, got \"" + spec + "\"");
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0) || hi < lo) throw ConfigError(where + ": need step > 0 and hi >= lo");
  const long n = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (n > 100000) throw ConfigError(where + ": too many points");
  std::vector<double> out;
  for (long i = 0; i < n; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

}  // namespace fluxsim::cli
