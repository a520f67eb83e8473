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

#ifndef FLUXSIM_TOOLS_RUN_CONFIG_HPP_
#define FLUXSIM_TOOLS_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fluxsim/evolution.hpp"
#include "fluxsim/io.hpp"

namespace fluxsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitMissingCalibration = 4;

// Typed, key-checked view of one JSON object of the run configuration. A
// missing object behaves like an empty one.
class Section {
 public:
  Section(const Json* j, std::string where, std::vector<std::string> allowed);

  bool has(const std::string& key) const;
  const Json& raw(const std::string& key) const;
  const std::string& where() const { return where_; }

  double number(const std::string& key, double fallback) const;
  double required_number(const std::string& key) const;
  // A number, or the string "inf".
  double time_or_inf(const std::string& key) const;
  int integer(const std::string& key, int fallback, int min_value) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::string choice(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& options) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> integers(const std::string& key, const std::vector<int>& fallback,
                            int min_value) const;
  std::vector<std::string> texts(const std::string& key, const std::vector<std::string>& fallback) const;
  Section child(const std::string& key, std::vector<std::string> allowed) const;

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  const Json* j_;
  std::string where_;
};

// Merged configuration (flags over file) plus the resolved globals.
struct RunContext {
  Json config = Json::object();
  std::filesystem::path base;  // relative paths in the file resolve here
  DeviceFile device;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
  int threads = 1;
  EvolutionOptions evolution;

  std::uint64_t require_seed(const std::string& command) const;
  std::filesystem::path resolve(const std::string& path) const;
  Section section(const std::string& name, std::vector<std::string> allowed) const;
};

// The built-in two-qubit device, used when no device file is configured.
DeviceFile default_device();

// Loads the config file (if any), overlays the flag values and validates the
// top-level schema and the globals.
RunContext make_context(const std::optional<std::filesystem::path>& config_path, const Json& overlay);

// Recursively copies overlay objects onto base.
void merge_json(Json& base, const Json& overlay);

// "lo:hi:step" with step > 0 and hi >= lo, inclusive of hi within 1e-9 step.
std::vector<double> parse_range(const std::string& spec, const std::string& where);

}  // namespace fluxsim::cli

#endif  // FLUXSIM_TOOLS_RUN_CONFIG_HPP_
