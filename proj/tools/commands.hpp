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

#ifndef FLUXSIM_TOOLS_COMMANDS_HPP_
#define FLUXSIM_TOOLS_COMMANDS_HPP_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fluxsim/io.hpp"

namespace fluxsim::cli {

const std::vector<std::string>& command_names();

// Runs one subcommand with the config file (optional) and the flag overlay,
// commits its outputs only on success and returns the process exit code.
int run_command(const std::string& command, const std::optional<std::filesystem::path>& config,
                const Json& overlay, std::ostream& out, std::ostream& err);

}  // namespace fluxsim::cli

#endif  // FLUXSIM_TOOLS_COMMANDS_HPP_
