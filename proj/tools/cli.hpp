// Copyright 2026 The rainfx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rainfx/config.hpp"

namespace rainfx::cli {

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kUsageError = 2 };

/// Config sources for one invocation: defaults, then the file, then overrides.
struct RunConfig {
  std::string subcommand;
  std::filesystem::path config_path;
  std::vector<std::string> overrides;
  int verbosity = 1;
  std::vector<std::filesystem::path> outputs;

  [[nodiscard]] EffectiveConfig resolve() const;
};

/// Runs the command line; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rainfx::cli
