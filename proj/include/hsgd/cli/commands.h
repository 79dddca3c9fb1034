// Copyright 2026 The hsgd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HSGD_CLI_COMMANDS_H_
#define HSGD_CLI_COMMANDS_H_

#include <ostream>
#include <string>
#include <vector>

namespace hsgd::cli {

struct CliOptions {
  std::string command;
  std::string config_path;
  std::string out_dir;   // overrides [output] directory when set
  std::string strategy;  // overrides [release] strategy when set
  int threads = 1;
  bool dump_divergences = false;
  bool empirical_covariance = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Runs one subcommand; progress goes to `log`. Returns the exit code.
int RunCommand(const CliOptions& options, std::ostream& log);

// Parses argv (subcommand plus flags) and runs it.
int RunCli(int argc, char** argv);

// Names of the available subcommands.
const std::vector<std::string>& CommandNames();

}  // namespace hsgd::cli

#endif  // HSGD_CLI_COMMANDS_H_
