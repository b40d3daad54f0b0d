// Copyright 2026 The nnkgraph Authors.
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


#ifndef NNK_CLI_HPP
#define NNK_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace nnk {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,  // bad flags or config file, invalid arguments
  kExitData = 2,    // unreadable or malformed input
  kExitSolver = 3,  // numerical failure
  kExitViolations = 4,  // verify found violations
};

/// Runs the tool on argv-style arguments (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace nnk

#endif  // NNK_CLI_HPP
