// Copyright 2026 The cloudchaos Authors.
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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cloudchaos {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitDivergence = 2,
  kExitIo = 3,
};

/// Environment variable naming the directory that relative --out paths are
/// resolved against.
inline constexpr const char* kOutputDirEnv = "CLOUDCHAOS_OUTPUT_DIR";

/// Entry point behind the `cloudchaos` binary. args excludes the program
/// name. Documents go to --out when given, otherwise to `out`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace cloudchaos
