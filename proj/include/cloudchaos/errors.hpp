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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cloudchaos {

/// Thrown when an iterate leaves the representable region (any component
/// magnitude above kDivergenceBound, or a non-finite value).
class Divergence : public std::runtime_error {
 public:
  explicit Divergence(std::size_t stage)
      : std::runtime_error("orbit diverged at stage " + std::to_string(stage)),
        stage_(stage) {}

  std::size_t stage() const noexcept { return stage_; }

 private:
  std::size_t stage_;
};

class SingularParameters : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class TooFewNodes : public std::invalid_argument {
 public:
  explicit TooFewNodes(std::size_t n)
      : std::invalid_argument("placement needs at least 3 nodes, got " +
                              std::to_string(n)) {}
};

}  // namespace cloudchaos
