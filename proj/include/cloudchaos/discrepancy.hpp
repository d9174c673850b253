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

// Side-by-side comparison of published claims about the storage map and the
// replication scheme against what this library computes.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cloudchaos {

/// Published loss probabilities at p = 0.01, by node count.
struct PublishedLossRow {
  std::size_t n;
  double p_loss;
};
const std::vector<PublishedLossRow>& published_loss_table();

/// Published per-stage allocations (megabytes) at alpha=0.6, xi=(1.25, 1.28).
struct PublishedAllocationRow {
  std::size_t stage;
  double owner_mb, user1_mb, user2_mb;
};
const std::vector<PublishedAllocationRow>& published_allocation_table();

struct DiscrepancyOptions {
  std::uint64_t mc_trials = 1000000;
  std::uint64_t seed = 42;
  std::size_t lyapunov_iterations = 100000;
  unsigned workers = 0;
};

nlohmann::json discrepancy_report(const DiscrepancyOptions& options);

/// Markdown rendering of a discrepancy_report document.
std::string render_discrepancy_markdown(const nlohmann::json& report);

}  // namespace cloudchaos
