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

// Brute-force and Monte Carlo oracles for the data-loss model. Nothing in
// here uses the generating polynomial; it works from the fatal-set predicate
// and the placement only.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cloudchaos/replication.hpp"

namespace cloudchaos {

/// Local machine ids within a group of 7: 0-3 owner rack, 4-6 user rack.
/// Bit k of the mask is set when local machine k failed.
using GroupMask = std::uint8_t;

inline constexpr GroupMask kOwnerMask = 0b0001111;
inline constexpr GroupMask kUserMask = 0b1110000;

/// Reconstructed fatal-set predicate: a group loses data iff all four
/// owner-rack machines or all three user-rack machines failed. This is the
/// only monotone family whose non-fatal counts by size are
/// (1, 7, 21, 34, 30, 12, 0, 0).
constexpr bool group_fatal(GroupMask failed) noexcept {
  return (failed & kOwnerMask) == kOwnerMask ||
         (failed & kUserMask) == kUserMask;
}

/// Same predicate from a list of local ids; throws on ids outside 0..6.
bool group_fatal(std::span<const int> local_ids);
inline bool group_fatal(std::initializer_list<int> local_ids) {
  return group_fatal(std::span<const int>(local_ids.begin(), local_ids.size()));
}

/// Non-fatal subset counts by size, from all 2^7 subsets.
std::array<std::uint64_t, 8> verify_coefficients();

class FailureScenario {
 public:
  /// Throws std::invalid_argument on duplicate or out-of-range ids.
  FailureScenario(std::size_t n, std::vector<std::size_t> failed);

  std::size_t n() const noexcept { return n_; }
  const std::vector<std::size_t>& failed() const noexcept { return failed_; }
  std::size_t machines() const noexcept { return kMachinesPerGroup * n_; }

 private:
  std::size_t n_;
  std::vector<std::size_t> failed_;
};

enum class LossMode { group, structural };

std::string to_string(LossMode m);
std::optional<LossMode> parse_loss_mode(const std::string& name);

/// group: machines 7i..7i+6 form group i and any fatal group loses data.
/// structural: loss iff some (node, half) has every hosting machine failed
/// under build_placement(n).
bool scenario_loss(const FailureScenario& scenario, LossMode mode);
bool scenario_loss(const FailureScenario& scenario, const PlacementPlan& plan);

struct McEstimate {
  double p_hat = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t losses = 0;
  double half_width_95 = 0.0;  // 1.96 sqrt(p_hat (1 - p_hat) / trials)
  std::uint64_t seed = 0;
  LossMode mode = LossMode::group;
};

/// Fails each of the 7n machines independently with probability p in every
/// trial. Trial t draws from its own stream keyed by (seed, t), so the
/// estimate is independent of the worker count.
McEstimate mc_estimate(std::size_t n, double p, std::uint64_t trials,
                       std::uint64_t seed, LossMode mode, unsigned workers = 0);

struct ExhaustiveResult {
  std::vector<std::uint64_t> fatal_by_size;  // index f
  double p_loss = 0.0;
};

/// Enumerates all 2^(7n) failure sets (n <= 3) and sums p^f (1-p)^(7n-f)
/// over the lossy ones.
ExhaustiveResult exhaustive_loss(std::size_t n, double p, LossMode mode);

}  // namespace cloudchaos
