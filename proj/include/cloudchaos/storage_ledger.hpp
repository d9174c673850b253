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

// Turns trajectories of the storage map into byte-level allocation reports,
// node sizes, demand rates and chunk-count sequences.

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cloudchaos/model.hpp"

namespace cloudchaos {

/// Decimal storage units.
inline constexpr double kMegabyte = 1e6;
inline constexpr double kGigabyte = 1e9;

/// A user allocation: non-negative magnitude plus the raw sign of xi_i x_i.
struct SignedAmount {
  double magnitude = 0.0;
  bool negative = false;

  double value() const noexcept { return negative ? -magnitude : magnitude; }
  static SignedAmount of(double v) noexcept {
    return {v < 0.0 ? -v : v, std::signbit(v) && v != 0.0};
  }
};

struct AllocationRecord {
  std::size_t stage = 0;
  double owner_alloc_bytes = 0.0;  // alpha * v_c * unit_scale
  std::vector<SignedAmount> user_alloc_bytes;
};

/// Iterates the map once from s0 up to the largest requested stage and
/// samples alpha v_c and xi_i x_i (times unit_scale) at each stage. Stage 0
/// is s0 itself. Stages must be sorted ascending and not below s0.stage.
std::vector<AllocationRecord> allocation_report(
    const ModelParams& params, const SystemState& s0,
    const std::vector<std::size_t>& stages, double unit_scale);

/// q_i = xi_i x_i v_c for every user.
std::vector<double> demand_rate(const ModelParams& params,
                                const SystemState& s);

/// x_user at stage l_lo minus x_user at stage l_hi (user is 0-based).
/// Throws std::out_of_range when a stage is not stored in traj or
/// l_lo > l_hi.
double traffic_split(const Trajectory& traj, std::size_t user,
                     std::size_t l_lo, std::size_t l_hi);

struct NodeSeries {
  std::size_t user = 0;
  std::size_t first_stage = 0;
  std::vector<double> values;  // xi_user * x_user per stored stage
};

NodeSeries node_series(const Trajectory& traj, std::size_t user);

struct ChunkSeries {
  double c0 = 0.0;
  std::vector<double> values;  // values[0] == c0
};

/// c(l+1) = c(l) - c(l) v_c(l); one more entry than v_series.
ChunkSeries chunk_sequence(double c0, const std::vector<double>& v_series);

/// Display rounding for chunk counts; halves round toward +infinity.
long long round_half_up(double v);

}  // namespace cloudchaos
