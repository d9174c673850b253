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

#include "cloudchaos/storage_ledger.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cloudchaos {

std::vector<AllocationRecord> allocation_report(
    const ModelParams& params, const SystemState& s0,
    const std::vector<std::size_t>& stages, double unit_scale) {
  if (!std::is_sorted(stages.begin(), stages.end())) {
    throw std::invalid_argument("stages must be sorted ascending");
  }
  if (!stages.empty() && stages.front() < s0.stage) {
    throw std::invalid_argument("stage precedes the initial state");
  }
  std::vector<AllocationRecord> out;
  out.reserve(stages.size());
  auto record = [&](const SystemState& s) {
    AllocationRecord r{s.stage, params.alpha() * s.v_c * unit_scale, {}};
    r.user_alloc_bytes.reserve(s.x.size());
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      r.user_alloc_bytes.push_back(
          SignedAmount::of(params.xi(i) * s.x[i] * unit_scale));
    }
    out.push_back(std::move(r));
  };

  SystemState cur = s0;
  for (std::size_t target : stages) {
    while (cur.stage < target) {
      cur = params.users() == 2 ? step_two_user(params, cur)
                                : step_general(params, cur);
    }
    record(cur);
  }
  return out;
}

std::vector<double> demand_rate(const ModelParams& params,
                                const SystemState& s) {
  if (s.x.size() != params.users()) {
    throw std::invalid_argument("state/params user count mismatch");
  }
  std::vector<double> q(s.x.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = params.xi(i) * s.x[i] * s.v_c;
  }
  return q;
}

namespace {

const SystemState& state_at(const Trajectory& traj, std::size_t stage) {
  if (traj.states.empty()) throw std::out_of_range("empty trajectory");
  const std::size_t first = traj.states.front().stage;
  if (stage < first || stage - first >= traj.states.size()) {
    throw std::out_of_range("stage " + std::to_string(stage) +
                            " not in trajectory");
  }
  return traj.states[stage - first];
}

}  // namespace

double traffic_split(const Trajectory& traj, std::size_t user,
                     std::size_t l_lo, std::size_t l_hi) {
  if (l_lo > l_hi) throw std::out_of_range("l_lo must not exceed l_hi");
  const SystemState& lo = state_at(traj, l_lo);
  const SystemState& hi = state_at(traj, l_hi);
  return lo.x.at(user) - hi.x.at(user);
}

NodeSeries node_series(const Trajectory& traj, std::size_t user) {
  NodeSeries s{user, traj.states.empty() ? 0 : traj.states.front().stage, {}};
  const double xi = traj.params.xi(user);
  s.values.reserve(traj.states.size());
  for (const auto& st : traj.states) s.values.push_back(xi * st.x.at(user));
  return s;
}

ChunkSeries chunk_sequence(double c0, const std::vector<double>& v_series) {
  if (!(c0 > 0.0)) throw std::invalid_argument("c0 must be > 0");
  ChunkSeries s{c0, {}};
  s.values.reserve(v_series.size() + 1);
  s.values.push_back(c0);
  for (double v : v_series) {
    const double c = s.values.back();
    s.values.push_back(c - c * v);
  }
  return s;
}

long long round_half_up(double v) {
  return static_cast<long long>(std::floor(v + 0.5));
}

}  // namespace cloudchaos
