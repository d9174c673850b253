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

#include "cloudchaos/failure_sim.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace cloudchaos {

namespace {

// SplitMix64 (Steele, Lea, Flood 2014). Each trial gets its own stream by
// hashing (seed, trial) into the starting state.
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t trial)
      : state_(mix(seed ^ mix(trial + 0x632BE59BD9B4E019ULL))) {}

  std::uint64_t next() noexcept { return mix(state_ += 0x9E3779B97F4A7C15ULL); }

  /// Bernoulli(p) from the top 53 bits; exact 0 and 1 for p in {0, 1}.
  bool bernoulli(double p) noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53 < p;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

struct HostSets {
  std::vector<std::vector<std::size_t>> sets;  // one per (node, half)
};

HostSets host_sets(const PlacementPlan& plan) {
  HostSets h;
  for (std::size_t node = 1; node <= plan.n; ++node) {
    h.sets.push_back(plan.hosts_of(node, Half::a));
    h.sets.push_back(plan.hosts_of(node, Half::b));
  }
  return h;
}

bool structural_lossy(const HostSets& hosts, const std::vector<char>& failed) {
  for (const auto& set : hosts.sets) {
    if (std::all_of(set.begin(), set.end(),
                    [&](std::size_t id) { return failed[id] != 0; })) {
      return true;
    }
  }
  return false;
}

bool group_lossy(std::size_t n, const std::vector<char>& failed) {
  for (std::size_t g = 0; g < n; ++g) {
    GroupMask mask = 0;
    for (std::size_t k = 0; k < kMachinesPerGroup; ++k) {
      if (failed[g * kMachinesPerGroup + k]) mask |= GroupMask(1u << k);
    }
    if (group_fatal(mask)) return true;
  }
  return false;
}

}  // namespace

bool group_fatal(std::span<const int> local_ids) {
  GroupMask mask = 0;
  for (int id : local_ids) {
    if (id < 0 || id >= static_cast<int>(kMachinesPerGroup)) {
      throw std::invalid_argument("local machine id must be in 0..6");
    }
    mask |= GroupMask(1u << id);
  }
  return group_fatal(mask);
}

std::array<std::uint64_t, 8> verify_coefficients() {
  std::array<std::uint64_t, 8> counts{};
  for (unsigned mask = 0; mask < (1u << kMachinesPerGroup); ++mask) {
    if (!group_fatal(static_cast<GroupMask>(mask))) {
      ++counts[std::popcount(mask)];
    }
  }
  return counts;
}

FailureScenario::FailureScenario(std::size_t n, std::vector<std::size_t> failed)
    : n_(n), failed_(std::move(failed)) {
  if (n_ < 1) throw std::invalid_argument("scenario needs n >= 1");
  std::vector<char> seen(machines(), 0);
  for (std::size_t id : failed_) {
    if (id >= machines()) throw std::invalid_argument("machine id out of range");
    if (seen[id]) throw std::invalid_argument("duplicate machine id");
    seen[id] = 1;
  }
}

std::string to_string(LossMode m) {
  return m == LossMode::group ? "group" : "structural";
}

std::optional<LossMode> parse_loss_mode(const std::string& name) {
  if (name == "group") return LossMode::group;
  if (name == "structural") return LossMode::structural;
  return std::nullopt;
}

bool scenario_loss(const FailureScenario& scenario, const PlacementPlan& plan) {
  if (plan.n != scenario.n()) {
    throw std::invalid_argument("placement and scenario node counts differ");
  }
  std::vector<char> failed(scenario.machines(), 0);
  for (std::size_t id : scenario.failed()) failed[id] = 1;
  return structural_lossy(host_sets(plan), failed);
}

bool scenario_loss(const FailureScenario& scenario, LossMode mode) {
  if (mode == LossMode::structural) {
    return scenario_loss(scenario, build_placement(scenario.n()));
  }
  std::vector<char> failed(scenario.machines(), 0);
  for (std::size_t id : scenario.failed()) failed[id] = 1;
  return group_lossy(scenario.n(), failed);
}

McEstimate mc_estimate(std::size_t n, double p, std::uint64_t trials,
                       std::uint64_t seed, LossMode mode, unsigned workers) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0,1]");
  if (n < 1) throw std::invalid_argument("n must be >= 1");

  HostSets hosts;
  if (mode == LossMode::structural) hosts = host_sets(build_placement(n));
  const std::size_t machines = kMachinesPerGroup * n;

  constexpr std::uint64_t kChunk = 4096;
  const std::size_t chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
  std::vector<std::uint64_t> losses(chunks, 0);
  detail::parallel_for(chunks, workers, [&](std::size_t c) {
    std::vector<char> failed(machines);
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min<std::uint64_t>(trials, begin + kChunk);
    std::uint64_t count = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      TrialStream rng(seed, t);
      for (std::size_t m = 0; m < machines; ++m) failed[m] = rng.bernoulli(p);
      const bool lossy = mode == LossMode::group ? group_lossy(n, failed)
                                                 : structural_lossy(hosts, failed);
      count += lossy ? 1 : 0;
    }
    losses[c] = count;
  });

  McEstimate est;
  est.trials = trials;
  est.seed = seed;
  est.mode = mode;
  for (std::uint64_t l : losses) est.losses += l;
  est.p_hat = static_cast<double>(est.losses) / static_cast<double>(trials);
  est.half_width_95 =
      1.96 * std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(trials));
  return est;
}

ExhaustiveResult exhaustive_loss(std::size_t n, double p, LossMode mode) {
  if (n < 1 || n > 3) {
    throw std::invalid_argument("exhaustive enumeration supports 1 <= n <= 3");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0,1]");
  const std::size_t machines = kMachinesPerGroup * n;

  // Bitmask per (node, half) for the structural predicate.
  std::vector<std::uint32_t> host_masks;
  if (mode == LossMode::structural) {
    for (const auto& set : host_sets(build_placement(n)).sets) {
      std::uint32_t m = 0;
      for (std::size_t id : set) m |= 1u << id;
      host_masks.push_back(m);
    }
  }

  ExhaustiveResult res;
  res.fatal_by_size.assign(machines + 1, 0);
  const std::uint32_t total = 1u << machines;
  for (std::uint32_t s = 0; s < total; ++s) {
    bool lossy = false;
    if (mode == LossMode::group) {
      for (std::size_t g = 0; g < n && !lossy; ++g) {
        lossy = group_fatal(static_cast<GroupMask>((s >> (7 * g)) & 0x7F));
      }
    } else {
      for (std::uint32_t m : host_masks) {
        if ((s & m) == m) {
          lossy = true;
          break;
        }
      }
    }
    if (lossy) ++res.fatal_by_size[std::popcount(s)];
  }
  for (std::size_t f = 0; f <= machines; ++f) {
    if (res.fatal_by_size[f] == 0) continue;
    res.p_loss += static_cast<double>(res.fatal_by_size[f]) * std::pow(p, f) *
                  std::pow(1.0 - p, machines - f);
  }
  return res;
}

}  // namespace cloudchaos
