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

// Discrete owner/user storage map: one owner capacity variable v_c and n
// user demand variables x_i, advanced stage by stage.

#pragma once

#include <cstddef>
#include <vector>

namespace cloudchaos {

/// Any state component with magnitude above this is treated as divergent.
inline constexpr double kDivergenceBound = 1e12;

/// Scaling parameters of the map. Construction rejects alpha outside (0, 1],
/// negative xi and non-positive v_max; the alternating-sum bound on xi is
/// only reported (see alternating_sum_within_bound).
class ModelParams {
 public:
  ModelParams(double alpha, std::vector<double> xi, double v_max = 1.0);

  static ModelParams two_user(double alpha, double xi1, double xi2,
                              double v_max = 1.0) {
    return ModelParams(alpha, {xi1, xi2}, v_max);
  }

  double alpha() const noexcept { return alpha_; }
  const std::vector<double>& xi() const noexcept { return xi_; }
  double xi(std::size_t user) const { return xi_.at(user); }
  double v_max() const noexcept { return v_max_; }
  std::size_t users() const noexcept { return xi_.size(); }

  /// sum_i (-1)^i xi_i with users numbered from 1.
  double alternating_xi_sum() const noexcept;
  bool alternating_sum_within_bound() const noexcept {
    return alternating_xi_sum() <= 1.0;
  }

  ModelParams with_alpha(double alpha) const {
    return ModelParams(alpha, xi_, v_max_);
  }
  ModelParams with_xi(std::size_t user, double value) const;

 private:
  double alpha_;
  std::vector<double> xi_;
  double v_max_;
};

struct SystemState {
  std::size_t stage = 0;
  double v_c = 0.0;
  std::vector<double> x;

  static SystemState two_user(double v_c, double x1, double x2,
                              std::size_t stage = 0) {
    return SystemState{stage, v_c, {x1, x2}};
  }

  bool finite() const noexcept;
  bool within_bound() const noexcept;
  friend bool operator==(const SystemState&, const SystemState&) = default;
};

struct Trajectory {
  ModelParams params;
  std::vector<SystemState> states;
};

/// Sign (-1)^i for a 1-based user index.
constexpr double alternating_sign(std::size_t one_based) noexcept {
  return one_based % 2 == 0 ? 1.0 : -1.0;
}

/// The n=2 update written out. step_general reproduces it bit for bit.
struct TwoUserValues {
  double v_c, x1, x2;
};
inline TwoUserValues two_user_update(double alpha, double xi1, double xi2,
                                     double v, double x1, double x2) noexcept {
  return {alpha * v + xi1 * x1 - xi2 * x2,  //
          -xi1 * x1 * v - xi2 * x2,         //
          xi1 * x1 + xi2 * x2 * v};
}

/// One stage of the n-user map. Throws Divergence carrying the new stage.
SystemState step_general(const ModelParams& params, const SystemState& s);

/// One stage of the two-user map. Requires exactly two users.
SystemState step_two_user(const ModelParams& params, const SystemState& s);

/// Applies the map `steps` times from s0 and returns the produced states
/// (stages s0.stage+1 .. s0.stage+steps) minus the first `transient` of them.
Trajectory iterate(const ModelParams& params, const SystemState& s0,
                   std::size_t steps, std::size_t transient = 0);

/// True when every stored state is the image of its predecessor.
bool replay_consistent(const Trajectory& traj);

struct ConstraintReport {
  double weighted_demand = 0.0;  // sum_i (-1)^i xi_i x_i
  double owner_allocation = 0.0; // alpha * v_c
  bool demand_positive = false;
  bool demand_within_owner = false;
  bool owner_within_capacity = false;

  bool holds() const noexcept {
    return demand_positive && demand_within_owner && owner_within_capacity;
  }
};

/// Evaluates 0 < sum_i (-1)^i xi_i x_i <= alpha v_c <= v_max clause by clause.
ConstraintReport check_constraint(const ModelParams& params,
                                  const SystemState& s);

}  // namespace cloudchaos
