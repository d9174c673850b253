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

#include "cloudchaos/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cloudchaos/errors.hpp"

namespace cloudchaos {

ModelParams::ModelParams(double alpha, std::vector<double> xi, double v_max)
    : alpha_(alpha), xi_(std::move(xi)), v_max_(v_max) {
  if (!(alpha_ > 0.0 && alpha_ <= 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1], got " +
                                std::to_string(alpha_));
  }
  if (xi_.empty()) throw std::invalid_argument("at least one user required");
  for (double v : xi_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("xi must be finite and >= 0");
    }
  }
  if (!(v_max_ > 0.0)) throw std::invalid_argument("v_max must be > 0");
}

double ModelParams::alternating_xi_sum() const noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < xi_.size(); ++i) {
    sum += alternating_sign(i + 1) * xi_[i];
  }
  return sum;
}

ModelParams ModelParams::with_xi(std::size_t user, double value) const {
  auto xi = xi_;
  xi.at(user) = value;
  return ModelParams(alpha_, std::move(xi), v_max_);
}

bool SystemState::finite() const noexcept {
  if (!std::isfinite(v_c)) return false;
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool SystemState::within_bound() const noexcept {
  if (!finite() || std::abs(v_c) > kDivergenceBound) return false;
  for (double v : x) {
    if (std::abs(v) > kDivergenceBound) return false;
  }
  return true;
}

namespace {

void require_users(const ModelParams& params, const SystemState& s) {
  if (s.x.size() != params.users()) {
    throw std::invalid_argument("state has " + std::to_string(s.x.size()) +
                                " demands but params have " +
                                std::to_string(params.users()) + " users");
  }
}

}  // namespace

SystemState step_general(const ModelParams& params, const SystemState& s) {
  require_users(params, s);
  if (!s.finite()) throw Divergence(s.stage);
  const std::size_t n = params.users();

  // signed[i] = (-1)^(i+1) xi_i x_i
  std::vector<double> weighted(n);
  for (std::size_t i = 0; i < n; ++i) {
    weighted[i] = alternating_sign(i + 1) * (params.xi(i) * s.x[i]);
  }

  SystemState next{s.stage + 1, params.alpha() * s.v_c, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) next.v_c -= weighted[i];
  for (std::size_t i = 0; i < n; ++i) {
    double xi_next = alternating_sign(i + 1) * (params.xi(i) * s.x[i] * s.v_c);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) xi_next -= weighted[j];
    }
    next.x[i] = xi_next;
  }
  if (!next.within_bound()) throw Divergence(next.stage);
  return next;
}

SystemState step_two_user(const ModelParams& params, const SystemState& s) {
  if (params.users() != 2) {
    throw std::invalid_argument("step_two_user needs exactly two users");
  }
  require_users(params, s);
  if (!s.finite()) throw Divergence(s.stage);
  const auto [v, x1, x2] = two_user_update(params.alpha(), params.xi(0),
                                           params.xi(1), s.v_c, s.x[0], s.x[1]);
  SystemState next{s.stage + 1, v, {x1, x2}};
  if (!next.within_bound()) throw Divergence(next.stage);
  return next;
}

Trajectory iterate(const ModelParams& params, const SystemState& s0,
                   std::size_t steps, std::size_t transient) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (transient >= steps) {
    throw std::invalid_argument("transient must be smaller than steps");
  }
  const bool two = params.users() == 2;
  Trajectory traj{params, {}};
  traj.states.reserve(steps - transient);
  SystemState cur = s0;
  for (std::size_t k = 0; k < steps; ++k) {
    cur = two ? step_two_user(params, cur) : step_general(params, cur);
    if (k >= transient) traj.states.push_back(cur);
  }
  return traj;
}

bool replay_consistent(const Trajectory& traj) {
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    if (step_general(traj.params, traj.states[k - 1]) != traj.states[k]) {
      return false;
    }
  }
  return true;
}

ConstraintReport check_constraint(const ModelParams& params,
                                  const SystemState& s) {
  require_users(params, s);
  ConstraintReport r;
  for (std::size_t i = 0; i < params.users(); ++i) {
    r.weighted_demand += alternating_sign(i + 1) * params.xi(i) * s.x[i];
  }
  r.owner_allocation = params.alpha() * s.v_c;
  r.demand_positive = r.weighted_demand > 0.0;
  r.demand_within_owner = r.weighted_demand <= r.owner_allocation;
  r.owner_within_capacity = r.owner_allocation <= params.v_max();
  return r;
}

}  // namespace cloudchaos
