#include <cmath>
#include <random>

#include "cloudchaos/errors.hpp"
#include "cloudchaos/model.hpp"
#include "doctest.h"

using namespace cloudchaos;

TEST_CASE("step_general: origin is fixed") {
  const ModelParams p(0.5, {1.0, 1.0});
  const auto next = step_general(p, SystemState{0, 0.0, {0.0, 0.0}});
  CHECK(next.stage == 1);
  CHECK(next.v_c == 0.0);
  CHECK(next.x == std::vector<double>{0.0, 0.0});
}

TEST_CASE("step_general: zero demands decay v geometrically") {
  const ModelParams p(0.7, {0.2, 0.3});
  const auto next = step_general(p, SystemState{0, 2.0, {0.0, 0.0}});
  CHECK(next.v_c == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(next.x[0] == 0.0);
  CHECK(next.x[1] == 0.0);
}

TEST_CASE("step_general: hand evaluation for two users") {
  // v' = 0.5*1 + 1*0.5 - 1*0.25, x1' = -0.5*1 - 0.25, x2' = 0.25*1 + 0.5
  const ModelParams p(0.5, {1.0, 1.0});
  const auto next = step_general(p, SystemState{3, 1.0, {0.5, 0.25}});
  CHECK(next.stage == 4);
  CHECK(next.v_c == 0.75);
  CHECK(next.x[0] == -0.75);
  CHECK(next.x[1] == 0.75);
}

TEST_CASE("step_general: three users follow the alternating signs") {
  // weighted = (-0.2*1, +0.3*2, -0.5*(-1)) = (-0.2, 0.6, 0.5), sum 0.9
  const ModelParams p(0.8, {0.2, 0.3, 0.5});
  const auto next = step_general(p, SystemState{0, 1.0, {1.0, 2.0, -1.0}});
  CHECK(next.v_c == doctest::Approx(0.8 - 0.9));
  CHECK(next.x[0] == doctest::Approx(-0.2 - (0.6 + 0.5)));
  CHECK(next.x[1] == doctest::Approx(0.6 - (-0.2 + 0.5)));
  CHECK(next.x[2] == doctest::Approx(0.5 - (-0.2 + 0.6)));
}

TEST_CASE("step_two_user: published initial condition") {
  const auto p = ModelParams::two_user(0.96, 0.2, 1.18);
  const auto next = step_two_user(p, SystemState::two_user(0.01, 0.01, -0.01));
  CHECK(next.v_c == doctest::Approx(0.0234).epsilon(1e-12));
  CHECK(next.x[0] == doctest::Approx(0.01178).epsilon(1e-12));
  CHECK(next.x[1] == doctest::Approx(0.001882).epsilon(1e-12));

  const auto q = ModelParams::two_user(0.5, 1.0, 1.0);
  const auto n2 = step_two_user(q, SystemState::two_user(1.0, 0.5, 0.25));
  CHECK(n2.v_c == 0.75);
  CHECK(n2.x[0] == -0.75);
  CHECK(n2.x[1] == 0.75);

  const auto z = step_two_user(p, SystemState::two_user(0, 0, 0));
  CHECK(z.v_c == 0.0);
  CHECK(z.x[0] == 0.0);
  CHECK(z.x[1] == 0.0);
}

TEST_CASE("step_two_user rejects other user counts") {
  const ModelParams p(0.5, {0.1, 0.2, 0.3});
  CHECK_THROWS_AS(step_two_user(p, SystemState{0, 0, {0, 0, 0}}),
                  std::invalid_argument);
}

TEST_CASE("general and two-user updates agree bit for bit on a random grid") {
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> a(0.001, 1.0), s(0.0, 3.0),
      u(-5.0, 5.0);
  for (int k = 0; k < 20000; ++k) {
    const auto p = ModelParams::two_user(a(gen), s(gen), s(gen));
    const auto st = SystemState::two_user(u(gen), u(gen), u(gen));
    const auto g = step_general(p, st);
    const auto t = step_two_user(p, st);
    REQUIRE(g == t);
  }
}

TEST_CASE("divergence is reported with the stage index") {
  const auto p = ModelParams::two_user(1.0, 3.0, 3.0);
  try {
    iterate(p, SystemState::two_user(10, 10, -10), 1000);
    FAIL("expected Divergence");
  } catch (const Divergence& d) {
    CHECK(d.stage() >= 1);
    CHECK(d.stage() < 1000);
  }
  CHECK_THROWS_AS(step_general(p, SystemState::two_user(NAN, 0, 0)), Divergence);
  CHECK_THROWS_AS(step_two_user(p, SystemState::two_user(2e12, 0, 0)),
                  Divergence);
}

TEST_CASE("iterate: origin stays put and transient is dropped") {
  const auto p = ModelParams::two_user(0.5, 1, 1);
  const auto traj = iterate(p, SystemState::two_user(0, 0, 0), 100);
  REQUIRE(traj.states.size() == 100);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    CHECK(traj.states[k].stage == k + 1);
    CHECK(traj.states[k].v_c == 0.0);
  }
  const auto cut = iterate(p, SystemState::two_user(0, 0, 0), 100, 40);
  CHECK(cut.states.size() == 60);
  CHECK(cut.states.front().stage == 41);
  CHECK_THROWS_AS(iterate(p, SystemState::two_user(0, 0, 0), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(iterate(p, SystemState::two_user(0, 0, 0), 10, 10),
                  std::invalid_argument);
}

TEST_CASE("iterate: with zero demands v decays as alpha^l exactly") {
  const auto p = ModelParams::two_user(0.5, 0.7, 0.3);
  const auto traj = iterate(p, SystemState::two_user(1, 0, 0), 30);
  double expected = 1.0;
  for (const auto& s : traj.states) {
    expected *= 0.5;
    CHECK(s.v_c == expected);
  }
  CHECK(traj.states[0].v_c == 0.5);
  CHECK(traj.states[1].v_c == 0.25);
  CHECK(traj.states[2].v_c == 0.125);
}

TEST_CASE("iterate: chaotic parameters give a bounded non-repeating orbit") {
  const auto p = ModelParams::two_user(0.6, 1.28, 1.23);
  const auto traj = iterate(p, SystemState::two_user(0.01, 0.01, -0.01), 10000);
  double peak = 0.0;
  for (const auto& s : traj.states) {
    peak = std::max({peak, std::abs(s.v_c), std::abs(s.x[0]), std::abs(s.x[1])});
  }
  CHECK(peak < 10.0);
  // No state of the last 1000 repeats the final one.
  const auto& last = traj.states.back();
  for (std::size_t k = traj.states.size() - 1000; k + 1 < traj.states.size(); ++k) {
    CHECK_FALSE(traj.states[k].v_c == last.v_c);
  }
}

TEST_CASE("trajectories replay bit for bit") {
  const auto p = ModelParams::two_user(0.6, 1.28, 1.23);
  auto traj = iterate(p, SystemState::two_user(0.01, 0.01, -0.01), 500, 100);
  CHECK(replay_consistent(traj));
  traj.states[200].x[1] = std::nextafter(traj.states[200].x[1], 1.0);
  CHECK_FALSE(replay_consistent(traj));

  const ModelParams three(0.4, {0.1, 0.2, 0.3});
  CHECK(replay_consistent(iterate(three, SystemState{0, 0.5, {0.1, -0.2, 0.3}}, 50)));
}

TEST_CASE("check_constraint reports every clause") {
  const ModelParams p(0.8, {0.3, 0.5}, 1.0);
  const auto ok = check_constraint(p, SystemState{0, 1.0, {1.0, 1.0}});
  CHECK(ok.weighted_demand == doctest::Approx(0.2));
  CHECK(ok.demand_positive);
  CHECK(ok.demand_within_owner);
  CHECK(ok.owner_within_capacity);
  CHECK(ok.holds());

  const auto zero = check_constraint(p, SystemState{0, 1.0, {0.0, 0.0}});
  CHECK_FALSE(zero.demand_positive);
  CHECK_FALSE(zero.holds());

  const auto neg = check_constraint(p, SystemState{0, 1.0, {2.0, 0.0}});
  CHECK(neg.weighted_demand == doctest::Approx(-0.6));
  CHECK_FALSE(neg.holds());

  const ModelParams small(0.8, {0.3, 0.5}, 0.5);
  const auto over = check_constraint(small, SystemState{0, 1.0, {1.0, 1.0}});
  CHECK(over.demand_within_owner);
  CHECK_FALSE(over.owner_within_capacity);
}

TEST_CASE("ModelParams validation") {
  CHECK_THROWS_AS(ModelParams(0.0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(1.1, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(0.5, {-0.1, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(0.5, {}), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(0.5, {1.0}, 0.0), std::invalid_argument);
  CHECK_NOTHROW(ModelParams(1.0, {0.0, 0.0}));

  // (-1)^i convention: -xi1 + xi2 - xi3
  const ModelParams p(0.5, {0.2, 1.5, 0.1});
  CHECK(p.alternating_xi_sum() == doctest::Approx(1.2));
  CHECK_FALSE(p.alternating_sum_within_bound());
  CHECK(ModelParams::two_user(0.96, 0.2, 1.18).alternating_sum_within_bound());
}
