#include <stdexcept>
#include <cmath>
#include <set>

#include "cloudchaos/errors.hpp"
#include "cloudchaos/failure_sim.hpp"
#include "cloudchaos/replication.hpp"
#include "doctest.h"

using namespace cloudchaos;

TEST_CASE("placement for three nodes") {
  const auto plan = build_placement(3);
  CHECK(plan.machines.size() == 21);
  using K = ReplicaKind;
  const std::array<std::array<ReplicaRef, 3>, 3> owner = {{
      {{{K::primary, 1}, {K::secondary1, 2}, {K::secondary2, 3}}},
      {{{K::primary, 2}, {K::secondary1, 3}, {K::secondary2, 1}}},
      {{{K::primary, 3}, {K::secondary1, 1}, {K::secondary2, 2}}},
  }};
  const std::array<std::array<ReplicaRef, 3>, 3> user = {{
      {{{K::secondary1, 1}, {K::secondary2, 2}, {K::secondary1, 3}}},
      {{{K::secondary1, 2}, {K::secondary2, 3}, {K::secondary1, 1}}},
      {{{K::secondary1, 3}, {K::secondary2, 1}, {K::secondary1, 2}}},
  }};
  REQUIRE(plan.owner_blocks.size() == 3);
  REQUIRE(plan.user_blocks.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(plan.owner_blocks[i].members == owner[i]);
    CHECK(plan.user_blocks[i].members == user[i]);
    CHECK(plan.owner_blocks[i].machine_ids.size() == 4);
    CHECK(plan.user_blocks[i].machine_ids.size() == 3);
  }
  CHECK(plan.owner_blocks[0].members[1].label() == "S1_2");
  CHECK(plan.owner_blocks[0].members[0].label() == "P_1");
}

TEST_CASE("placement sizes and errors") {
  CHECK(build_placement(10).machines.size() == 70);
  CHECK_THROWS_AS(build_placement(2), TooFewNodes);
  CHECK_THROWS_AS(build_placement(0), TooFewNodes);
}

TEST_CASE("placement: every machine id appears once, every half has four hosts") {
  for (std::size_t n : {3u, 4u, 7u, 20u}) {
    const auto plan = build_placement(n);
    std::set<std::size_t> ids;
    for (const auto& m : plan.machines) ids.insert(m.id);
    CHECK(ids.size() == 7 * n);
    CHECK(*ids.rbegin() == 7 * n - 1);
    for (std::size_t node = 1; node <= n; ++node) {
      for (Half h : {Half::a, Half::b}) {
        const auto hosts = plan.hosts_of(node, h);
        // One primary machine plus the copies in the two racks.
        CHECK(hosts.size() >= 2);
        for (auto id : hosts) {
          CHECK(plan.machines[id].node == node);
          CHECK(plan.machines[id].half == h);
        }
      }
    }
  }
}

TEST_CASE("render_plan_text") {
  const auto text = render_plan_text(build_placement(3));
  CHECK(text.find("owner 1 P_1,S1_2,S2_3 0,1,2,3\n") != std::string::npos);
  CHECK(text.find("user 1 S1_1,S2_2,S1_3 4,5,6\n") != std::string::npos);
}

TEST_CASE("base polynomial and binomials") {
  CHECK(base_polynomial() == std::array<std::uint64_t, 6>{1, 7, 21, 34, 30, 12});
  const auto brute = verify_coefficients();
  for (std::size_t f = 0; f < 6; ++f) CHECK(base_polynomial()[f] == brute[f]);
  CHECK(binomial(21, 3) == 1330);
  CHECK(binomial(5, 7) == 0);
  CHECK(binomial(1400, 0) == 1);
}

TEST_CASE("loss polynomial") {
  const auto one = loss_polynomial(1);
  CHECK(one == std::vector<BigInt>{1, 7, 21, 34, 30, 12});
  const auto three = loss_polynomial(3);
  REQUIRE(three.size() == 16);
  CHECK(three[2] == 210);
  CHECK(three[3] == 1327);
  for (std::size_t n : {1u, 2u, 3u, 10u, 40u}) {
    const auto c = loss_polynomial(n);
    CHECK(c.size() == 5 * n + 1);
    BigInt sum = 0;
    for (const auto& v : c) sum += v;
    BigInt expect;
    mpz_ui_pow_ui(expect.get_mpz_t(), 105, n);
    CHECK(sum == expect);
    for (std::size_t f = 0; f < c.size(); ++f) CHECK(c[f] <= binomial(7 * n, f));
  }
}

TEST_CASE("loss polynomial agrees with brute-force enumeration for n = 2") {
  // Count non-fatal subsets of 14 machines grouped in pairs of 7.
  std::vector<long> count(11, 0);
  for (unsigned m = 0; m < (1u << 14); ++m) {
    if (group_fatal(static_cast<GroupMask>(m & 0x7f)) ||
        group_fatal(static_cast<GroupMask>(m >> 7))) {
      continue;
    }
    ++count[static_cast<std::size_t>(__builtin_popcount(m))];
  }
  const auto c = loss_polynomial(2);
  for (std::size_t f = 0; f < c.size(); ++f) CHECK(c[f] == count[f]);
}

TEST_CASE("prob_no_loss") {
  for (std::size_t n : {1u, 3u, 10u, 200u}) CHECK(prob_no_loss(n, 1) == 1.0);
  CHECK(prob_no_loss(3, 2) == 1.0);
  CHECK(no_loss_fraction(3, 3) == BigRational(1327, 1330));
  CHECK(prob_no_loss(3, 3) == doctest::Approx(0.997744).epsilon(1e-6));
  CHECK(prob_no_loss(3, 16) == 0.0);
  CHECK_THROWS_AS(prob_no_loss(3, 22), std::out_of_range);
}

TEST_CASE("prob_f_failures") {
  CHECK(prob_f_failures(5, 0, 0.0) == 1.0);
  CHECK(prob_f_failures(5, 3, 0.0) == 0.0);
  CHECK(prob_f_failures(3, 0, 0.5) == std::ldexp(1.0, -21));
  CHECK(prob_f_failures(3, 21, 1.0) == 1.0);
  double total = 0.0;
  for (std::size_t f = 0; f <= 70; ++f) total += prob_f_failures(10, f, 0.3);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(prob_f_failures(3, 0, 1.5), std::invalid_argument);
}

TEST_CASE("prob_data_loss boundaries") {
  for (auto m : {LossMethod::exact_bigint, LossMethod::log_domain, LossMethod::closed_form}) {
    for (std::size_t n : {1u, 3u, 10u, 200u}) {
      CHECK(prob_data_loss(n, 0.0, m).p_loss == 0.0);
      CHECK(prob_data_loss(n, 1.0, m).p_loss == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  CHECK(prob_data_loss(10, 1.0, LossMethod::exact_bigint).p_loss == 1.0);
}

TEST_CASE("prob_data_loss methods agree and match the exhaustive sum") {
  for (double p : {1e-4, 0.001, 0.01, 0.05, 0.1, 0.3, 0.7}) {
    const double oracle = exhaustive_loss(2, p, LossMode::group).p_loss;
    const double exact = prob_data_loss(2, p, LossMethod::exact_bigint).p_loss;
    CHECK(exact == doctest::Approx(oracle).epsilon(1e-12));
    for (std::size_t n : {1u, 5u, 10u, 100u, 200u}) {
      const double e = prob_data_loss(n, p, LossMethod::exact_bigint).p_loss;
      const double cf = prob_data_loss(n, p, LossMethod::closed_form).p_loss;
      const double lg = prob_data_loss(n, p, LossMethod::log_domain).p_loss;
      CHECK(std::abs(e - cf) <= 1e-12 * e);
      CHECK(std::abs(e - lg) <= 1e-10 * e);
    }
  }
}

TEST_CASE("prob_data_loss per-f terms") {
  const auto r = prob_data_loss(10, 0.01, LossMethod::exact_bigint, true);
  REQUIRE(r.per_f_terms.size() == 71);
  CHECK(r.per_f_terms[0] == 0.0);
  CHECK(r.per_f_terms[1] == 0.0);
  CHECK(r.per_f_terms[2] == 0.0);
  CHECK(r.per_f_terms[3] > 0.0);
  double sum = 0.0;
  for (double t : r.per_f_terms) sum += t;
  CHECK(sum == doctest::Approx(r.p_loss).epsilon(1e-14));
}

TEST_CASE("prob_data_loss is monotone in p") {
  for (std::size_t n : {3u, 10u, 100u}) {
    double prev = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double cur = prob_data_loss(n, k / 100.0, LossMethod::exact_bigint).p_loss;
      CHECK(cur >= prev);
      prev = cur;
    }
  }
}

TEST_CASE("loss method names") {
  for (auto m : {LossMethod::exact_bigint, LossMethod::log_domain, LossMethod::closed_form}) {
    CHECK(parse_loss_method(to_string(m)) == m);
  }
  CHECK_FALSE(parse_loss_method("guess").has_value());
}

TEST_CASE("loss_curve") {
  const std::vector<std::size_t> ns = {10, 20, 40, 80, 100, 140, 200};
  const auto rows = loss_curve(ns, 0.01);
  REQUIRE(rows.size() == 7);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].n == ns[k]);
    if (k > 0) CHECK(rows[k].p_loss_exact > rows[k - 1].p_loss_exact);
    // Small-p expansion: roughly n (p^3 + p^4).
    const double lin = static_cast<double>(ns[k]) * (1e-6 + 1e-8);
    CHECK(rows[k].p_loss_exact == doctest::Approx(lin).epsilon(0.01));
  }
  const auto single = loss_curve({10}, 0.01);
  CHECK(single[0].p_loss_exact == prob_data_loss(10, 0.01, LossMethod::exact_bigint).p_loss);
  for (const auto& r : loss_curve(ns, 0.0)) CHECK(r.p_loss_exact == 0.0);
  CHECK_THROWS_AS(loss_curve({}, 0.01), std::invalid_argument);
}
