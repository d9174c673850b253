// Acceptance checks, one PASS/FAIL line each. Exit status is the number of
// failed checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "cloudchaos/discrepancy.hpp"
#include "cloudchaos/dynamics.hpp"
#include "cloudchaos/failure_sim.hpp"
#include "cloudchaos/replication.hpp"
#include "cloudchaos/storage_ledger.hpp"

using namespace cloudchaos;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const Vec3 kStart(0.01, 0.01, -0.01);

Outcome fixed_points() {
  const auto p = ModelParams::two_user(0.6, 1.25, 1.28);
  const auto origin = find_fixed_points(p, {Vec3::Zero()}).at(0);
  const double claimed = fixed_point_residual(p, claimed_fixed_point(p));
  const Vec3 image = map_point(p, claimed_fixed_point(p));
  const double first = std::abs(image[0] - 1.0);
  return {origin.residual < 1e-12 && std::abs(first - 1.0) < 1e-9 &&
              std::abs(claimed - 1.0) < 1e-9,
          "origin residual " + num(origin.residual) + ", claimed point residual " +
              num(claimed) + " (first component " + num(first) + ")"};
}

Outcome lyapunov_regimes() {
  const auto a = lyapunov_spectrum(ModelParams::two_user(0.96, 0.2, 1.18), kStart, 100000);
  const auto b = lyapunov_spectrum(ModelParams::two_user(0.9, 1.4, 0.8), kStart, 100000);
  const auto c = lyapunov_spectrum(ModelParams::two_user(0.6, 1.28, 1.23), kStart, 100000);
  const bool ok_a = a.exponents[0] < 0.0;
  const bool ok_b = std::abs(b.exponents[0]) <= 0.01;
  const bool ok_c = c.exponents[0] > 0.01;
  return {ok_a && ok_b && ok_c, "max exponents " + num(a.exponents[0]) + ", " +
                                    num(b.exponents[0]) + ", " + num(c.exponents[0])};
}

Outcome analytic_lyapunov() {
  const auto s = lyapunov_spectrum(ModelParams::two_user(0.5, 0.1, 0.1), kStart, 100000);
  const double want[3] = {std::log(0.5), std::log(0.1), std::log(0.1)};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(s.exponents[i] - want[i]));
  return {worst < 1e-2, "max deviation " + num(worst)};
}

Outcome alpha_sweep() {
  BifurcationOptions opt;  // transient 1000, 1e5 tangent iterations per point
  const auto scan = bifurcation_scan(ModelParams::two_user(0.5, 1.28, 1.23),
                                     {SweepParameter::alpha, 0.01, 1.0, 400}, kStart, opt);
  std::size_t diverged = 0, chaotic = 0;
  double last_chaotic = -1.0;
  for (const auto& p : scan.points) {
    if (p.diverged) {
      ++diverged;
      continue;
    }
    if (p.largest_exponent > 0.01) {
      ++chaotic;
      last_chaotic = p.value;
    }
  }
  bool negative_after = false, tail_ordered = true;
  for (const auto& p : scan.points) {
    if (p.diverged || p.value <= last_chaotic) continue;
    if (p.largest_exponent < 0.0) negative_after = true;
  }
  for (const auto& p : scan.points) {
    if (!p.diverged && p.value >= 0.9 && p.largest_exponent > 0.01) tail_ordered = false;
  }
  return {chaotic > 0 && negative_after && tail_ordered,
          std::to_string(chaotic) + " chaotic points up to alpha " + num(last_chaotic) +
              ", negative beyond: " + (negative_after ? "yes" : "no") + ", " +
              std::to_string(diverged) + " divergent points skipped"};
}

Outcome coefficients() {
  const auto c = verify_coefficients();
  const std::array<std::uint64_t, 8> want = {1, 7, 21, 34, 30, 12, 0, 0};
  std::string got;
  for (auto v : c) got += (got.empty() ? "" : ",") + std::to_string(v);
  return {c == want, "counts " + got};
}

Outcome exact_identity() {
  double worst = 0.0;
  for (std::size_t n : {3, 10, 20, 40, 80, 100, 140, 200}) {
    for (double p : {0.01, 0.1}) {
      const double exact = prob_data_loss(n, p, LossMethod::exact_bigint).p_loss;
      const double closed = 1.0 - std::pow(1.0 - std::pow(p, 3) - std::pow(p, 4) +
                                                std::pow(p, 7), static_cast<double>(n));
      const double oracle = prob_data_loss(n, p, LossMethod::closed_form).p_loss;
      worst = std::max({worst, std::abs(exact - oracle) / oracle});
      // The naive expression loses digits to cancellation; it is only a sanity bound.
      if (std::abs(exact - closed) > 1e-9 * closed) worst = 1.0;
    }
  }
  return {worst <= 1e-12, "max relative difference " + num(worst)};
}

Outcome brute_force_n3() {
  double worst = 0.0;
  for (double p : {0.1, 0.3, 0.5}) {
    const double brute = exhaustive_loss(3, p, LossMode::group).p_loss;
    const double exact = prob_data_loss(3, p, LossMethod::exact_bigint).p_loss;
    worst = std::max(worst, std::abs(brute - exact) / exact);
  }
  return {worst <= 1e-12, "2^21 scenarios, max relative difference " + num(worst)};
}

Outcome monte_carlo() {
  const auto a = mc_estimate(10, 0.1, 1000000, 42, LossMode::group, 1);
  const auto b = mc_estimate(10, 0.1, 1000000, 42, LossMode::group, 0);
  const auto c = mc_estimate(10, 0.1, 1000000, 42, LossMode::group, 3);
  const double exact = prob_data_loss(10, 0.1, LossMethod::exact_bigint).p_loss;
  const double sigma = a.half_width_95 / 1.96;
  const bool within = std::abs(a.p_hat - exact) <= 3 * sigma;
  const bool same = a.losses == b.losses && a.losses == c.losses;
  return {within && same, "p_hat " + num(a.p_hat) + " vs exact " + num(exact) +
                              " (" + num(std::abs(a.p_hat - exact) / sigma) +
                              " sigma), worker-independent: " + (same ? "yes" : "no")};
}

Outcome table_three() {
  DiscrepancyOptions opt;
  opt.mc_trials = 10000;
  opt.lyapunov_iterations = 1000;
  const auto report = discrepancy_report(opt);
  const auto& rows = report.at("loss_table").at("rows");
  bool ok = rows.size() == published_loss_table().size();
  double worst = 0.0;
  std::size_t k = 0;
  for (const auto& row : published_loss_table()) {
    const double exact = prob_data_loss(row.n, 0.01, LossMethod::exact_bigint).p_loss;
    const double rel = std::abs(exact - row.p_loss) / row.p_loss;
    worst = std::max(worst, rel);
    ok = ok && rel <= 0.25 && k < rows.size() &&
         rows[k].at("ratio_exact_to_published").get<double>() == exact / row.p_loss;
    ++k;
  }
  return {ok, "7 rows, worst relative deviation " + num(worst) +
                  ", ratios present in report"};
}

Outcome polynomial_sanity() {
  bool ok = true;
  for (std::size_t n = 1; n <= 200; ++n) {
    BigInt sum = 0;
    for (const auto& c : loss_polynomial(n)) sum += c;
    BigInt want;
    mpz_ui_pow_ui(want.get_mpz_t(), 105, n);
    ok = ok && sum == want;
  }
  for (std::size_t n = 3; n <= 20; ++n) {
    ok = ok && prob_no_loss(n, 1) == 1.0 && prob_no_loss(n, 2) == 1.0;
  }
  return {ok, "coefficient sums 105^n for n <= 200, f = 1, 2 lossless for 3 <= n <= 20"};
}

Outcome table_one() {
  const double a = 0.6, x1 = 1.25, x2 = 1.28;
  const auto p = ModelParams::two_user(a, x1, x2);
  const auto s0 = SystemState::two_user(1.0 / a, 0.1 / x1, 0.1 / x2);
  const std::vector<std::size_t> stages = {1, 10, 20, 200, 365};
  const auto rep = allocation_report(p, s0, stages, kMegabyte);
  double v = s0.v_c, u1 = s0.x[0], u2 = s0.x[1];
  std::size_t row = 0;
  bool ok = rep.size() == stages.size();
  for (std::size_t l = 1; l <= 365 && ok; ++l) {
    const double nv = a * v + x1 * u1 - x2 * u2;
    const double n1 = -x1 * u1 * v - x2 * u2;
    const double n2 = x1 * u1 + x2 * u2 * v;
    v = nv;
    u1 = n1;
    u2 = n2;
    if (l == stages[row]) {
      ok = rep[row].stage == l && rep[row].owner_alloc_bytes == a * v * kMegabyte &&
           rep[row].user_alloc_bytes[0].value() == x1 * u1 * kMegabyte &&
           rep[row].user_alloc_bytes[1].value() == x2 * u2 * kMegabyte;
      ++row;
    }
  }
  return {ok && row == stages.size(),
          "5 stages replayed bit-for-bit; published MB values not reproduced"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"fixed-point verification", fixed_points},
      {"lyapunov regimes", lyapunov_regimes},
      {"analytic lyapunov", analytic_lyapunov},
      {"alpha bifurcation sweep", alpha_sweep},
      {"coefficient keystone", coefficients},
      {"exact combinatorics identity", exact_identity},
      {"brute force n=3", brute_force_n3},
      {"monte carlo concordance", monte_carlo},
      {"loss table side-by-side", table_three},
      {"polynomial sanity", polynomial_sanity},
      {"allocation replay", table_one},
  };
  const double budget[] = {1, 60, 60, 300, 60, 60, 120, 600, 600, 600, 60};
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget[i]) {
      o.pass = false;
      o.detail += ", over time budget";
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %-30s %8.3fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                checks[i].first.c_str(), secs, o.detail.c_str());
  }
  std::printf("%zu/%zu passed\n", checks.size() - failed, checks.size());
  return failed;
}
