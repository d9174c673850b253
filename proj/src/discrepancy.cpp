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

#include "cloudchaos/discrepancy.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "cloudchaos/dynamics.hpp"
#include "cloudchaos/failure_sim.hpp"
#include "cloudchaos/model.hpp"
#include "cloudchaos/replication.hpp"
#include "cloudchaos/storage_ledger.hpp"

namespace cloudchaos {

using nlohmann::json;

const std::vector<PublishedLossRow>& published_loss_table() {
  static const std::vector<PublishedLossRow> rows = {
      {10, 0.12120e-4}, {20, 0.22220e-4},  {40, 0.42419e-4}, {80, 0.82817e-4},
      {100, 1.0301e-4}, {140, 1.4341e-4},  {200, 2.04e-4},
  };
  return rows;
}

const std::vector<PublishedAllocationRow>& published_allocation_table() {
  static const std::vector<PublishedAllocationRow> rows = {
      {1, 480, 12.29, 13},       {10, 369, 103, 102.76},
      {20, 3500, 1160, 1169},    {200, 10450, 1730, 5030},
      {365, 7070, 4020, 123.5},
  };
  return rows;
}

namespace {

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json fixed_point_section() {
  const auto params = ModelParams::two_user(0.6, 1.25, 1.28);
  const Vec3 claimed = claimed_fixed_point(params);
  const Vec3 image = map_point(params, claimed);
  const auto newton = find_fixed_points(params, {Vec3::Zero(), claimed});
  json seeds = json::array();
  for (const auto& r : newton) {
    seeds.push_back({{"seed", vec_json(r.seed)},
                     {"point", vec_json(r.point)},
                     {"residual", r.residual},
                     {"converged", r.converged}});
  }
  return {
      {"params", {{"alpha", 0.6}, {"xi1", 1.25}, {"xi2", 1.28}}},
      {"origin_residual", fixed_point_residual(params, Vec3::Zero())},
      {"claimed_point", vec_json(claimed)},
      {"claimed_point_image", vec_json(image)},
      {"claimed_point_residual", fixed_point_residual(params, claimed)},
      {"claimed_point_residual_components", vec_json(image - claimed)},
      {"newton_from_seeds", seeds},
      {"verdict", "the claimed second fixed point does not satisfy F(X) = X"},
  };
}

json sign_convention_section() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0), a(0.01, 1.0),
      s(0.0, 2.0);
  double max_diff = 0.0;
  std::size_t checked = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto params = ModelParams::two_user(a(gen), s(gen), s(gen));
    const auto st = SystemState::two_user(u(gen), u(gen), u(gen));
    const auto g = step_general(params, st);
    const auto t = step_two_user(params, st);
    max_diff = std::max({max_diff, std::abs(g.v_c - t.v_c),
                         std::abs(g.x[0] - t.x[0]), std::abs(g.x[1] - t.x[1])});
    ++checked;
  }
  return {{"random_points", checked},
          {"max_abs_difference_general_vs_two_user", max_diff},
          {"verdict", max_diff == 0.0
                          ? "n-user update with (-1)^i signs reduces exactly to "
                            "the two-user form"
                          : "n-user and two-user updates differ"}};
}

json routh_section() {
  std::size_t grid_points = 0, p_and_q_positive = 0, routh_stable = 0,
              window_true = 0, window_and_stable = 0;
  for (int ia = 1; ia <= 100; ++ia) {
    const double alpha = ia / 100.0;
    for (int i1 = 0; i1 <= 40; ++i1) {
      for (int i2 = 0; i2 <= 40; ++i2) {
        const double xi1 = i1 * 0.05, xi2 = i2 * 0.05;
        const auto c = characteristic_coeffs(alpha, xi1, xi2);
        ++grid_points;
        if (c.P > 0 && c.Q > 0) ++p_and_q_positive;
        const bool stable = routh_classify(c) == RouthVerdict::stable;
        if (stable) ++routh_stable;
        const bool window =
            claimed_stability_window(ModelParams::two_user(alpha, xi1, xi2));
        if (window) ++window_true;
        if (window && stable) ++window_and_stable;
      }
    }
  }
  return {{"grid", "alpha in 0.01..1.00 step 0.01, xi1, xi2 in 0..2 step 0.05"},
          {"grid_points", grid_points},
          {"points_with_P_and_Q_positive", p_and_q_positive},
          {"routh_stable_points", routh_stable},
          {"claimed_window_points", window_true},
          {"claimed_window_and_routh_stable", window_and_stable},
          {"verdict",
           "P > 0 needs xi1 > alpha + xi2 while Q > 0 needs xi2 > xi1; the "
           "Routh-stable region is empty and the quoted window is not implied "
           "by it"}};
}

json hopf_section() {
  std::size_t pairs = 0, admissible = 0;
  json examples = json::array();
  for (int i1 = 1; i1 <= 200; ++i1) {
    for (int i2 = 1; i2 <= 200; ++i2) {
      if (i1 == i2) continue;
      const double xi1 = i1 / 100.0, xi2 = i2 / 100.0;
      const double a = hopf_alpha(xi1, xi2);
      ++pairs;
      if (a > 0.0 && a <= 1.0) {
        ++admissible;
        if (examples.size() < 5) {
          examples.push_back({{"xi1", xi1}, {"xi2", xi2}, {"alpha", a}});
        }
      }
    }
  }
  return {{"grid", "xi1, xi2 in 0.01..2.00 step 0.01, xi1 != xi2"},
          {"pairs", pairs},
          {"pairs_with_alpha_in_0_1", admissible},
          {"reference_counterexample",
           {{"xi1", 0.51}, {"xi2", 0.01}, {"alpha", hopf_alpha(0.51, 0.01)}}},
          {"examples", examples},
          {"verdict", admissible > 0
                          ? "PQ = R is reachable with alpha in (0, 1]; the "
                            "blanket |alpha| > 1 claim does not hold"
                          : "no admissible alpha found on the grid"}};
}

json lyapunov_section(const DiscrepancyOptions& opt) {
  struct Case {
    const char* figure;
    double alpha, xi1, xi2;
    const char* expected;
  };
  const Case cases[] = {
      {"periodic", 0.96, 0.2, 1.18, "all exponents negative"},
      {"torus", 0.9, 1.4, 0.8, "largest exponent near zero, others negative"},
      {"chaos", 0.6, 1.28, 1.23, "largest exponent positive"},
  };
  const Vec3 s0(0.01, 0.01, -0.01);
  json rows = json::array();
  for (const Case& c : cases) {
    const auto params = ModelParams::two_user(c.alpha, c.xi1, c.xi2);
    const auto spec = lyapunov_spectrum(params, s0, opt.lyapunov_iterations);
    rows.push_back({{"regime", c.figure},
                    {"alpha", c.alpha},
                    {"xi1", c.xi1},
                    {"xi2", c.xi2},
                    {"exponents", spec.exponents},
                    {"classification", to_string(classify_attractor(spec))},
                    {"expected", c.expected}});
  }
  return {{"initial_state", vec_json(s0)},
          {"iterations", opt.lyapunov_iterations},
          {"cases", rows}};
}

json coefficient_section() {
  const auto counts = verify_coefficients();
  const auto a = base_polynomial();
  bool match = true;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    match = match && counts[k] == (k < a.size() ? a[k] : 0);
  }
  return {{"enumerated_non_fatal_counts", counts},
          {"published_coefficients", a},
          {"match", match}};
}

json loss_table_section() {
  json rows = json::array();
  for (const auto& row : published_loss_table()) {
    const double exact =
        prob_data_loss(row.n, 0.01, LossMethod::exact_bigint).p_loss;
    const double closed =
        prob_data_loss(row.n, 0.01, LossMethod::closed_form).p_loss;
    const double logd =
        prob_data_loss(row.n, 0.01, LossMethod::log_domain).p_loss;
    rows.push_back({{"n", row.n},
                    {"machines", kMachinesPerGroup * row.n},
                    {"published", row.p_loss},
                    {"exact_bigint", exact},
                    {"log_domain", logd},
                    {"closed_form", closed},
                    {"ratio_exact_to_published", exact / row.p_loss},
                    {"relative_deviation",
                     std::abs(exact - row.p_loss) / row.p_loss}});
  }
  return {{"p", 0.01},
          {"rows", rows},
          {"note",
           "coefficients come from direct convolution; the published values "
           "are not reproduced exactly"}};
}

json allocation_section() {
  const auto params = ModelParams::two_user(0.6, 1.25, 1.28);
  // alpha v0 = 1 GB and xi_i x_i(0) = 0.1 GB with 1 model unit = 1 GB.
  const auto s0 = SystemState::two_user(1.0 / 0.6, 0.1 / 1.25, 0.1 / 1.28);
  std::vector<std::size_t> stages;
  for (const auto& r : published_allocation_table()) stages.push_back(r.stage);
  const auto report = allocation_report(params, s0, stages, kGigabyte);
  json rows = json::array();
  for (std::size_t k = 0; k < report.size(); ++k) {
    const auto& pub = published_allocation_table()[k];
    const auto& rec = report[k];
    rows.push_back(
        {{"stage", rec.stage},
         {"owner_mb", rec.owner_alloc_bytes / kMegabyte},
         {"user1_mb", rec.user_alloc_bytes[0].value() / kMegabyte},
         {"user2_mb", rec.user_alloc_bytes[1].value() / kMegabyte},
         {"published_owner_mb", pub.owner_mb},
         {"published_user1_mb", pub.user1_mb},
         {"published_user2_mb", pub.user2_mb}});
  }
  return {{"params", {{"alpha", 0.6}, {"xi1", 1.25}, {"xi2", 1.28}}},
          {"initial_state", {s0.v_c, s0.x[0], s0.x[1]}},
          {"unit", "1 model unit = 1 GB = 1000 MB"},
          {"rows", rows},
          {"verdict", "procedure reproduced; published MB figures are not"}};
}

json structural_section(const DiscrepancyOptions& opt) {
  json exhaustive = json::array();
  for (double p : {0.1, 0.3, 0.5}) {
    const double group = exhaustive_loss(3, p, LossMode::group).p_loss;
    const double structural = exhaustive_loss(3, p, LossMode::structural).p_loss;
    exhaustive.push_back({{"n", 3},
                          {"p", p},
                          {"group", group},
                          {"structural", structural},
                          {"closed_form",
                           prob_data_loss(3, p, LossMethod::closed_form).p_loss},
                          {"structural_over_group", structural / group}});
  }
  json mc = json::array();
  for (LossMode mode : {LossMode::group, LossMode::structural}) {
    const auto est = mc_estimate(10, 0.1, opt.mc_trials, opt.seed, mode,
                                 opt.workers);
    mc.push_back({{"n", 10},
                  {"p", 0.1},
                  {"mode", to_string(mode)},
                  {"trials", est.trials},
                  {"seed", est.seed},
                  {"p_hat", est.p_hat},
                  {"half_width_95", est.half_width_95}});
  }
  return {{"exhaustive", exhaustive},
          {"monte_carlo", mc},
          {"closed_form_n10_p0.1",
           prob_data_loss(10, 0.1, LossMethod::closed_form).p_loss},
          {"note",
           "structural mode follows the cyclic placement with S1 -> half A, "
           "S2 -> half B; it is not expected to match the independent-group "
           "model"}};
}

}  // namespace

json discrepancy_report(const DiscrepancyOptions& options) {
  return {
      {"fixed_points", fixed_point_section()},
      {"sign_convention", sign_convention_section()},
      {"routh_region", routh_section()},
      {"hopf", hopf_section()},
      {"lyapunov_regimes", lyapunov_section(options)},
      {"coefficients", coefficient_section()},
      {"loss_table", loss_table_section()},
      {"allocation_table", allocation_section()},
      {"placement_vs_group", structural_section(options)},
  };
}

namespace {

std::string num(const json& v) {
  if (v.is_null()) return "n/a";
  std::ostringstream os;
  os.precision(6);
  os << v.get<double>();
  return os.str();
}

}  // namespace

std::string render_discrepancy_markdown(const json& r) {
  std::ostringstream md;
  md << "# Discrepancy report\n\n";

  const auto& fp = r.at("fixed_points");
  md << "## Fixed points\n\n"
     << "- origin residual: " << num(fp.at("origin_residual")) << "\n"
     << "- claimed point residual: " << num(fp.at("claimed_point_residual"))
     << "\n- " << fp.at("verdict").get<std::string>() << "\n\n";

  const auto& sc = r.at("sign_convention");
  md << "## Sign convention\n\n- max |general - two-user|: "
     << num(sc.at("max_abs_difference_general_vs_two_user")) << " over "
     << sc.at("random_points").get<std::size_t>() << " points\n- "
     << sc.at("verdict").get<std::string>() << "\n\n";

  const auto& rr = r.at("routh_region");
  md << "## Routh region\n\n- grid points: "
     << rr.at("grid_points").get<std::size_t>()
     << "\n- P > 0 and Q > 0: "
     << rr.at("points_with_P_and_Q_positive").get<std::size_t>()
     << "\n- Routh stable: " << rr.at("routh_stable_points").get<std::size_t>()
     << "\n- inside quoted window: "
     << rr.at("claimed_window_points").get<std::size_t>() << "\n- "
     << rr.at("verdict").get<std::string>() << "\n\n";

  const auto& h = r.at("hopf");
  md << "## Hopf condition\n\n- pairs with alpha in (0, 1]: "
     << h.at("pairs_with_alpha_in_0_1").get<std::size_t>() << " of "
     << h.at("pairs").get<std::size_t>() << "\n- hopf_alpha(0.51, 0.01) = "
     << num(h.at("reference_counterexample").at("alpha")) << "\n- "
     << h.at("verdict").get<std::string>() << "\n\n";

  md << "## Lyapunov regimes\n\n| regime | alpha | xi1 | xi2 | exponents | "
        "class | expected |\n|---|---|---|---|---|---|---|\n";
  for (const auto& c : r.at("lyapunov_regimes").at("cases")) {
    const auto& e = c.at("exponents");
    md << "| " << c.at("regime").get<std::string>() << " | "
       << num(c.at("alpha")) << " | " << num(c.at("xi1")) << " | "
       << num(c.at("xi2")) << " | " << num(e[0]) << ", " << num(e[1]) << ", "
       << num(e[2]) << " | " << c.at("classification").get<std::string>()
       << " | " << c.at("expected").get<std::string>() << " |\n";
  }

  const auto& co = r.at("coefficients");
  md << "\n## Survival coefficients\n\n- enumerated: "
     << co.at("enumerated_non_fatal_counts").dump()
     << "\n- published: " << co.at("published_coefficients").dump()
     << "\n- match: " << (co.at("match").get<bool>() ? "yes" : "no") << "\n\n";

  md << "## Loss table (p = 0.01)\n\n| n | published | exact | closed form | "
        "exact / published |\n|---|---|---|---|---|\n";
  for (const auto& row : r.at("loss_table").at("rows")) {
    md << "| " << row.at("n").get<std::size_t>() << " | "
       << num(row.at("published")) << " | " << num(row.at("exact_bigint"))
       << " | " << num(row.at("closed_form")) << " | "
       << num(row.at("ratio_exact_to_published")) << " |\n";
  }

  md << "\n## Allocation table (MB)\n\n| stage | owner | user 1 | user 2 | "
        "published owner | published user 1 | published user 2 |\n"
        "|---|---|---|---|---|---|---|\n";
  for (const auto& row : r.at("allocation_table").at("rows")) {
    md << "| " << row.at("stage").get<std::size_t>() << " | "
       << num(row.at("owner_mb")) << " | " << num(row.at("user1_mb")) << " | "
       << num(row.at("user2_mb")) << " | " << num(row.at("published_owner_mb"))
       << " | " << num(row.at("published_user1_mb")) << " | "
       << num(row.at("published_user2_mb")) << " |\n";
  }

  md << "\n## Placement versus independent groups\n\n| n | p | group | "
        "structural | ratio |\n|---|---|---|---|---|\n";
  for (const auto& row : r.at("placement_vs_group").at("exhaustive")) {
    md << "| 3 | " << num(row.at("p")) << " | " << num(row.at("group"))
       << " | " << num(row.at("structural")) << " | "
       << num(row.at("structural_over_group")) << " |\n";
  }
  for (const auto& row : r.at("placement_vs_group").at("monte_carlo")) {
    md << "\n- MC n=10 p=0.1 " << row.at("mode").get<std::string>()
       << ": " << num(row.at("p_hat")) << " +/- "
       << num(row.at("half_width_95"));
  }
  md << "\n";
  return md.str();
}

}  // namespace cloudchaos
