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

#include "cloudchaos/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "cloudchaos/discrepancy.hpp"
#include "cloudchaos/dynamics.hpp"
#include "cloudchaos/errors.hpp"
#include "cloudchaos/failure_sim.hpp"
#include "cloudchaos/model.hpp"
#include "cloudchaos/replication.hpp"
#include "cloudchaos/storage_ledger.hpp"

namespace cloudchaos {

namespace {

using nlohmann::json;

constexpr const char* kVersion = CLOUDCHAOS_VERSION;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::vector<T> parse_list(const std::string& flag, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    T value{};
    const char* first = item.data();
    const char* last = item.data() + item.size();
    while (first < last && *first == ' ') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw UsageError(flag + ": cannot parse '" + item + "'");
    }
    out.push_back(value);
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

struct ModelArgs {
  double alpha = 0.0;
  double xi1 = std::numeric_limits<double>::quiet_NaN();
  double xi2 = std::numeric_limits<double>::quiet_NaN();
  std::string xi_list;
  double v_max = 1.0;
  double v0 = 0.01, x1 = 0.01, x2 = -0.01;
  std::string x_list;

  ModelParams params() const {
    if (!xi_list.empty()) {
      return ModelParams(alpha, parse_list<double>("--xi", xi_list), v_max);
    }
    if (std::isnan(xi1) || std::isnan(xi2)) {
      throw UsageError("--xi1 and --xi2 (or --xi) are required");
    }
    return ModelParams::two_user(alpha, xi1, xi2, v_max);
  }

  SystemState state(const ModelParams& p) const {
    if (!x_list.empty()) {
      auto x = parse_list<double>("--x", x_list);
      if (x.size() != p.users()) {
        throw UsageError("--x: expected " + std::to_string(p.users()) +
                         " demands");
      }
      return SystemState{0, v0, std::move(x)};
    }
    if (p.users() != 2) throw UsageError("--x is required for n != 2 users");
    return SystemState::two_user(v0, x1, x2);
  }

  Vec3 point() const { return {v0, x1, x2}; }
};

void add_model(CLI::App* sub, ModelArgs& m, bool general = false) {
  sub->add_option("--alpha", m.alpha, "owner capacity scale in (0, 1]")
      ->required();
  sub->add_option("--xi1", m.xi1, "scale of user 1");
  sub->add_option("--xi2", m.xi2, "scale of user 2");
  if (general) {
    sub->add_option("--xi", m.xi_list, "comma-separated scales for n users");
    sub->add_option("--x", m.x_list, "comma-separated initial demands");
  }
  sub->add_option("--vmax", m.v_max, "owner capacity bound");
  sub->add_option("--v0", m.v0, "initial capacity variable");
  sub->add_option("--x1", m.x1, "initial demand of user 1");
  sub->add_option("--x2", m.x2, "initial demand of user 2");
}

struct Output {
  std::string path;
  std::string format;
};

void add_output(CLI::App* sub, Output& o) {
  sub->add_option("--out", o.path,
                  "output file (relative paths resolve against $" +
                      std::string(kOutputDirEnv) + ")");
  sub->add_option("--format", o.format, "output format");
}

std::string resolve_format(const std::string& requested,
                           std::initializer_list<const char*> allowed) {
  if (requested.empty()) return *allowed.begin();
  for (const char* a : allowed) {
    if (requested == a) return requested;
  }
  std::string msg = "--format: '" + requested + "' not supported, use";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw UsageError(msg);
}

json resolved_config(const CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name == "--help" || name == "-h,--help" || name.empty()) continue;
    std::string key = opt->get_single_name();
    if (opt->get_expected_min() == 0) {
      cfg[key] = opt->count() > 0;
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (std::size_t k = 0; k < results.size(); ++k) {
        value += (k ? "," : "") + results[k];
      }
    } else {
      value = opt->get_default_str();
    }
    // Scalars that read back as numbers or booleans are stored typed.
    json typed = json::parse(value, nullptr, false);
    if (!typed.is_discarded() && (typed.is_number() || typed.is_boolean())) {
      cfg[key] = typed;
    } else {
      cfg[key] = value;
    }
  }
  return cfg;
}

struct Context {
  std::string command;
  json config;
  std::string format;

  /// The parsed options with the format actually used.
  json effective_config() const {
    json c = config;
    c["format"] = format;
    return c;
  }
};

std::string json_document(const Context& ctx, json result) {
  json doc = {{"tool", "cloudchaos"},
              {"version", kVersion},
              {"command", ctx.command},
              {"config", ctx.effective_config()},
              {"result", std::move(result)}};
  return doc.dump(2) + "\n";
}

std::string csv_preamble(const Context& ctx) {
  return "# cloudchaos " + std::string(kVersion) + " " + ctx.command +
         "\n# config " + ctx.effective_config().dump() + "\n";
}

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json complex_json(const std::complex<double>& z) {
  return json::array({z.real(), z.imag()});
}

json stability_json(const StabilityReport& r) {
  json jac = json::array();
  for (int i = 0; i < 3; ++i) {
    jac.push_back({r.jacobian(i, 0), r.jacobian(i, 1), r.jacobian(i, 2)});
  }
  json ev = json::array();
  for (const auto& z : r.eigenvalues) ev.push_back(complex_json(z));
  return {{"fixed_point", vec_json(r.fixed_point)},
          {"residual", r.residual},
          {"jacobian", jac},
          {"char_coeffs",
           {{"P", r.char_coeffs.P}, {"Q", r.char_coeffs.Q},
            {"R", r.char_coeffs.R}}},
          {"routh_verdict", to_string(r.routh_verdict)},
          {"modulus_verdict", to_string(r.modulus_verdict)},
          {"eigenvalues", ev}};
}

// ---- subcommand handlers -------------------------------------------------

std::string cmd_iterate(const Context& ctx, const ModelArgs& m,
                        std::size_t steps, std::size_t transient) {
  const auto params = m.params();
  const auto traj = iterate(params, m.state(params), steps, transient);
  if (ctx.format == "json") {
    json states = json::array();
    for (const auto& s : traj.states) {
      states.push_back({{"l", s.stage}, {"v_c", s.v_c}, {"x", s.x},
                        {"constraint_holds",
                         check_constraint(params, s).holds()}});
    }
    return json_document(ctx, {{"states", states}});
  }
  std::string csv = csv_preamble(ctx) + "l,v_c";
  for (std::size_t i = 1; i <= params.users(); ++i) {
    csv += ",x" + std::to_string(i);
  }
  csv += ",constraint_holds\n";
  for (const auto& s : traj.states) {
    csv += std::to_string(s.stage) + "," + fmt_double(s.v_c);
    for (double x : s.x) csv += "," + fmt_double(x);
    csv += check_constraint(params, s).holds() ? ",1\n" : ",0\n";
  }
  return csv;
}

std::string cmd_fixed_points(const Context& ctx, const ModelArgs& m,
                             const std::vector<std::string>& seed_texts) {
  const auto params = m.params();
  std::vector<Vec3> seeds;
  if (seed_texts.empty()) {
    seeds = {Vec3::Zero(), claimed_fixed_point(params), Vec3(0.5, 0.5, 0.5),
             Vec3(-0.5, 0.2, -0.2)};
  }
  for (const auto& t : seed_texts) {
    const auto v = parse_list<double>("--seed-point", t);
    if (v.size() != 3) throw UsageError("--seed-point: need v,x1,x2");
    seeds.emplace_back(v[0], v[1], v[2]);
  }
  const auto results = find_fixed_points(params, seeds);
  if (ctx.format == "csv") {
    std::string csv = csv_preamble(ctx) +
                      "seed_v,seed_x1,seed_x2,v,x1,x2,residual,converged\n";
    for (const auto& r : results) {
      csv += fmt_double(r.seed[0]) + "," + fmt_double(r.seed[1]) + "," +
             fmt_double(r.seed[2]) + "," + fmt_double(r.point[0]) + "," +
             fmt_double(r.point[1]) + "," + fmt_double(r.point[2]) + "," +
             fmt_double(r.residual) + "," + (r.converged ? "1" : "0") + "\n";
    }
    return csv;
  }
  json rows = json::array();
  for (const auto& r : results) {
    rows.push_back({{"seed", vec_json(r.seed)},
                    {"converged", r.converged},
                    {"iterations", r.iterations},
                    {"stability", stability_json(stability_report(params, r.point))}});
  }
  const Vec3 claimed = claimed_fixed_point(params);
  json hopf = nullptr;
  try {
    hopf = hopf_alpha(params.xi(0), params.xi(1));
  } catch (const SingularParameters&) {
  }
  return json_document(
      ctx, {{"origin_residual", fixed_point_residual(params, Vec3::Zero())},
            {"claimed_point", vec_json(claimed)},
            {"claimed_point_residual", fixed_point_residual(params, claimed)},
            {"claimed_stability_window", claimed_stability_window(params)},
            {"hopf_alpha", hopf},
            {"seeds", rows}});
}

std::string cmd_lyapunov(const Context& ctx, const ModelArgs& m,
                         std::size_t iters, std::size_t transient,
                         double zero_band, std::ostream& out, bool to_file) {
  const auto params = m.params();
  Vec3 s0 = m.point();
  if (transient > 0) {
    const auto st = iterate(params, m.state(params), transient).states.back();
    s0 = Vec3(st.v_c, st.x[0], st.x[1]);
  }
  const auto spec = lyapunov_spectrum(params, s0, iters);
  const auto kind = classify_attractor(spec, zero_band);
  if (to_file) {
    out << "exponents " << fmt_double(spec.exponents[0]) << " "
        << fmt_double(spec.exponents[1]) << " " << fmt_double(spec.exponents[2])
        << " (" << to_string(kind) << ")\n";
  }
  if (ctx.format == "csv") {
    std::string csv = csv_preamble(ctx) + "iteration,lambda1,lambda2,lambda3\n";
    for (std::size_t k = 0; k < spec.history.size(); ++k) {
      const std::size_t it = k + 1 == spec.history.size()
                                 ? spec.iterations
                                 : (k + 1) * kHistoryStride;
      const auto& h = spec.history[k];
      csv += std::to_string(it) + "," + fmt_double(h[0]) + "," +
             fmt_double(h[1]) + "," + fmt_double(h[2]) + "\n";
    }
    return csv;
  }
  return json_document(ctx, {{"exponents", spec.exponents},
                             {"iterations", spec.iterations},
                             {"classification", to_string(kind)},
                             {"zero_band", zero_band},
                             {"initial_state", vec_json(s0)}});
}

std::string cmd_bifurcate(const Context& ctx, const ModelArgs& m,
                          const std::string& param, double lo, double hi,
                          std::size_t points, const BifurcationOptions& opt) {
  const auto which = parse_sweep_parameter(param);
  if (!which) throw UsageError("--param: expected alpha, xi1 or xi2");
  const auto base = m.params();
  const auto scan = bifurcation_scan(base, {*which, lo, hi, points}, m.point(), opt);
  if (ctx.format == "json") {
    json rows = json::array();
    for (const auto& p : scan.points) {
      rows.push_back({{"value", p.value},
                      {"diverged", p.diverged},
                      {"divergence_stage",
                       p.divergence_stage ? json(*p.divergence_stage) : json()},
                      {"largest_exponent",
                       p.diverged ? json() : json(p.largest_exponent)},
                      {"v_samples", p.v_samples}});
    }
    return json_document(ctx, {{"parameter", param}, {"points", rows}});
  }
  std::string csv = csv_preamble(ctx) + param +
                    ",sample,v_c,largest_exponent,diverged,divergence_stage\n";
  for (const auto& p : scan.points) {
    const std::string v = fmt_double(p.value);
    if (p.diverged) {
      csv += v + ",,,," + "1," + std::to_string(*p.divergence_stage) + "\n";
      continue;
    }
    const std::string lam = fmt_double(p.largest_exponent);
    for (std::size_t k = 0; k < p.v_samples.size(); ++k) {
      csv += v + "," + std::to_string(k) + "," + fmt_double(p.v_samples[k]) +
             "," + lam + ",0,\n";
    }
  }
  return csv;
}

std::string cmd_storage_report(const Context& ctx, ModelArgs m,
                               const std::string& stages_text,
                               double unit_scale, double owner0, double user0,
                               double chunks, bool explicit_state) {
  const auto params = m.params();
  if (params.users() != 2) throw UsageError("storage-report is two-user only");
  if (!(unit_scale > 0)) throw UsageError("--unit-scale must be > 0");
  if (!explicit_state) {
    m.v0 = owner0 / (params.alpha() * unit_scale);
    m.x1 = params.xi(0) > 0 ? user0 / (params.xi(0) * unit_scale) : 0.0;
    m.x2 = params.xi(1) > 0 ? user0 / (params.xi(1) * unit_scale) : 0.0;
  }
  const auto s0 = m.state(params);
  const auto stages = parse_list<std::size_t>("--stages", stages_text);
  const auto report = allocation_report(params, s0, stages, unit_scale);

  if (ctx.format == "json") {
    json rows = json::array();
    for (const auto& r : report) {
      json users = json::array();
      for (const auto& u : r.user_alloc_bytes) {
        users.push_back({{"bytes", u.magnitude},
                         {"sign", u.negative ? "-" : "+"}});
      }
      rows.push_back({{"l", r.stage},
                      {"owner_alloc_bytes", r.owner_alloc_bytes},
                      {"users", users}});
    }
    json result = {{"initial_state", {s0.v_c, s0.x[0], s0.x[1]}},
                   {"records", rows}};
    if (chunks > 0 && !stages.empty() && stages.back() > 0) {
      // c(l+1) needs v_c(l) for l = 0 .. L-1.
      const std::size_t last = stages.back();
      std::vector<double> v_series{s0.v_c};
      if (last > 1) {
        const auto traj = iterate(params, s0, last - 1);
        for (const auto& st : traj.states) v_series.push_back(st.v_c);
      }
      const auto cs = chunk_sequence(chunks, v_series);
      json sampled = json::array();
      for (std::size_t l : stages) {
        if (l < cs.values.size()) {
          sampled.push_back({{"l", l},
                             {"chunks", cs.values[l]},
                             {"display", round_half_up(cs.values[l])}});
        }
      }
      result["chunks"] = sampled;
    }
    return json_document(ctx, result);
  }
  std::string csv = csv_preamble(ctx) + "# initial_state " +
                    fmt_double(s0.v_c) + "," + fmt_double(s0.x[0]) + "," +
                    fmt_double(s0.x[1]) + "\n" +
                    "l,owner_alloc_bytes,user1_alloc_bytes,user1_sign,"
                    "user2_alloc_bytes,user2_sign\n";
  for (const auto& r : report) {
    csv += std::to_string(r.stage) + "," + fmt_double(r.owner_alloc_bytes);
    for (const auto& u : r.user_alloc_bytes) {
      csv += "," + fmt_double(u.magnitude) + (u.negative ? ",-" : ",+");
    }
    csv += "\n";
  }
  return csv;
}

std::string cmd_placement(const Context& ctx, std::size_t n) {
  const auto plan = build_placement(n);
  if (ctx.format == "json") {
    auto blocks = [](const std::vector<Block>& bs) {
      json arr = json::array();
      for (const auto& b : bs) {
        json labels = json::array();
        for (const auto& r : b.members) labels.push_back(r.label());
        arr.push_back({{"index", b.index},
                       {"members", labels},
                       {"machines", b.machine_ids}});
      }
      return arr;
    };
    json machines = json::array();
    for (const auto& mc : plan.machines) {
      machines.push_back({{"id", mc.id},
                          {"rack", mc.rack == Rack::owner ? "owner" : "user"},
                          {"block", mc.block},
                          {"replica", mc.replica.label()},
                          {"node", mc.node},
                          {"half", mc.half == Half::a ? "A" : "B"}});
    }
    return json_document(ctx, {{"n", n},
                               {"machine_count", plan.machines.size()},
                               {"owner_blocks", blocks(plan.owner_blocks)},
                               {"user_blocks", blocks(plan.user_blocks)},
                               {"machines", machines}});
  }
  return "# cloudchaos " + std::string(kVersion) + " placement\n# config " +
         ctx.effective_config().dump() + "\n# machines " +
         std::to_string(plan.machines.size()) + "\n" + render_plan_text(plan);
}

std::string cmd_loss_exact(const Context& ctx, std::size_t n, double p,
                           bool terms) {
  const auto exact = prob_data_loss(n, p, LossMethod::exact_bigint, terms);
  const auto logd = prob_data_loss(n, p, LossMethod::log_domain);
  const auto closed = prob_data_loss(n, p, LossMethod::closed_form);
  json result = {{"n", n},
                 {"p", p},
                 {"machines", kMachinesPerGroup * n},
                 {"exact_bigint", exact.p_loss},
                 {"log_domain", logd.p_loss},
                 {"closed_form", closed.p_loss}};
  if (terms) result["per_f_terms"] = exact.per_f_terms;
  return json_document(ctx, result);
}

std::string cmd_loss_curve(const Context& ctx, const std::string& nodes_text,
                           double p, unsigned workers) {
  const auto rows = loss_curve(parse_list<std::size_t>("--nodes-list", nodes_text),
                               p, workers);
  if (ctx.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"n", r.n},
                     {"p", r.p},
                     {"p_loss_exact", r.p_loss_exact},
                     {"p_loss_closed_form", r.p_loss_closed_form}});
    }
    return json_document(ctx, {{"rows", arr}});
  }
  std::string csv = csv_preamble(ctx) + "n,p,p_loss_exact,p_loss_closed_form\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.n) + "," + fmt_double(r.p) + "," +
           fmt_double(r.p_loss_exact) + "," + fmt_double(r.p_loss_closed_form) +
           "\n";
  }
  return csv;
}

std::string cmd_loss_mc(const Context& ctx, std::size_t n, double p,
                        std::uint64_t trials, std::uint64_t seed,
                        const std::string& mode_text, unsigned workers) {
  const auto mode = parse_loss_mode(mode_text);
  if (!mode) throw UsageError("--mode: expected group or structural");
  const auto est = mc_estimate(n, p, trials, seed, *mode, workers);
  return json_document(ctx, {{"n", n},
                             {"p", p},
                             {"trials", est.trials},
                             {"seed", est.seed},
                             {"mode", to_string(est.mode)},
                             {"p_hat", est.p_hat},
                             {"half_width_95", est.half_width_95}});
}

std::string cmd_verify_coefficients(const Context& ctx) {
  const auto counts = verify_coefficients();
  const auto a = base_polynomial();
  std::array<std::uint64_t, 8> expected{};
  std::copy(a.begin(), a.end(), expected.begin());
  return json_document(ctx, {{"non_fatal_counts_by_size", counts},
                             {"expected", expected},
                             {"match", counts == expected}});
}

std::string cmd_discrepancy(const Context& ctx, const DiscrepancyOptions& opt) {
  const json report = discrepancy_report(opt);
  if (ctx.format == "md") {
    return "<!-- cloudchaos " + std::string(kVersion) + " discrepancy-report " +
           ctx.effective_config().dump() + " -->\n" + render_discrepancy_markdown(report);
  }
  return json_document(ctx, report);
}

void emit(const std::string& doc, const std::string& path, std::ostream& out,
          std::ostream& err) {
  if (path.empty()) {
    out << doc;
    return;
  }
  std::filesystem::path target(path);
  if (target.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
      target = std::filesystem::path(dir) / target;
    }
  }
  std::ofstream file(target, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + target.string() + " for writing");
  file << doc;
  file.flush();
  if (!file) throw IoError("failed writing " + target.string());
  err << "wrote " << target.string() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Storage-map dynamics and replication loss analysis",
               "cloudchaos"};
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", kVersion);

  Output o;
  ModelArgs m;
  std::size_t steps = 100, transient = 0, iters = 100000, lyap_transient = 0;
  double zero_band = kDefaultZeroBand;
  std::vector<std::string> seed_points;
  std::string sweep_param = "alpha";
  double lo = 0.01, hi = 1.0;
  std::size_t points = 400;
  BifurcationOptions bif;
  std::string stages = "1,10,20,200,365";
  double unit_scale = kGigabyte, owner0 = kGigabyte, user0 = 0.1 * kGigabyte,
         chunks = 0;
  std::size_t nodes = 10;
  double p = 0.01;
  bool terms = false;
  std::string nodes_list = "10,20,40,80,100,140,200";
  std::uint64_t trials = 1000000, seed = 42;
  std::string mode = "group";
  unsigned workers = 0;
  DiscrepancyOptions disc;

  std::map<const CLI::App*, std::function<std::string(Context&)>> handlers;
  std::ostream* summary = &out;
  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    add_output(s, o);
    return s;
  };

  auto* s_iter = sub("iterate", "iterate the storage map");
  add_model(s_iter, m, true);
  s_iter->add_option("--steps", steps, "number of map applications");
  s_iter->add_option("--transient", transient, "leading states to drop");
  handlers[s_iter] = [&](Context& c) {
    c.format = resolve_format(o.format, {"csv", "json"});
    return cmd_iterate(c, m, steps, transient);
  };

  auto* s_fp = sub("fixed-points", "fixed points and their stability");
  add_model(s_fp, m);
  s_fp->add_option("--seed-point", seed_points, "Newton seed v,x1,x2");
  handlers[s_fp] = [&](Context& c) {
    c.format = resolve_format(o.format, {"json", "csv"});
    return cmd_fixed_points(c, m, seed_points);
  };

  auto* s_ly = sub("lyapunov", "Lyapunov spectrum of an orbit");
  add_model(s_ly, m);
  s_ly->add_option("--iters", iters, "tangent-map iterations (>= 1000)");
  s_ly->add_option("--transient", lyap_transient, "steps before measuring");
  s_ly->add_option("--zero-band", zero_band, "quasiperiodic band half-width");
  handlers[s_ly] = [&](Context& c) {
    c.format = resolve_format(o.format, {"json", "csv"});
    return cmd_lyapunov(c, m, iters, lyap_transient, zero_band, *summary,
                        !o.path.empty());
  };

  auto* s_bif = sub("bifurcate", "bifurcation scan of v_c");
  add_model(s_bif, m);
  s_bif->add_option("--param", sweep_param, "alpha, xi1 or xi2");
  s_bif->add_option("--lo", lo, "sweep start");
  s_bif->add_option("--hi", hi, "sweep end");
  s_bif->add_option("--points", points, "grid points");
  s_bif->add_option("--transient", bif.transient, "steps discarded");
  s_bif->add_option("--samples", bif.samples, "v_c samples per grid point");
  s_bif->add_option("--lyap-iters", bif.lyapunov_iterations,
                    "Lyapunov iterations per grid point");
  s_bif->add_option("--workers", bif.workers, "threads (0 = all cores)");
  handlers[s_bif] = [&](Context& c) {
    c.format = resolve_format(o.format, {"csv", "json"});
    return cmd_bifurcate(c, m, sweep_param, lo, hi, points, bif);
  };

  auto* s_sr = sub("storage-report", "stage-by-stage allocation report");
  add_model(s_sr, m);
  s_sr->add_option("--stages", stages, "comma-separated stages");
  s_sr->add_option("--unit-scale", unit_scale, "bytes per model unit");
  s_sr->add_option("--owner0-bytes", owner0,
                   "initial owner storage alpha*v0 (when --v0 is not given)");
  s_sr->add_option("--user0-bytes", user0,
                   "initial per-user storage xi_i*x_i (when --v0 is not given)");
  s_sr->add_option("--chunks", chunks, "initial chunk count (json output)");
  handlers[s_sr] = [&](Context& c) {
    c.format = resolve_format(o.format, {"csv", "json"});
    const bool explicit_state = s_sr->get_option("--v0")->count() > 0;
    return cmd_storage_report(c, m, stages, unit_scale, owner0, user0, chunks,
                              explicit_state);
  };

  auto* s_pl = sub("placement", "cyclic primary/secondary placement");
  s_pl->add_option("--nodes", nodes, "node count (>= 3)");
  handlers[s_pl] = [&](Context& c) {
    c.format = resolve_format(o.format, {"text", "json"});
    return cmd_placement(c, nodes);
  };

  auto* s_le = sub("loss-exact", "exact data-loss probability");
  s_le->add_option("--nodes", nodes, "node count");
  s_le->add_option("--p", p, "per-machine failure probability");
  s_le->add_flag("--terms", terms, "include per-f breakdown");
  handlers[s_le] = [&](Context& c) {
    c.format = resolve_format(o.format, {"json"});
    return cmd_loss_exact(c, nodes, p, terms);
  };

  auto* s_lc = sub("loss-curve", "data-loss probability versus n");
  s_lc->add_option("--nodes-list", nodes_list, "comma-separated node counts");
  s_lc->add_option("--p", p, "per-machine failure probability");
  s_lc->add_option("--workers", workers, "threads (0 = all cores)");
  handlers[s_lc] = [&](Context& c) {
    c.format = resolve_format(o.format, {"csv", "json"});
    return cmd_loss_curve(c, nodes_list, p, workers);
  };

  auto* s_mc = sub("loss-mc", "Monte Carlo data-loss estimate");
  s_mc->add_option("--nodes", nodes, "node count");
  s_mc->add_option("--p", p, "per-machine failure probability");
  s_mc->add_option("--trials", trials, "number of trials");
  s_mc->add_option("--seed", seed, "RNG seed");
  s_mc->add_option("--mode", mode, "group or structural");
  s_mc->add_option("--workers", workers, "threads (0 = all cores)");
  handlers[s_mc] = [&](Context& c) {
    c.format = resolve_format(o.format, {"json"});
    return cmd_loss_mc(c, nodes, p, trials, seed, mode, workers);
  };

  auto* s_vc = sub("verify-coefficients", "enumerate per-group survival counts");
  handlers[s_vc] = [&](Context& c) {
    c.format = resolve_format(o.format, {"json"});
    return cmd_verify_coefficients(c);
  };

  auto* s_dr = sub("discrepancy-report", "published claims versus computed values");
  s_dr->add_option("--trials", disc.mc_trials, "Monte Carlo trials");
  s_dr->add_option("--seed", disc.seed, "RNG seed");
  s_dr->add_option("--lyap-iters", disc.lyapunov_iterations,
                   "Lyapunov iterations per regime");
  s_dr->add_option("--workers", disc.workers, "threads (0 = all cores)");
  handlers[s_dr] = [&](Context& c) {
    c.format = resolve_format(o.format, {"json", "md"});
    return cmd_discrepancy(c, disc);
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help / --version
      if (dynamic_cast<const CLI::CallForVersion*>(&e)) {
        out << kVersion << "\n";
      } else {
        out << app.help();
      }
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  Context ctx{chosen->get_name(), resolved_config(chosen), ""};
  try {
    const std::string doc = handlers.at(chosen)(ctx);
    emit(doc, o.path, out, err);
  } catch (const Divergence& d) {
    err << "error: " << d.what() << "\n";
    return kExitDivergence;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace cloudchaos
