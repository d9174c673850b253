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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "cloudchaos/dynamics.hpp"
#include "cloudchaos/errors.hpp"
#include "cloudchaos/failure_sim.hpp"
#include "cloudchaos/model.hpp"
#include "cloudchaos/replication.hpp"

namespace py = pybind11;
using namespace cloudchaos;

namespace {

using Triple = std::array<double, 3>;

Vec3 vec(const Triple& t) { return Vec3(t[0], t[1], t[2]); }
Triple triple(const Vec3& v) { return {v[0], v[1], v[2]}; }

LossMethod method_of(const std::string& name) {
  const auto m = parse_loss_method(name);
  if (!m) throw std::invalid_argument("unknown loss method: " + name);
  return *m;
}

LossMode mode_of(const std::string& name) {
  const auto m = parse_loss_mode(name);
  if (!m) throw std::invalid_argument("unknown loss mode: " + name);
  return *m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Storage-map dynamics and replication loss analysis";
  m.attr("__version__") = CLOUDCHAOS_VERSION;

  py::register_exception<Divergence>(m, "Divergence", PyExc_ArithmeticError);
  py::register_exception<TooFewNodes>(m, "TooFewNodes", PyExc_ValueError);
  py::register_exception<SingularParameters>(m, "SingularParameters", PyExc_ValueError);

  m.def(
      "iterate",
      [](double alpha, std::vector<double> xi, double v0, std::vector<double> x0,
         std::size_t steps, std::size_t transient) {
        const ModelParams p(alpha, std::move(xi));
        const auto traj = iterate(p, SystemState{0, v0, std::move(x0)}, steps, transient);
        py::list rows;
        for (const auto& s : traj.states) {
          rows.append(py::make_tuple(s.stage, s.v_c, s.x));
        }
        return rows;
      },
      py::arg("alpha"), py::arg("xi"), py::arg("v0"), py::arg("x0"), py::arg("steps"),
      py::arg("transient") = 0,
      "List of (stage, v_c, [x_i]) after each application of the map.");

  m.def(
      "jacobian_at",
      [](double alpha, double xi1, double xi2, Triple point) {
        const Mat3 j = jacobian_at(ModelParams::two_user(alpha, xi1, xi2), vec(point));
        std::array<Triple, 3> out{};
        for (int r = 0; r < 3; ++r) out[r] = {j(r, 0), j(r, 1), j(r, 2)};
        return out;
      },
      py::arg("alpha"), py::arg("xi1"), py::arg("xi2"), py::arg("point"));

  m.def(
      "find_fixed_points",
      [](double alpha, double xi1, double xi2, std::vector<Triple> seeds) {
        std::vector<Vec3> s;
        for (const auto& t : seeds) s.push_back(vec(t));
        py::list out;
        for (const auto& r : find_fixed_points(ModelParams::two_user(alpha, xi1, xi2), s)) {
          py::dict d;
          d["point"] = triple(r.point);
          d["residual"] = r.residual;
          d["converged"] = r.converged;
          d["iterations"] = r.iterations;
          out.append(d);
        }
        return out;
      },
      py::arg("alpha"), py::arg("xi1"), py::arg("xi2"), py::arg("seeds"));

  m.def(
      "characteristic_coeffs",
      [](double alpha, double xi1, double xi2) {
        const auto c = characteristic_coeffs(alpha, xi1, xi2);
        return py::make_tuple(c.P, c.Q, c.R);
      },
      py::arg("alpha"), py::arg("xi1"), py::arg("xi2"));

  m.def(
      "routh_classify",
      [](double P, double Q, double R) { return to_string(routh_classify({P, Q, R})); },
      py::arg("P"), py::arg("Q"), py::arg("R"));

  m.def("hopf_alpha", &hopf_alpha, py::arg("xi1"), py::arg("xi2"));

  m.def(
      "lyapunov_spectrum",
      [](double alpha, double xi1, double xi2, Triple s0, std::size_t iterations) {
        py::gil_scoped_release nogil;
        const auto s = lyapunov_spectrum(ModelParams::two_user(alpha, xi1, xi2), vec(s0),
                                         iterations);
        return s.exponents;
      },
      py::arg("alpha"), py::arg("xi1"), py::arg("xi2"),
      py::arg("s0") = Triple{0.01, 0.01, -0.01}, py::arg("iterations") = 100000,
      "Exponents sorted descending.");

  m.def(
      "classify_attractor",
      [](std::array<double, 3> exponents, double zero_band) {
        LyapunovSpectrum s;
        s.exponents = exponents;
        return to_string(classify_attractor(s, zero_band));
      },
      py::arg("exponents"), py::arg("zero_band") = 0.01);

  m.def(
      "bifurcation_scan",
      [](double alpha, double xi1, double xi2, const std::string& param, double lo,
         double hi, std::size_t points, Triple s0, std::size_t transient,
         std::size_t samples, std::size_t lyapunov_iterations, unsigned workers) {
        const auto which = parse_sweep_parameter(param);
        if (!which) throw std::invalid_argument("param must be alpha, xi1 or xi2");
        BifurcationOptions opt{transient, samples, lyapunov_iterations, workers};
        BifurcationScan scan = [&] {
          py::gil_scoped_release nogil;
          return bifurcation_scan(ModelParams::two_user(alpha, xi1, xi2),
                                  {*which, lo, hi, points}, vec(s0), opt);
        }();
        py::list out;
        for (const auto& p : scan.points) {
          py::dict d;
          d["value"] = p.value;
          d["diverged"] = p.diverged;
          d["divergence_stage"] =
              p.divergence_stage ? py::cast(*p.divergence_stage) : py::none();
          d["v_samples"] = p.v_samples;
          d["largest_exponent"] = p.largest_exponent;
          out.append(d);
        }
        return out;
      },
      py::arg("alpha"), py::arg("xi1"), py::arg("xi2"), py::arg("param"), py::arg("lo"),
      py::arg("hi"), py::arg("points"), py::arg("s0") = Triple{0.01, 0.01, -0.01},
      py::arg("transient") = 1000, py::arg("samples") = 100,
      py::arg("lyapunov_iterations") = 100000, py::arg("workers") = 0);

  m.def(
      "build_placement",
      [](std::size_t n) {
        const auto plan = build_placement(n);
        auto blocks = [](const std::vector<Block>& bs) {
          py::list out;
          for (const auto& b : bs) {
            std::vector<std::string> labels;
            for (const auto& r : b.members) labels.push_back(r.label());
            out.append(py::make_tuple(labels, b.machine_ids));
          }
          return out;
        };
        py::dict d;
        d["n"] = plan.n;
        d["machines"] = plan.machines.size();
        d["owner_blocks"] = blocks(plan.owner_blocks);
        d["user_blocks"] = blocks(plan.user_blocks);
        return d;
      },
      py::arg("n"));

  m.def(
      "loss_polynomial",
      [](std::size_t n) {
        py::list out;
        for (const auto& c : loss_polynomial(n)) {
          out.append(py::int_(py::str(c.get_str())));
        }
        return out;
      },
      py::arg("n"), "Exact coefficients as Python ints.");

  m.def("prob_no_loss", &prob_no_loss, py::arg("n"), py::arg("f"));

  m.def(
      "prob_data_loss",
      [](std::size_t n, double p, const std::string& method) {
        return prob_data_loss(n, p, method_of(method)).p_loss;
      },
      py::arg("n"), py::arg("p"), py::arg("method") = "exact-bigint");

  m.def(
      "loss_curve",
      [](std::vector<std::size_t> ns, double p, unsigned workers) {
        py::list out;
        for (const auto& r : loss_curve(ns, p, workers)) {
          out.append(py::make_tuple(r.n, r.p, r.p_loss_exact, r.p_loss_closed_form));
        }
        return out;
      },
      py::arg("n_list"), py::arg("p"), py::arg("workers") = 0);

  m.def("verify_coefficients", &verify_coefficients);

  m.def(
      "mc_estimate",
      [](std::size_t n, double p, std::uint64_t trials, std::uint64_t seed,
         const std::string& mode, unsigned workers) {
        McEstimate e;
        {
          py::gil_scoped_release nogil;
          e = mc_estimate(n, p, trials, seed, mode_of(mode), workers);
        }
        py::dict d;
        d["p_hat"] = e.p_hat;
        d["trials"] = e.trials;
        d["losses"] = e.losses;
        d["half_width_95"] = e.half_width_95;
        return d;
      },
      py::arg("n"), py::arg("p"), py::arg("trials"), py::arg("seed") = 42,
      py::arg("mode") = "group", py::arg("workers") = 0);
}
