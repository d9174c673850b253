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

#include "cloudchaos/dynamics.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "cloudchaos/errors.hpp"
#include "parallel.hpp"

namespace cloudchaos {

namespace {

void require_two_users(const ModelParams& params) {
  if (params.users() != 2) {
    throw std::invalid_argument("dynamics analysis needs exactly two users");
  }
}

bool point_within_bound(const Vec3& p) {
  return p.allFinite() && p.cwiseAbs().maxCoeff() <= kDivergenceBound;
}

const double kLogFloor = std::log(DBL_MIN);

// One QR step of the tangent frame; adds log|R_ii| to `sums` and advances
// the orbit point.
void tangent_step(const ModelParams& params, Vec3& point, Mat3& frame,
                  std::array<double, 3>& sums, std::size_t stage) {
  const Mat3 a = jacobian_at(params, point);
  Eigen::HouseholderQR<Mat3> qr(a * frame);
  const Mat3 r = qr.matrixQR().triangularView<Eigen::Upper>();
  frame = qr.householderQ();
  for (int i = 0; i < 3; ++i) {
    const double d = std::abs(r(i, i));
    sums[i] += d > DBL_MIN ? std::log(d) : kLogFloor;
  }
  point = map_point(params, point);
  if (!point_within_bound(point)) throw Divergence(stage + 1);
}

std::array<double, 3> sorted_desc(std::array<double, 3> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace

Vec3 map_point(const ModelParams& params, const Vec3& p) {
  require_two_users(params);
  const auto [v, x1, x2] = two_user_update(params.alpha(), params.xi(0),
                                           params.xi(1), p[0], p[1], p[2]);
  return {v, x1, x2};
}

double fixed_point_residual(const ModelParams& params, const Vec3& point) {
  return (map_point(params, point) - point).cwiseAbs().maxCoeff();
}

Vec3 claimed_fixed_point(const ModelParams& params) {
  require_two_users(params);
  return {1.0, -params.alpha() / (2.0 * params.xi(0)),
          params.alpha() / (2.0 * params.xi(1))};
}

std::vector<FixedPointResult> find_fixed_points(
    const ModelParams& params, const std::vector<Vec3>& seeds) {
  require_two_users(params);
  if (seeds.empty()) throw std::invalid_argument("at least one seed required");
  constexpr double kTol = 1e-12;
  constexpr int kMaxSteps = 200;

  auto g = [&](const Vec3& x) -> Vec3 { return map_point(params, x) - x; };

  std::vector<FixedPointResult> out;
  out.reserve(seeds.size());
  for (const Vec3& seed : seeds) {
    FixedPointResult res{seed, seed, 0.0, false, 0};
    Vec3 x = seed;
    Vec3 gx = g(x);
    double norm = gx.cwiseAbs().maxCoeff();
    int step = 0;
    while (std::isfinite(norm) && norm >= kTol && step < kMaxSteps) {
      Mat3 jac;
      for (int j = 0; j < 3; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
        Vec3 hi = x, lo = x;
        hi[j] += h;
        lo[j] -= h;
        jac.col(j) = (g(hi) - g(lo)) / (2.0 * h);
      }
      Eigen::FullPivLU<Mat3> lu(jac);
      if (!lu.isInvertible()) break;
      const Vec3 dx = lu.solve(-gx);
      double t = 1.0;
      Vec3 trial = x + dx;
      Vec3 gt = g(trial);
      double trial_norm = gt.cwiseAbs().maxCoeff();
      while (!(trial_norm < norm) && t > 1e-10) {
        t *= 0.5;
        trial = x + t * dx;
        gt = g(trial);
        trial_norm = gt.cwiseAbs().maxCoeff();
      }
      if (!(trial_norm < norm)) break;
      x = trial;
      gx = gt;
      norm = trial_norm;
      ++step;
    }
    res.point = x;
    res.residual = fixed_point_residual(params, x);
    res.converged = res.residual < kTol;
    res.iterations = step;
    out.push_back(res);
  }
  return out;
}

Mat3 jacobian_at(const ModelParams& params, const Vec3& p) {
  require_two_users(params);
  const double a = params.alpha(), s1 = params.xi(0), s2 = params.xi(1);
  const double v = p[0], x1 = p[1], x2 = p[2];
  Mat3 j;
  // clang-format off
  j <<  a,        s1,      -s2,
       -s1 * x1, -s1 * v,  -s2,
        s2 * x2,  s1,       s2 * v;
  // clang-format on
  return j;
}

CharCoeffs characteristic_coeffs(double alpha, double xi1, double xi2) {
  return {-(alpha - xi1 + xi2), 1.5 * alpha * (xi2 - xi1),
          2.0 * alpha * xi1 * xi2};
}

RouthVerdict routh_classify(const CharCoeffs& c) {
  if (!(c.P > 0.0 && c.Q > 0.0 && c.R > 0.0)) return RouthVerdict::unstable;
  const double pq = c.P * c.Q;
  if (std::abs(pq - c.R) <= 1e-12 * std::max(std::abs(pq), std::abs(c.R))) {
    return RouthVerdict::marginal;
  }
  return pq > c.R ? RouthVerdict::stable : RouthVerdict::unstable;
}

bool claimed_stability_window(const ModelParams& params) {
  require_two_users(params);
  const double gap = params.xi(1) - params.xi(0);
  return 0.0 < params.alpha() && params.alpha() < gap && gap <= 1.0;
}

double hopf_alpha(double xi1, double xi2) {
  const double d = xi1 - xi2;
  if (d == 0.0) {
    throw SingularParameters("hopf_alpha undefined for xi1 == xi2");
  }
  return (3.0 * d * d + 4.0 * xi1 * xi2) / (3.0 * d);
}

std::complex<double> characteristic_polynomial(const Mat3& j,
                                               std::complex<double> lambda) {
  Eigen::Matrix3cd m = j.cast<std::complex<double>>();
  m.diagonal().array() -= lambda;
  return m.determinant();
}

StabilityReport stability_report(const ModelParams& params, const Vec3& point) {
  StabilityReport rep;
  rep.fixed_point = point;
  rep.residual = fixed_point_residual(params, point);
  rep.jacobian = jacobian_at(params, point);
  rep.char_coeffs = characteristic_coeffs(params);
  rep.routh_verdict = routh_classify(rep.char_coeffs);

  Eigen::EigenSolver<Mat3> es(rep.jacobian, false);
  const auto ev = es.eigenvalues();
  double radius = 0.0;
  for (int i = 0; i < 3; ++i) {
    rep.eigenvalues[i] = ev[i];
    radius = std::max(radius, std::abs(ev[i]));
  }
  constexpr double kUnitTol = 1e-12;
  if (radius < 1.0 - kUnitTol) {
    rep.modulus_verdict = ModulusVerdict::inside_unit_circle;
  } else if (radius > 1.0 + kUnitTol) {
    rep.modulus_verdict = ModulusVerdict::outside;
  } else {
    rep.modulus_verdict = ModulusVerdict::on_unit_circle;
  }
  return rep;
}

std::array<double, 3> tangent_log_stretch(const ModelParams& params,
                                          const Vec3& s0, std::size_t steps) {
  require_two_users(params);
  if (!point_within_bound(s0)) throw Divergence(0);
  Vec3 point = s0;
  Mat3 frame = Mat3::Identity();
  std::array<double, 3> sums{};
  for (std::size_t l = 0; l < steps; ++l) {
    tangent_step(params, point, frame, sums, l);
  }
  return sums;
}

LyapunovSpectrum lyapunov_spectrum(const ModelParams& params, const Vec3& s0,
                                   std::size_t iterations) {
  require_two_users(params);
  if (iterations < kMinLyapunovIterations) {
    throw std::invalid_argument("lyapunov_spectrum needs >= 1000 iterations");
  }
  if (!point_within_bound(s0)) throw Divergence(0);

  LyapunovSpectrum out;
  out.iterations = iterations;
  out.history.reserve(iterations / kHistoryStride + 1);
  Vec3 point = s0;
  Mat3 frame = Mat3::Identity();
  std::array<double, 3> sums{};
  auto estimate = [&](std::size_t l) {
    std::array<double, 3> e;
    for (int i = 0; i < 3; ++i) e[i] = sums[i] / static_cast<double>(l);
    return sorted_desc(e);
  };
  for (std::size_t l = 0; l < iterations; ++l) {
    tangent_step(params, point, frame, sums, l);
    if ((l + 1) % kHistoryStride == 0) out.history.push_back(estimate(l + 1));
  }
  out.exponents = estimate(iterations);
  if (out.history.empty() || out.history.back() != out.exponents) {
    out.history.push_back(out.exponents);
  }
  return out;
}

std::array<double, 3> direct_lyapunov_estimate(const ModelParams& params,
                                               const Vec3& s0,
                                               std::size_t steps) {
  require_two_users(params);
  if (steps == 0) throw std::invalid_argument("steps must be >= 1");
  Vec3 point = s0;
  Mat3 j = Mat3::Identity();
  for (std::size_t l = 0; l < steps; ++l) {
    j = jacobian_at(params, point) * j;
    point = map_point(params, point);
    if (!point_within_bound(point)) throw Divergence(l + 1);
  }
  // Eigenvalues of J J^T are the squared singular values of J.
  const Eigen::JacobiSVD<Mat3> svd(j);
  std::array<double, 3> out;
  for (int i = 0; i < 3; ++i) {
    out[i] = std::log(svd.singularValues()[i]) / static_cast<double>(steps);
  }
  return sorted_desc(out);
}

AttractorKind classify_attractor(const LyapunovSpectrum& spectrum,
                                 double zero_band) {
  if (!(zero_band > 0.0)) throw std::invalid_argument("zero_band must be > 0");
  const double top = spectrum.exponents[0];
  if (top > zero_band) return AttractorKind::chaotic;
  if (std::abs(top) <= zero_band) return AttractorKind::quasiperiodic;
  return AttractorKind::fixed_or_periodic;
}

std::string to_string(RouthVerdict v) {
  switch (v) {
    case RouthVerdict::stable: return "stable";
    case RouthVerdict::marginal: return "marginal";
    case RouthVerdict::unstable: return "unstable";
  }
  return "?";
}

std::string to_string(ModulusVerdict v) {
  switch (v) {
    case ModulusVerdict::inside_unit_circle: return "inside-unit-circle";
    case ModulusVerdict::on_unit_circle: return "on";
    case ModulusVerdict::outside: return "outside";
  }
  return "?";
}

std::string to_string(AttractorKind k) {
  switch (k) {
    case AttractorKind::fixed_or_periodic: return "fixed/periodic";
    case AttractorKind::quasiperiodic: return "quasiperiodic";
    case AttractorKind::chaotic: return "chaotic";
  }
  return "?";
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::alpha: return "alpha";
    case SweepParameter::xi1: return "xi1";
    case SweepParameter::xi2: return "xi2";
  }
  return "?";
}

std::optional<SweepParameter> parse_sweep_parameter(const std::string& name) {
  if (name == "alpha") return SweepParameter::alpha;
  if (name == "xi1") return SweepParameter::xi1;
  if (name == "xi2") return SweepParameter::xi2;
  return std::nullopt;
}

std::vector<double> sweep_grid(const SweepSpec& sweep) {
  if (sweep.points == 0) throw std::invalid_argument("sweep needs points >= 1");
  if (sweep.points == 1) {
    if (sweep.lo != sweep.hi) {
      throw std::invalid_argument("single-point sweep requires lo == hi");
    }
    return {sweep.lo};
  }
  if (!(sweep.lo < sweep.hi)) throw std::invalid_argument("sweep needs lo < hi");
  std::vector<double> grid(sweep.points);
  const double span = sweep.hi - sweep.lo;
  const double last = static_cast<double>(sweep.points - 1);
  for (std::size_t k = 0; k < sweep.points; ++k) {
    grid[k] = sweep.lo + span * (static_cast<double>(k) / last);
  }
  grid.back() = sweep.hi;
  return grid;
}

namespace {

ModelParams apply_sweep(const ModelParams& base, SweepParameter p,
                        double value) {
  switch (p) {
    case SweepParameter::alpha: return base.with_alpha(value);
    case SweepParameter::xi1: return base.with_xi(0, value);
    case SweepParameter::xi2: return base.with_xi(1, value);
  }
  return base;
}

}  // namespace

BifurcationScan bifurcation_scan(const ModelParams& base,
                                 const SweepSpec& sweep, const Vec3& s0,
                                 const BifurcationOptions& options) {
  require_two_users(base);
  BifurcationScan scan{sweep.parameter, sweep_grid(sweep), base, {}};
  // Validate every grid value up front so bad sweeps fail before any work.
  for (double v : scan.grid) apply_sweep(base, sweep.parameter, v);
  if (options.lyapunov_iterations < kMinLyapunovIterations) {
    throw std::invalid_argument("lyapunov_iterations must be >= " +
                                std::to_string(kMinLyapunovIterations));
  }
  scan.points.resize(scan.grid.size());

  detail::parallel_for(scan.grid.size(), options.workers, [&](std::size_t k) {
    BifurcationPoint& bp = scan.points[k];
    bp.value = scan.grid[k];
    const ModelParams params = apply_sweep(base, sweep.parameter, bp.value);
    try {
      Vec3 point = s0;
      std::size_t stage = 0;
      auto advance = [&] {
        point = map_point(params, point);
        ++stage;
        if (!point_within_bound(point)) throw Divergence(stage);
      };
      for (std::size_t l = 0; l < options.transient; ++l) advance();
      bp.v_samples.reserve(options.samples);
      const Vec3 post_transient = point;
      for (std::size_t l = 0; l < options.samples; ++l) {
        advance();
        bp.v_samples.push_back(point[0]);
      }
      try {
        bp.largest_exponent =
            lyapunov_spectrum(params, post_transient,
                              options.lyapunov_iterations)
                .exponents[0];
      } catch (const Divergence& d) {
        throw Divergence(options.transient + d.stage());
      }
    } catch (const Divergence& d) {
      bp.diverged = true;
      bp.divergence_stage = d.stage();
      bp.largest_exponent = std::numeric_limits<double>::quiet_NaN();
    }
  });
  return scan;
}

}  // namespace cloudchaos
