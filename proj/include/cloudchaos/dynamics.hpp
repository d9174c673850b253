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

// Stability, Lyapunov and bifurcation analysis of the two-user map.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cloudchaos/model.hpp"

namespace cloudchaos {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Image of (v_c, x1, x2) under the two-user map; no divergence check.
Vec3 map_point(const ModelParams& params, const Vec3& point);

/// Max-norm of F(X) - X.
double fixed_point_residual(const ModelParams& params, const Vec3& point);

/// The closed-form second fixed point (1, -alpha/(2 xi1), alpha/(2 xi2)) as
/// published for this map. It generally does not satisfy F(X) = X; use
/// fixed_point_residual to see by how much.
Vec3 claimed_fixed_point(const ModelParams& params);

struct FixedPointResult {
  Vec3 seed;
  Vec3 point;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Damped Newton on F(X) - X = 0 from every seed, central-difference
/// Jacobian, stopping at residual < 1e-12 or after 200 steps. Seeds that do
/// not converge are returned with converged == false.
std::vector<FixedPointResult> find_fixed_points(const ModelParams& params,
                                                const std::vector<Vec3>& seeds);

/// Tangent map of the two-user map at `point`.
Mat3 jacobian_at(const ModelParams& params, const Vec3& point);

/// Coefficients of lambda^3 + P lambda^2 + Q lambda + R.
struct CharCoeffs {
  double P = 0.0, Q = 0.0, R = 0.0;
};

CharCoeffs characteristic_coeffs(double alpha, double xi1, double xi2);
inline CharCoeffs characteristic_coeffs(const ModelParams& params) {
  return characteristic_coeffs(params.alpha(), params.xi(0), params.xi(1));
}

enum class RouthVerdict { stable, marginal, unstable };
enum class ModulusVerdict { inside_unit_circle, on_unit_circle, outside };

/// Routh conditions as stated: stable iff P, Q, R > 0 and PQ > R; marginal
/// when PQ == R (relative 1e-12) with P, Q, R > 0.
RouthVerdict routh_classify(const CharCoeffs& c);

/// 0 < alpha < xi2 - xi1 <= 1, the stability window quoted for the claimed
/// fixed point. Kept separate: it does not follow from routh_classify.
bool claimed_stability_window(const ModelParams& params);

/// alpha at which PQ = R, i.e. [3(xi1-xi2)^2 + 4 xi1 xi2] / [3(xi1-xi2)].
/// Throws SingularParameters when xi1 == xi2.
double hopf_alpha(double xi1, double xi2);

struct StabilityReport {
  Vec3 fixed_point;
  double residual = 0.0;
  Mat3 jacobian;
  CharCoeffs char_coeffs;
  RouthVerdict routh_verdict = RouthVerdict::unstable;
  ModulusVerdict modulus_verdict = ModulusVerdict::outside;
  std::array<std::complex<double>, 3> eigenvalues;
};

/// Eigen-analysis of jacobian_at(point) plus the Routh verdict on the
/// published cubic. The residual is reported as computed.
StabilityReport stability_report(const ModelParams& params, const Vec3& point);

/// det(J - lambda I); used to check eigenvalues against the stored Jacobian.
std::complex<double> characteristic_polynomial(const Mat3& jacobian,
                                               std::complex<double> lambda);

struct LyapunovSpectrum {
  std::array<double, 3> exponents{};  // nats per iteration, descending
  std::size_t iterations = 0;
  std::vector<std::array<double, 3>> history;  // every kHistoryStride steps
};

inline constexpr std::size_t kHistoryStride = 100;
inline constexpr std::size_t kMinLyapunovIterations = 1000;

/// Lyapunov exponents by propagating an orthonormal tangent frame and
/// re-orthonormalising (Householder QR) every step. iterations >= 1000.
/// Log stretch factors are floored at log(DBL_MIN) when the tangent map is
/// singular. Throws Divergence if the orbit leaves the bound.
LyapunovSpectrum lyapunov_spectrum(const ModelParams& params, const Vec3& s0,
                                   std::size_t iterations);

/// (1/2l) log(J Jt) with J the plain product of tangent maps over `steps`
/// iterations; eigenvalues sorted descending. Overflows for long runs, so
/// only meaningful for short horizons (tens of steps).
std::array<double, 3> direct_lyapunov_estimate(const ModelParams& params,
                                               const Vec3& s0,
                                               std::size_t steps);

/// Running sums of per-direction log stretch over `steps` QR steps, no
/// normalisation by step count. Shares the kernel of lyapunov_spectrum.
std::array<double, 3> tangent_log_stretch(const ModelParams& params,
                                          const Vec3& s0, std::size_t steps);

enum class AttractorKind { fixed_or_periodic, quasiperiodic, chaotic };

inline constexpr double kDefaultZeroBand = 0.01;

AttractorKind classify_attractor(const LyapunovSpectrum& spectrum,
                                 double zero_band = kDefaultZeroBand);

std::string to_string(RouthVerdict v);
std::string to_string(ModulusVerdict v);
std::string to_string(AttractorKind k);

enum class SweepParameter { alpha, xi1, xi2 };

std::string to_string(SweepParameter p);
std::optional<SweepParameter> parse_sweep_parameter(const std::string& name);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::alpha;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 2;
};

/// Evenly spaced grid over [lo, hi], endpoints included. points == 1 gives
/// {lo} and requires lo == hi; otherwise lo < hi is required.
std::vector<double> sweep_grid(const SweepSpec& sweep);

struct BifurcationOptions {
  std::size_t transient = 1000;
  std::size_t samples = 100;
  std::size_t lyapunov_iterations = 100000;
  unsigned workers = 0;  // 0 = hardware concurrency
};

struct BifurcationPoint {
  double value = 0.0;
  bool diverged = false;
  std::optional<std::size_t> divergence_stage;
  std::vector<double> v_samples;
  double largest_exponent = 0.0;  // NaN when diverged
};

struct BifurcationScan {
  SweepParameter parameter = SweepParameter::alpha;
  std::vector<double> grid;
  ModelParams fixed_params;
  std::vector<BifurcationPoint> points;
};

/// For every grid value: run `transient` steps from s0, record `samples`
/// further v_c values, then estimate the largest Lyapunov exponent from the
/// post-transient state. Divergent grid points are flagged. Grid points are
/// independent, so the result does not depend on the worker count.
BifurcationScan bifurcation_scan(const ModelParams& base,
                                 const SweepSpec& sweep, const Vec3& s0,
                                 const BifurcationOptions& options = {});

}  // namespace cloudchaos
