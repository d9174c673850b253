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

// Cyclic primary/secondary placement over an owner rack and a user rack,
// and the generating-polynomial data-loss model built on it.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace cloudchaos {

using BigInt = mpz_class;
using BigRational = mpq_class;

enum class Rack { owner, user };
enum class ReplicaKind { primary, secondary1, secondary2 };
/// Chunk-set halves. Primaries are split A/B over two machines; S1 entries
/// host half A of their node and S2 entries host half B.
enum class Half { a, b };

struct ReplicaRef {
  ReplicaKind kind = ReplicaKind::primary;
  std::size_t node = 1;  // 1-based node label

  std::string label() const;  // "P_1", "S1_2", "S2_3"
  friend bool operator==(const ReplicaRef&, const ReplicaRef&) = default;
};

struct Machine {
  std::size_t id = 0;
  Rack rack = Rack::owner;
  std::size_t block = 1;  // 1-based block index within its rack
  ReplicaRef replica;
  std::size_t node = 1;  // node whose chunk half this machine stores
  Half half = Half::a;
};

struct Block {
  Rack rack = Rack::owner;
  std::size_t index = 1;  // 1-based
  std::array<ReplicaRef, 3> members;
  std::vector<std::size_t> machine_ids;
};

/// Machines of node i (1-based) occupy ids 7(i-1) .. 7(i-1)+6: four for
/// owner block i (P half A, P half B, S1 entry, S2 entry) followed by three
/// for user block i.
inline constexpr std::size_t kMachinesPerGroup = 7;
inline constexpr std::size_t kOwnerMachinesPerBlock = 4;
inline constexpr std::size_t kUserMachinesPerBlock = 3;

struct PlacementPlan {
  std::size_t n = 0;
  std::vector<Block> owner_blocks;
  std::vector<Block> user_blocks;
  std::vector<Machine> machines;

  /// Machine ids holding the given half of node (1-based).
  std::vector<std::size_t> hosts_of(std::size_t node, Half half) const;
};

/// owner block i = {P_i, S1_(i+1), S2_(i+2)}, user block i =
/// {S1_i, S2_(i+1), S1_(i+2)}, indices cyclic mod n; 7n machines.
/// Throws TooFewNodes for n < 3.
PlacementPlan build_placement(std::size_t n);

/// One line per block: "<rack> <index> <labels,...> <machine ids,...>".
std::string render_plan_text(const PlacementPlan& plan);

/// Per-group survival coefficients a_0..a_5 = (1, 7, 21, 34, 30, 12):
///   a_1 = C(7,6), a_2 = C(7,5), a_3 = C(7,4) - 1,
///   a_4 = C(7,3) - C(4,3) - 1, a_5 = C(7,2) - C(4,2) - C(3,2).
std::array<std::uint64_t, 6> base_polynomial();

/// Exact coefficients of (1 + a_1 x + ... + a_5 x^5)^n, length 5n + 1.
std::vector<BigInt> loss_polynomial(std::size_t n);

BigInt binomial(std::size_t n, std::size_t k);

/// coeff(x^f) / C(7n, f) as an exact reduced fraction (0 for f > 5n).
BigRational no_loss_fraction(std::size_t n, std::size_t f);
double prob_no_loss(std::size_t n, std::size_t f);

/// C(7n, f) p^f (1-p)^(7n-f), evaluated exactly from the binary value of p.
double prob_f_failures(std::size_t n, std::size_t f, double p);

enum class LossMethod { exact_bigint, log_domain, closed_form };

std::string to_string(LossMethod m);
std::optional<LossMethod> parse_loss_method(const std::string& name);

struct LossResult {
  double p_loss = 0.0;
  LossMethod method = LossMethod::exact_bigint;
  std::vector<double> per_f_terms;  // index f; filled on request
};

/// Probability that at least one group loses data when each of the 7n
/// machines fails independently with probability p.
///  exact_bigint: sum over f of [C(7n,f) - coeff(x^f)] p^f (1-p)^(7n-f) with
///                p taken as its exact dyadic value; rounded once at the end.
///  log_domain:   the same sum with log-space terms and compensated summation.
///  closed_form:  1 - (1 - p^3 - p^4 + p^7)^n via log1p/expm1.
LossResult prob_data_loss(std::size_t n, double p, LossMethod method,
                          bool with_terms = false);

struct LossCurveRow {
  std::size_t n = 0;
  double p = 0.0;
  double p_loss_exact = 0.0;
  double p_loss_closed_form = 0.0;
};

std::vector<LossCurveRow> loss_curve(const std::vector<std::size_t>& n_list,
                                     double p, unsigned workers = 0);

}  // namespace cloudchaos
