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

#include "cloudchaos/replication.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cloudchaos/errors.hpp"
#include "parallel.hpp"

namespace cloudchaos {

std::string ReplicaRef::label() const {
  switch (kind) {
    case ReplicaKind::primary: return "P_" + std::to_string(node);
    case ReplicaKind::secondary1: return "S1_" + std::to_string(node);
    case ReplicaKind::secondary2: return "S2_" + std::to_string(node);
  }
  return "?";
}

std::vector<std::size_t> PlacementPlan::hosts_of(std::size_t node,
                                                 Half half) const {
  std::vector<std::size_t> ids;
  for (const Machine& m : machines) {
    if (m.node == node && m.half == half) ids.push_back(m.id);
  }
  return ids;
}

PlacementPlan build_placement(std::size_t n) {
  if (n < 3) throw TooFewNodes(n);
  // 1-based cyclic successor: wrap(i + k) for i in 1..n.
  auto wrap = [n](std::size_t i) { return (i - 1) % n + 1; };

  PlacementPlan plan;
  plan.n = n;
  plan.machines.reserve(kMachinesPerGroup * n);
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t base = kMachinesPerGroup * (i - 1);
    const ReplicaRef p{ReplicaKind::primary, i};
    const ReplicaRef s1{ReplicaKind::secondary1, wrap(i + 1)};
    const ReplicaRef s2{ReplicaKind::secondary2, wrap(i + 2)};
    plan.owner_blocks.push_back(
        {Rack::owner, i, {p, s1, s2}, {base, base + 1, base + 2, base + 3}});
    plan.machines.push_back({base, Rack::owner, i, p, p.node, Half::a});
    plan.machines.push_back({base + 1, Rack::owner, i, p, p.node, Half::b});
    plan.machines.push_back({base + 2, Rack::owner, i, s1, s1.node, Half::a});
    plan.machines.push_back({base + 3, Rack::owner, i, s2, s2.node, Half::b});

    const ReplicaRef u1{ReplicaKind::secondary1, i};
    const ReplicaRef u2{ReplicaKind::secondary2, wrap(i + 1)};
    const ReplicaRef u3{ReplicaKind::secondary1, wrap(i + 2)};
    plan.user_blocks.push_back(
        {Rack::user, i, {u1, u2, u3}, {base + 4, base + 5, base + 6}});
    plan.machines.push_back({base + 4, Rack::user, i, u1, u1.node, Half::a});
    plan.machines.push_back({base + 5, Rack::user, i, u2, u2.node, Half::b});
    plan.machines.push_back({base + 6, Rack::user, i, u3, u3.node, Half::a});
  }
  return plan;
}

std::string render_plan_text(const PlacementPlan& plan) {
  std::ostringstream os;
  auto emit = [&](const Block& b) {
    os << (b.rack == Rack::owner ? "owner" : "user") << ' ' << b.index << ' ';
    for (std::size_t k = 0; k < b.members.size(); ++k) {
      os << (k ? "," : "") << b.members[k].label();
    }
    os << ' ';
    for (std::size_t k = 0; k < b.machine_ids.size(); ++k) {
      os << (k ? "," : "") << b.machine_ids[k];
    }
    os << '\n';
  };
  for (const Block& b : plan.owner_blocks) emit(b);
  for (const Block& b : plan.user_blocks) emit(b);
  return os.str();
}

BigInt binomial(std::size_t n, std::size_t k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

std::array<std::uint64_t, 6> base_polynomial() {
  auto c = [](std::size_t n, std::size_t k) { return binomial(n, k).get_ui(); };
  return {1,
          c(7, 6),
          c(7, 5),
          c(7, 4) - 1,
          c(7, 3) - c(4, 3) - 1,
          c(7, 2) - c(4, 2) - c(3, 2)};
}

std::vector<BigInt> loss_polynomial(std::size_t n) {
  if (n < 1) throw std::invalid_argument("loss_polynomial needs n >= 1");
  const auto a = base_polynomial();
  std::vector<BigInt> poly{1};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<BigInt> next(poly.size() + a.size() - 1);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      for (std::size_t j = 0; j < a.size(); ++j) {
        next[i + j] += poly[i] * a[j];
      }
    }
    poly = std::move(next);
  }
  return poly;
}

BigRational no_loss_fraction(std::size_t n, std::size_t f) {
  const std::size_t machines = kMachinesPerGroup * n;
  if (f > machines) throw std::out_of_range("f exceeds machine count");
  if (f > 5 * n) return BigRational(0);
  const auto poly = loss_polynomial(n);
  BigRational q(poly[f], binomial(machines, f));
  q.canonicalize();
  return q;
}

double prob_no_loss(std::size_t n, std::size_t f) {
  return no_loss_fraction(n, f).get_d();
}

namespace {

void require_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("p must lie in [0, 1]");
  }
}

// p = num / den exactly, den a power of two.
struct Dyadic {
  BigInt num, den, complement;  // complement = den - num
};

Dyadic dyadic(double p) {
  BigRational q(p);
  return {q.get_num(), q.get_den(), q.get_den() - q.get_num()};
}

BigInt pow_big(const BigInt& base, std::size_t e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

double ratio(const BigInt& num, const BigInt& den) {
  BigRational q(num, den);
  q.canonicalize();
  return q.get_d();
}

// Number of fatal f-subsets of the 7n machines: C(7n, f) - coeff(x^f).
std::vector<BigInt> fatal_counts(std::size_t n) {
  const std::size_t machines = kMachinesPerGroup * n;
  const auto poly = loss_polynomial(n);
  std::vector<BigInt> d(machines + 1);
  BigInt c = 1;
  for (std::size_t f = 0; f <= machines; ++f) {
    d[f] = c - (f < poly.size() ? poly[f] : BigInt(0));
    c = c * (machines - f) / (f + 1);
  }
  return d;
}

double log_big(const BigInt& z) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

LossResult exact_loss(std::size_t n, double p, bool with_terms) {
  const std::size_t machines = kMachinesPerGroup * n;
  const auto d = fatal_counts(n);
  const Dyadic q = dyadic(p);
  LossResult res{0.0, LossMethod::exact_bigint, {}};

  // sum_f d_f a^f b^(N-f) by homogeneous Horner, over den^N.
  BigInt acc = d[machines];
  BigInt bpow = 1;
  for (std::size_t f = machines; f-- > 0;) {
    bpow *= q.complement;
    acc = acc * q.num + d[f] * bpow;
  }
  const BigInt denom = pow_big(q.den, machines);
  res.p_loss = ratio(acc, denom);

  if (with_terms) {
    res.per_f_terms.resize(machines + 1);
    for (std::size_t f = 0; f <= machines; ++f) {
      if (d[f] == 0) continue;
      res.per_f_terms[f] =
          ratio(d[f] * pow_big(q.num, f) * pow_big(q.complement, machines - f),
                denom);
    }
  }
  return res;
}

LossResult log_domain_loss(std::size_t n, double p, bool with_terms) {
  const std::size_t machines = kMachinesPerGroup * n;
  LossResult res{0.0, LossMethod::log_domain, {}};
  if (with_terms) res.per_f_terms.assign(machines + 1, 0.0);
  if (p == 0.0) return res;
  if (p == 1.0) {
    res.p_loss = 1.0;
    if (with_terms) res.per_f_terms[machines] = 1.0;
    return res;
  }
  const auto d = fatal_counts(n);
  const double lp = std::log(p), lq = std::log1p(-p);
  std::vector<double> logs(machines + 1, -INFINITY);
  double top = -INFINITY;
  for (std::size_t f = 0; f <= machines; ++f) {
    if (d[f] == 0) continue;
    logs[f] = log_big(d[f]) + static_cast<double>(f) * lp +
              static_cast<double>(machines - f) * lq;
    top = std::max(top, logs[f]);
  }
  // Neumaier-compensated sum of exp(logs - top).
  double sum = 0.0, comp = 0.0;
  for (double l : logs) {
    if (l == -INFINITY) continue;
    const double t = std::exp(l - top);
    const double s = sum + t;
    comp += std::abs(sum) >= std::abs(t) ? (sum - s) + t : (t - s) + sum;
    sum = s;
  }
  res.p_loss = std::min(1.0, std::exp(top) * (sum + comp));
  if (with_terms) {
    for (std::size_t f = 0; f <= machines; ++f) {
      if (logs[f] != -INFINITY) res.per_f_terms[f] = std::exp(logs[f]);
    }
  }
  return res;
}

LossResult closed_form_loss(std::size_t n, double p) {
  const double p3 = p * p * p;
  const double fatal_group = p3 + p3 * p - p3 * p3 * p;
  const double loss =
      -std::expm1(static_cast<double>(n) * std::log1p(-fatal_group));
  return {loss, LossMethod::closed_form, {}};
}

}  // namespace

double prob_f_failures(std::size_t n, std::size_t f, double p) {
  require_probability(p);
  const std::size_t machines = kMachinesPerGroup * n;
  if (f > machines) return 0.0;
  const Dyadic q = dyadic(p);
  return ratio(binomial(machines, f) * pow_big(q.num, f) *
                   pow_big(q.complement, machines - f),
               pow_big(q.den, machines));
}

std::string to_string(LossMethod m) {
  switch (m) {
    case LossMethod::exact_bigint: return "exact-bigint";
    case LossMethod::log_domain: return "log-domain";
    case LossMethod::closed_form: return "closed-form";
  }
  return "?";
}

std::optional<LossMethod> parse_loss_method(const std::string& name) {
  if (name == "exact-bigint" || name == "exact") return LossMethod::exact_bigint;
  if (name == "log-domain" || name == "log") return LossMethod::log_domain;
  if (name == "closed-form" || name == "closed") return LossMethod::closed_form;
  return std::nullopt;
}

LossResult prob_data_loss(std::size_t n, double p, LossMethod method,
                          bool with_terms) {
  if (n < 1) throw std::invalid_argument("prob_data_loss needs n >= 1");
  require_probability(p);
  switch (method) {
    case LossMethod::exact_bigint: return exact_loss(n, p, with_terms);
    case LossMethod::log_domain: return log_domain_loss(n, p, with_terms);
    case LossMethod::closed_form: return closed_form_loss(n, p);
  }
  throw std::invalid_argument("unknown loss method");
}

std::vector<LossCurveRow> loss_curve(const std::vector<std::size_t>& n_list,
                                     double p, unsigned workers) {
  if (n_list.empty()) throw std::invalid_argument("n_list must be nonempty");
  require_probability(p);
  for (std::size_t n : n_list) {
    if (n < 1) throw std::invalid_argument("node counts must be >= 1");
  }
  std::vector<LossCurveRow> rows(n_list.size());
  detail::parallel_for(n_list.size(), workers, [&](std::size_t k) {
    const std::size_t n = n_list[k];
    rows[k] = {n, p, prob_data_loss(n, p, LossMethod::exact_bigint).p_loss,
               prob_data_loss(n, p, LossMethod::closed_form).p_loss};
  });
  return rows;
}

}  // namespace cloudchaos
