// Copyright 2026 The pirpsi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exact download-cost formulas and cache-allocation optimizers.
//
// For N databases, K messages and M cached messages with prefix ratios
// r_1 >= ... >= r_M the optimal normalized download cost is
//
//   D* = sum_{i=0}^{K-1-M} N^-i + sum_{i=1}^{M} (1 - r_i) / N^(K-i).
//
// When M = K the leading sum is empty.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pirpsi/errors.hpp"
#include "pirpsi/rational.hpp"

namespace pirpsi {

struct CostQuery {
  std::uint32_t n = 2;
  std::uint32_t k = 1;
  std::uint32_t m = 0;
  std::vector<Rational> ratios;  // non-increasing, length m

  void validate() const {
    if (n < 2) throw ValidationError("N must be at least 2");
    if (k < 1) throw ValidationError("K must be at least 1");
    if (m > k) throw ValidationError("M exceeds K");
    if (ratios.size() != m) {
      throw ValidationError("expected " + std::to_string(m) + " ratios, got " +
                            std::to_string(ratios.size()));
    }
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      if (ratios[i] < Rational(0) || ratios[i] > Rational(1)) {
        throw ValidationError("ratio " + ratios[i].str() + " outside [0, 1]");
      }
      if (i > 0 && ratios[i] > ratios[i - 1]) {
        throw ValidationError("ratios must be sorted non-increasing");
      }
    }
  }
};

struct AllocationResult {
  std::uint32_t m = 0;
  std::vector<Rational> ratios;
  Rational cost;
};

// sum_{i=0}^{terms-1} N^-i.
inline Rational geometric_prefix(std::uint32_t n, std::uint32_t terms) {
  Rational sum;
  for (std::uint32_t i = 0; i < terms; ++i) sum += inverse_power(n, i);
  return sum;
}

inline Rational normalized_cost(const CostQuery& q) {
  q.validate();
  Rational cost = geometric_prefix(q.n, q.k - q.m);
  for (std::uint32_t i = 1; i <= q.m; ++i) {
    cost += (Rational(1) - q.ratios[i - 1]) * inverse_power(q.n, q.k - i);
  }
  return cost;
}

// Cost of plain replicated-database PIR (nothing cached).
inline Rational classic_cost(std::uint32_t n, std::uint32_t k) {
  if (k < 1) throw ValidationError("K must be at least 1");
  return geometric_prefix(n, k);
}

// Cost with M messages fully known as side information. M = K gives 0.
inline Rational psi_cost(std::uint32_t n, std::uint32_t k, std::uint32_t m) {
  if (m > k) throw ValidationError("M exceeds K");
  return geometric_prefix(n, k - m);
}

// Lower bound built from the converse recursion rather than the closed form.
//
// Messages are relabelled so that W_1..W_M are the cached ones and W_K is
// the desired one. Starting from I = 0 the interference term obeys
//   I <- I / N + (1 - r_k) / N   for k = 1..K-1,  r_k = 0 for k > M,
// and the bound is (1 - r_K) + I, the first term being the part of the
// desired message not already held.
inline Rational converse_bound(const CostQuery& q) {
  q.validate();
  const Rational inv_n(1, q.n);
  auto ratio = [&](std::uint32_t k) {
    return k <= q.m ? q.ratios[k - 1] : Rational(0);
  };
  Rational interference;
  for (std::uint32_t k = 1; k + 1 <= q.k; ++k) {
    interference = interference * inv_n + (Rational(1) - ratio(k)) * inv_n;
  }
  return (Rational(1) - ratio(q.k)) + interference;
}

// Uniform allocation r_i = S/M, optimal for fixed M.
inline AllocationResult optimize_fixed_m(std::uint32_t n, std::uint32_t k,
                                         const Rational& s, std::uint32_t m) {
  if (s < Rational(0)) throw ValidationError("budget must be non-negative");
  if (m > k) throw ValidationError("M exceeds K");
  if (s > Rational(m)) {
    throw ValidationError("budget " + s.str() + " exceeds M = " +
                          std::to_string(m));
  }
  AllocationResult out;
  out.m = m;
  if (m > 0) out.ratios.assign(m, s / Rational(m));
  out.cost = normalized_cost({n, k, m, out.ratios});
  return out;
}

// Exhaustive search over sorted ratio vectors on the grid {0, step, .., 1}
// summing to s. Ties in cost resolve to the lexicographically smallest
// ratio vector.
inline AllocationResult brute_force_allocation(std::uint32_t n,
                                               std::uint32_t k,
                                               const Rational& s,
                                               std::uint32_t m,
                                               const Rational& grid_step,
                                               std::size_t* minimizer_count =
                                                   nullptr) {
  if (grid_step <= Rational(0)) throw ValidationError("grid step must be > 0");
  if (m > k) throw ValidationError("M exceeds K");
  const Rational units_per_one = Rational(1) / grid_step;
  const Rational budget_units = s / grid_step;
  if (!units_per_one.is_integer() || !budget_units.is_integer()) {
    throw ValidationError("grid step must divide both 1 and the budget");
  }
  const auto top = static_cast<std::int64_t>(units_per_one.num());
  const auto total = static_cast<std::int64_t>(budget_units.num());
  if (total < 0 || total > top * static_cast<std::int64_t>(m)) {
    throw ValidationError("no grid point satisfies the budget");
  }

  bool found = false;
  std::size_t ties = 0;
  AllocationResult best;
  std::vector<std::int64_t> units(m);

  auto consider = [&] {
    std::vector<Rational> ratios;
    ratios.reserve(m);
    for (auto u : units) ratios.push_back(Rational(u) * grid_step);
    Rational cost = normalized_cost({n, k, m, ratios});
    if (!found || cost < best.cost) {
      best = {m, std::move(ratios), std::move(cost)};
      found = true;
      ties = 1;
    } else if (cost == best.cost) {
      ++ties;
      if (ratios < best.ratios) best.ratios = std::move(ratios);
    }
  };
  // units[0] >= units[1] >= ... with the remaining budget spread over the
  // remaining slots.
  auto recurse = [&](auto&& self, std::size_t slot, std::int64_t cap,
                     std::int64_t remaining) -> void {
    if (slot == m) {
      if (remaining == 0) consider();
      return;
    }
    const auto slots_left = static_cast<std::int64_t>(m - slot);
    for (std::int64_t u = std::min(cap, remaining); u >= 0; --u) {
      if (u * slots_left < remaining) break;
      units[slot] = u;
      self(self, slot + 1, u, remaining - u);
    }
  };
  recurse(recurse, 0, top, total);
  if (!found) throw ValidationError("grid is empty");
  if (minimizer_count != nullptr) *minimizer_count = ties;
  return best;
}

// All uniform schemes M = ceil(S)..K with their costs.
inline std::vector<AllocationResult> uniform_candidates(std::uint32_t n,
                                                        std::uint32_t k,
                                                        const Rational& s) {
  if (s < Rational(0) || s > Rational(k)) {
    throw ValidationError("budget must lie in [0, K]");
  }
  std::vector<AllocationResult> out;
  const auto lo = static_cast<std::uint32_t>(s.ceil());
  for (std::uint32_t m = lo; m <= k; ++m) {
    out.push_back(optimize_fixed_m(n, k, s, m));
  }
  return out;
}

// Best uniform scheme, which is always M = K. Checks that cost is
// non-increasing in M along the way.
inline AllocationResult best_uniform(std::uint32_t n, std::uint32_t k,
                                     const Rational& s) {
  auto candidates = uniform_candidates(n, k, s);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].cost > candidates[i - 1].cost) {
      throw InternalError("cost increased from M = " +
                          std::to_string(candidates[i - 1].m) + " to M = " +
                          std::to_string(candidates[i].m));
    }
  }
  return candidates.back();
}

}  // namespace pirpsi
