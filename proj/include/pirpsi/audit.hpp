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

// Empirical privacy audit.
//
// Answers are a deterministic function of the query and the messages, so
// the only randomized observable a single database has is its query. The
// audit compares the distribution of that query across every (theta, H)
// configuration sharing one cache shape, plus the reply lengths.
//
// Exact mode enumerates all scheme randomness and compares full canonical
// encodings. Sampling mode draws seeded runs and compares small-support
// projections of the query, since the full encoding has far too many
// outcomes to estimate from samples.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pirpsi/errors.hpp"
#include "pirpsi/model.hpp"
#include "pirpsi/random.hpp"
#include "pirpsi/rational.hpp"
#include "pirpsi/retrieval.hpp"

namespace pirpsi {

enum class AuditMode { kExact, kSample };

inline const char* to_string(AuditMode m) {
  return m == AuditMode::kExact ? "exact" : "sample";
}

// Cache shape shared by the configurations being compared.
struct AuditConfig {
  std::uint32_t n = 2;
  std::uint32_t k = 2;
  std::vector<Rational> ratios;  // one per cached message; M = size

  std::uint32_t m() const { return static_cast<std::uint32_t>(ratios.size()); }

  // M messages cached in full.
  static AuditConfig full_side_info(std::uint32_t n, std::uint32_t k,
                                    std::uint32_t m) {
    return {n, k, std::vector<Rational>(m, Rational(1))};
  }
};

// Outcome counts of one observable. Probabilities are count / total, exact
// in enumeration mode and empirical in sampling mode.
struct QueryDistribution {
  AuditMode mode = AuditMode::kExact;
  std::string observable;
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(std::string outcome, std::uint64_t weight = 1) {
    counts[std::move(outcome)] += weight;
    total += weight;
  }
  Rational probability(const std::string& outcome) const {
    auto it = counts.find(outcome);
    if (it == counts.end() || total == 0) return Rational(0);
    return Rational(BigInt(it->second), BigInt(total));
  }
};

// Half the L1 distance over the union support.
inline Rational tv_distance(const QueryDistribution& a,
                            const QueryDistribution& b) {
  if (a.mode != b.mode) {
    throw ValidationError("cannot compare exact and sampled distributions");
  }
  if (a.observable != b.observable) {
    throw ValidationError("distributions describe different observables");
  }
  if (a.total == 0 || b.total == 0) {
    throw ValidationError("empty distribution");
  }
  // sum |ca/ta - cb/tb| = sum |ca*tb - cb*ta| / (ta*tb)
  BigInt acc = 0;
  const BigInt ta(a.total);
  const BigInt tb(b.total);
  auto ia = a.counts.begin();
  auto ib = b.counts.begin();
  while (ia != a.counts.end() || ib != b.counts.end()) {
    BigInt ca = 0;
    BigInt cb = 0;
    if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
      ca = ia->second;
      ++ia;
    } else if (ia == a.counts.end() || ib->first < ia->first) {
      cb = ib->second;
      ++ib;
    } else {
      ca = ia->second;
      cb = ib->second;
      ++ia;
      ++ib;
    }
    BigInt d = ca * tb - cb * ta;
    acc += d < 0 ? BigInt(-d) : d;
  }
  return Rational(acc, 2 * ta * tb);
}

// Distributions of every observable, in a fixed order.
using ObservableSet = std::vector<QueryDistribution>;

namespace detail {

struct AuditSetup {
  SegmentPlan plan;
};

inline AuditSetup audit_setup(MessageId theta, const std::vector<MessageId>& h,
                              const AuditConfig& config) {
  if (theta < 1 || theta > config.k) {
    throw ValidationError("desired message out of range");
  }
  CacheProfile profile = make_profile(config.k, h, config.ratios);
  SystemParams params{config.n, config.k,
                      choose_length(profile, config.n, config.k)};
  return {build_plan(profile, params)};
}

// Full canonical encoding of each database's query.
inline void observe_full(const std::vector<PreparedSegment>& prepared,
                         std::uint32_t n,
                         std::vector<std::string>& out) {
  out.assign(n, std::string());
  for (const auto& p : prepared) {
    const auto& plan = p.transmitted();
    for (std::uint32_t db = 0; db < n; ++db) {
      if (plan.per_database.empty()) {
        out[db] += canonical_encode(DatabaseQuery{});
      } else {
        out[db] += canonical_encode(plan.per_database[db]);
      }
    }
  }
}

// Small-support projections of one database's query, keyed by name.
inline void observe_projections(const std::vector<PreparedSegment>& prepared,
                                std::uint32_t db,
                                std::vector<std::pair<std::string, std::string>>&
                                    out) {
  out.clear();
  std::size_t block_id = 0;
  for (const auto& p : prepared) {
    const auto& plan = p.transmitted();
    if (plan.per_database.empty()) continue;
    for (const auto& b : plan.per_database[db].blocks) {
      const std::string prefix = "b" + std::to_string(block_id++);
      out.emplace_back(prefix + "/shape",
                       std::to_string(static_cast<int>(b.mode)) + ":" +
                           std::to_string(b.parity_count) + ":" +
                           std::to_string(b.requests.size()));
      std::set<std::uint32_t> seen;
      for (const auto& r : b.requests) {
        std::uint32_t support = 0;
        for (const auto& t : r) support |= 1u << (t.message - 1);
        if (!seen.insert(support).second) continue;
        for (const auto& t : r) {
          out.emplace_back(prefix + "/S" + std::to_string(support) + "/m" +
                               std::to_string(t.message),
                           std::to_string(t.symbol));
        }
      }
    }
  }
}

inline std::vector<std::uint64_t> answer_lengths(
    const std::vector<PreparedSegment>& prepared, std::uint32_t n) {
  std::vector<std::uint64_t> out(n, 0);
  for (const auto& p : prepared) {
    const auto& plan = p.transmitted();
    if (plan.per_database.empty()) continue;
    for (std::uint32_t db = 0; db < n; ++db) {
      out[db] += plan.per_database[db].answer_len();
    }
  }
  return out;
}

}  // namespace detail

// Number of randomness outcomes exhaustive enumeration would visit.
inline BigInt randomness_space_size(const SegmentPlan& plan) {
  const std::uint32_t k = plan.params.n_messages;
  if (k == 1) return 1;
  BigInt fact = 1;
  const std::uint64_t block = block_length(plan.params.n_databases, k);
  for (std::uint64_t i = 2; i <= block; ++i) fact *= i;
  BigInt total = 1;
  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    if (plan.segments[i].kind(k) == SegmentKind::kSkip) continue;
    const std::uint64_t blocks = plan.segments[i].length() / block;
    for (std::uint64_t c = 0; c < blocks * k; ++c) total *= fact;
  }
  return total;
}

inline constexpr std::uint64_t kEnumerationGuard = 10'000'000;

// Exact distribution of each database's canonical query over all scheme
// randomness. Throws ScaleError beyond kEnumerationGuard outcomes.
inline ObservableSet enumerate_distribution(MessageId theta,
                                            const std::vector<MessageId>& h,
                                            const AuditConfig& config) {
  const auto setup = detail::audit_setup(theta, h, config);
  const auto& plan = setup.plan;
  const BigInt space = randomness_space_size(plan);
  if (space > kEnumerationGuard) {
    throw ScaleError("randomness space has " + space.str() +
                     " outcomes (limit " + std::to_string(kEnumerationGuard) +
                     "); use sampling mode");
  }
  const std::uint32_t k = config.k;
  const auto block =
      static_cast<std::uint32_t>(block_length(config.n, config.k));

  RetrievalRandomness rnd;
  for (const auto& s : plan.segments) {
    auto& blocks = rnd.per_segment.emplace_back();
    if (s.kind(k) == SegmentKind::kSkip) continue;
    for (std::uint64_t c = 0; c < s.length() / block; ++c) {
      SchemeRandomness r;
      for (std::uint32_t m = 0; m < k; ++m) {
        std::vector<std::uint32_t> id(block);
        std::iota(id.begin(), id.end(), 0u);
        r.permutations.push_back(std::move(id));
      }
      blocks.push_back(std::move(r));
    }
  }
  // Flat view over every permutation for odometer-style enumeration.
  std::vector<std::vector<std::uint32_t>*> digits;
  if (k > 1) {
    for (auto& seg : rnd.per_segment) {
      for (auto& b : seg) {
        for (auto& p : b.permutations) digits.push_back(&p);
      }
    }
  }

  ObservableSet out(config.n);
  for (std::uint32_t db = 0; db < config.n; ++db) {
    out[db].mode = AuditMode::kExact;
    out[db].observable = "db" + std::to_string(db) + "/full";
  }
  // next_permutation wraps to sorted order and returns false, which is
  // exactly an odometer digit rolling over.
  auto advance = [&] {
    for (std::size_t i = digits.size(); i-- > 0;) {
      if (std::next_permutation(digits[i]->begin(), digits[i]->end())) {
        return true;
      }
    }
    return false;
  };
  std::vector<std::string> encodings;
  do {
    const auto prepared = prepare_queries(theta, plan, rnd);
    detail::observe_full(prepared, config.n, encodings);
    for (std::uint32_t db = 0; db < config.n; ++db) {
      out[db].add(encodings[db]);
    }
  } while (advance());
  return out;
}

// Empirical distributions of the query projections from n_samples
// independent seeded runs.
inline ObservableSet sample_distribution(MessageId theta,
                                         const std::vector<MessageId>& h,
                                         const AuditConfig& config,
                                         std::uint64_t n_samples,
                                         const Seed& seed) {
  if (n_samples < 1) throw ValidationError("need at least one sample");
  const auto setup = detail::audit_setup(theta, h, config);
  std::map<std::string, QueryDistribution> by_name;
  std::vector<std::pair<std::string, std::string>> features;
  for (std::uint64_t s = 0; s < n_samples; ++s) {
    const auto rnd =
        draw_retrieval_randomness(setup.plan, seed.derive("sample", s));
    const auto prepared = prepare_queries(theta, setup.plan, rnd);
    for (std::uint32_t db = 0; db < config.n; ++db) {
      detail::observe_projections(prepared, db, features);
      for (auto& [name, value] : features) {
        auto key = "db" + std::to_string(db) + "/" + name;
        auto& d = by_name[key];
        if (d.observable.empty()) {
          d.mode = AuditMode::kSample;
          d.observable = key;
        }
        d.add(std::move(value));
      }
    }
  }
  ObservableSet out;
  for (auto& [name, d] : by_name) out.push_back(std::move(d));
  return out;
}

// Largest TV over matching observables. Observables present on only one side
// count as distance 1.
inline Rational max_tv(const ObservableSet& a, const ObservableSet& b) {
  std::map<std::string, const QueryDistribution*> rhs;
  for (const auto& d : b) rhs[d.observable] = &d;
  if (a.size() != b.size()) return Rational(1);
  Rational worst;
  for (const auto& d : a) {
    auto it = rhs.find(d.observable);
    if (it == rhs.end()) return Rational(1);
    worst = std::max(worst, tv_distance(d, *it->second));
  }
  return worst;
}

// One (theta, H) configuration; H is ordered to match config.ratios.
struct AuditCase {
  MessageId theta = 1;
  std::vector<MessageId> h;
};

// Every configuration of the given shape, one per distinct canonical profile.
inline std::vector<AuditCase> audit_cases(const AuditConfig& config) {
  std::vector<AuditCase> out;
  std::vector<CacheProfile> profiles;
  std::vector<MessageId> tuple(config.m());
  std::vector<bool> used(config.k + 1, false);
  auto rec = [&](auto&& self, std::size_t slot) -> void {
    if (slot == tuple.size()) {
      auto p = make_profile(config.k, tuple, config.ratios);
      if (std::find(profiles.begin(), profiles.end(), p) == profiles.end()) {
        profiles.push_back(std::move(p));
      }
      return;
    }
    for (MessageId id = 1; id <= config.k; ++id) {
      if (used[id]) continue;
      used[id] = true;
      tuple[slot] = id;
      self(self, slot + 1);
      used[id] = false;
    }
  };
  rec(rec, 0);
  for (MessageId theta = 1; theta <= config.k; ++theta) {
    for (const auto& p : profiles) out.push_back({theta, p.identities});
  }
  return out;
}

struct AuditReport {
  AuditConfig config;
  AuditMode mode = AuditMode::kExact;
  std::uint64_t samples = 0;  // per configuration; 0 in exact mode
  std::size_t configurations = 0;
  std::size_t pairs_tested = 0;
  std::size_t observables = 0;
  Rational max_tv;
  Rational threshold;
  bool answer_lengths_constant = true;
  std::vector<std::uint64_t> answer_lengths;
  bool pass = false;
};

// TV threshold for sampling mode at 10^5 samples per configuration.
inline Rational sampling_threshold() { return Rational(1, 50); }

inline AuditReport run_audit(const AuditConfig& config, AuditMode mode,
                             std::uint64_t samples, const Seed& seed) {
  if (config.m() > config.k) throw ValidationError("M exceeds K");
  const auto cases = audit_cases(config);
  AuditReport report;
  report.config = config;
  report.mode = mode;
  report.samples = mode == AuditMode::kSample ? samples : 0;
  report.configurations = cases.size();
  report.threshold = mode == AuditMode::kExact ? Rational(0)
                                               : sampling_threshold();

  std::vector<ObservableSet> dists;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    dists.push_back(mode == AuditMode::kExact
                        ? enumerate_distribution(c.theta, c.h, config)
                        : sample_distribution(c.theta, c.h, config, samples,
                                              seed.derive("config", i)));
    // Reply lengths from one representative query.
    const auto setup = detail::audit_setup(c.theta, c.h, config);
    const auto prepared = prepare_queries(
        c.theta, setup.plan,
        draw_retrieval_randomness(setup.plan, seed.derive("lengths", i)));
    auto lengths = detail::answer_lengths(prepared, config.n);
    if (i == 0) {
      report.answer_lengths = lengths;
    } else if (lengths != report.answer_lengths) {
      report.answer_lengths_constant = false;
    }
  }
  if (!dists.empty()) report.observables = dists.front().size();
  for (std::size_t i = 0; i < dists.size(); ++i) {
    for (std::size_t j = i + 1; j < dists.size(); ++j) {
      report.max_tv = std::max(report.max_tv, max_tv(dists[i], dists[j]));
      ++report.pairs_tested;
    }
  }
  report.pass =
      report.answer_lengths_constant && report.max_tv <= report.threshold;
  return report;
}

}  // namespace pirpsi
