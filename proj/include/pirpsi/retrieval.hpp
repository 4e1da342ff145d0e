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

// Retrieval with partially cached side information.
//
// The cache ratios cut [0, L) into intervals. On an interval [a, b) the user
// holds every message whose cached prefix reaches b, so the interval is
// fetched with the side-information scheme for that many messages; the tail
// beyond the largest prefix uses the classic scheme. Summed over the
// intervals the download equals L times the optimal normalized cost.

#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pirpsi/capacity.hpp"
#include "pirpsi/database.hpp"
#include "pirpsi/errors.hpp"
#include "pirpsi/model.hpp"
#include "pirpsi/random.hpp"
#include "pirpsi/scheme_psi.hpp"
#include "pirpsi/scheme_sj.hpp"

namespace pirpsi {

enum class SegmentKind {
  kClassic,  // nothing known on the interval
  kPsi,      // 0 < M_eff < K messages known
  kSkip,     // every message known; nothing is downloaded
};

inline const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::kClassic: return "classic";
    case SegmentKind::kPsi: return "psi";
    case SegmentKind::kSkip: return "skip";
  }
  return "?";
}

struct Segment {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  std::vector<MessageId> side_info;  // identities cached over the interval

  std::uint64_t length() const { return end - start; }
  std::uint32_t m_eff() const {
    return static_cast<std::uint32_t>(side_info.size());
  }
  SegmentKind kind(std::uint32_t k) const {
    if (side_info.empty()) return SegmentKind::kClassic;
    return m_eff() == k ? SegmentKind::kSkip : SegmentKind::kPsi;
  }
};

struct SegmentPlan {
  SystemParams params;
  std::vector<Segment> segments;

  // Per-segment cost factor psi_cost(N, K, M_eff).
  Rational segment_factor(std::size_t i) const {
    return psi_cost(params.n_databases, params.n_messages,
                    segments[i].m_eff());
  }
};

// Smallest L that makes every boundary integral and every segment a multiple
// of N^K: N^K times the lcm of the ratio denominators.
inline std::uint64_t choose_length(const CacheProfile& profile,
                                   std::uint32_t n, std::uint32_t k) {
  BigInt lcm = 1;
  for (const auto& r : profile.ratios) {
    lcm = boost::multiprecision::lcm(lcm, r.den());
  }
  BigInt length = lcm * BigInt(block_length(n, k));
  if (length > BigInt(std::numeric_limits<std::uint32_t>::max())) {
    throw ValidationError("message length would exceed 2^32 symbols");
  }
  return static_cast<std::uint64_t>(length);
}

inline SegmentPlan build_plan(const CacheProfile& profile,
                              const SystemParams& params) {
  params.validate();
  const std::uint64_t block = block_length(params.n_databases,
                                           params.n_messages);
  const Rational len(static_cast<long long>(params.message_len));

  std::vector<std::uint64_t> prefix(profile.size());
  std::set<std::uint64_t> cuts{0, params.message_len};
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile.identities[i] < 1 ||
        profile.identities[i] > params.n_messages) {
      throw ValidationError("cached identity out of range");
    }
    if (i > 0 && profile.ratios[i] > profile.ratios[i - 1]) {
      throw ValidationError("profile is not canonical");
    }
    Rational at = profile.ratios[i] * len;
    if (!at.is_integer() ||
        static_cast<std::uint64_t>(at.num()) % block != 0) {
      std::uint64_t suggested = 0;
      try {
        suggested =
            choose_length(profile, params.n_databases, params.n_messages);
      } catch (const ValidationError&) {
      }
      throw PlanError("boundary L*r = " + at.str() +
                          " is not a multiple of N^K = " +
                          std::to_string(block) + "; try L = " +
                          std::to_string(suggested),
                      suggested);
    }
    prefix[i] = static_cast<std::uint64_t>(at.num());
    cuts.insert(prefix[i]);
  }

  SegmentPlan plan{params, {}};
  for (auto it = cuts.begin(); std::next(it) != cuts.end(); ++it) {
    Segment s{*it, *std::next(it), {}};
    for (std::size_t i = 0; i < profile.size(); ++i) {
      if (prefix[i] >= s.end) s.side_info.push_back(profile.identities[i]);
    }
    plan.segments.push_back(std::move(s));
  }
  return plan;
}

// Sums per-segment reports and normalizes against L.
inline CostReport aggregate_cost(std::span<const CostReport> segments,
                                 std::uint64_t message_len,
                                 Rational theoretical = {}) {
  std::vector<std::uint64_t> per_db;
  for (const auto& s : segments) {
    if (per_db.empty()) per_db.assign(s.per_database.size(), 0);
    if (s.per_database.size() != per_db.size()) {
      throw ValidationError("segment reports disagree on database count");
    }
    for (std::size_t i = 0; i < per_db.size(); ++i) {
      per_db[i] += s.per_database[i];
    }
  }
  return CostReport::from_counts(message_len, std::move(per_db),
                                 std::move(theoretical));
}

// Everything one segment sends and receives.
struct SegmentTranscript {
  Segment segment;
  SegmentKind kind = SegmentKind::kClassic;
  QueryPlan transmitted;
  AnswerSet answers;
  CostReport cost;
};

struct RetrievalResult {
  std::vector<Fp> message;
  CostReport cost;
  std::vector<SegmentTranscript> transcript;
};

// Scheme randomness for every block of every segment.
struct RetrievalRandomness {
  std::vector<std::vector<SchemeRandomness>> per_segment;
};

inline SegmentParams segment_params(const SegmentPlan& plan, std::size_t i) {
  return {plan.params.n_databases, plan.params.n_messages,
          plan.segments[i].start, plan.segments[i].length()};
}

inline RetrievalRandomness draw_retrieval_randomness(const SegmentPlan& plan,
                                                     const Seed& seed) {
  RetrievalRandomness out;
  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    if (plan.segments[i].kind(plan.params.n_messages) == SegmentKind::kSkip) {
      out.per_segment.emplace_back();
      continue;
    }
    out.per_segment.push_back(draw_segment_randomness(
        segment_params(plan, i), seed.derive("segment", i)));
  }
  return out;
}

// User-side state for one segment between sending and decoding.
struct PreparedSegment {
  SegmentKind kind = SegmentKind::kClassic;
  std::optional<SjQuery> classic;
  std::optional<PsiQuery> psi;

  const QueryPlan& transmitted() const {
    static const QueryPlan kEmpty;
    if (classic) return classic->plan;
    if (psi) return psi->transmitted;
    return kEmpty;
  }
};

inline std::vector<PreparedSegment> prepare_queries(
    MessageId theta, const SegmentPlan& plan,
    const RetrievalRandomness& randomness) {
  if (randomness.per_segment.size() != plan.segments.size()) {
    throw ValidationError("randomness does not match the plan");
  }
  std::vector<PreparedSegment> out;
  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    const auto& s = plan.segments[i];
    PreparedSegment p;
    p.kind = s.kind(plan.params.n_messages);
    const auto seg = segment_params(plan, i);
    if (p.kind == SegmentKind::kClassic) {
      p.classic = sj_generate(theta, seg, randomness.per_segment[i]);
    } else if (p.kind == SegmentKind::kPsi) {
      std::set<MessageId> h(s.side_info.begin(), s.side_info.end());
      p.psi = psi_generate(theta, h, seg, randomness.per_segment[i]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

// Full retrieval of message theta. `databases` are the N replicas; the user
// reads only `content` and the replies.
inline RetrievalResult retrieve(MessageId theta, const CacheProfile& profile,
                                const CacheContent& content,
                                std::span<const Database> databases,
                                const Seed& seed) {
  if (databases.size() < 2) throw ValidationError("need at least 2 databases");
  const auto& first = databases.front().store();
  for (const auto& db : databases) {
    if (db.store().n_messages() != first.n_messages() ||
        db.store().message_len() != first.message_len()) {
      throw ValidationError("databases are not replicas of one another");
    }
  }
  SystemParams params{static_cast<std::uint32_t>(databases.size()),
                      static_cast<std::uint32_t>(first.n_messages()),
                      first.message_len()};
  if (theta < 1 || theta > params.n_messages) {
    throw ValidationError("desired message out of range");
  }
  const SegmentPlan plan = build_plan(profile, params);
  const auto randomness = draw_retrieval_randomness(plan, seed);
  const auto prepared = prepare_queries(theta, plan, randomness);

  RetrievalResult result;
  result.message.resize(params.message_len);
  std::vector<CostReport> reports;
  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    const auto& s = plan.segments[i];
    const auto& p = prepared[i];
    SegmentTranscript t;
    t.segment = s;
    t.kind = p.kind;
    t.transmitted = p.transmitted();

    std::vector<Fp> symbols;
    std::vector<std::uint64_t> counts(params.n_databases, 0);
    if (p.kind == SegmentKind::kSkip) {
      for (std::uint64_t j = s.start; j < s.end; ++j) {
        symbols.push_back(content.symbol(theta, j));
      }
      t.answers.per_database.resize(params.n_databases);
    } else {
      for (std::uint32_t db = 0; db < params.n_databases; ++db) {
        t.answers.per_database.push_back(
            databases[db].answer(t.transmitted.per_database[db]));
        counts[db] = t.answers.per_database.back().size();
      }
      symbols = p.kind == SegmentKind::kClassic
                    ? sj_decode(*p.classic, t.answers, theta)
                    : psi_decode(*p.psi, t.answers, content, theta);
    }
    std::copy(symbols.begin(), symbols.end(),
              result.message.begin() + static_cast<long>(s.start));
    t.cost = CostReport::from_counts(s.length(), std::move(counts),
                                     plan.segment_factor(i));
    reports.push_back(t.cost);
    result.transcript.push_back(std::move(t));
  }

  std::vector<Rational> ratios = profile.ratios;
  result.cost = aggregate_cost(
      reports, params.message_len,
      normalized_cost({params.n_databases, params.n_messages,
                       static_cast<std::uint32_t>(profile.size()), ratios}));
  return result;
}

}  // namespace pirpsi
