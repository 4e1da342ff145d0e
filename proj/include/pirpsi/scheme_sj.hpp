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

// Capacity-achieving PIR over N replicated databases.
//
// One instance covers B = N^K symbols of every message. The query to each
// database is built level by level, j = 1..K:
//   - every subset S of j messages without the desired one gets (N-1)^(j-1)
//     sums of fresh symbols (message symmetry);
//   - every subset S with the desired message gets (N-1)^(j-1) sums, each
//     one an undesired (j-1)-sum downloaded from another database plus a
//     fresh desired symbol (side information from the other databases);
//   - the same is done at every database (database symmetry).
// Per database that is sum_j C(K, j) (N-1)^(j-1) = (N^K - 1)/(N - 1)
// requests, and the desired message is covered exactly once.
//
// Symbol positions are drawn through a private uniform permutation per
// message, so every database sees, for each message, a uniformly random set
// of distinct indices regardless of which message is wanted.

#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pirpsi/errors.hpp"
#include "pirpsi/field.hpp"
#include "pirpsi/model.hpp"
#include "pirpsi/random.hpp"

namespace pirpsi {

// Private per-message permutations for one block.
struct SchemeRandomness {
  std::vector<std::vector<std::uint32_t>> permutations;  // K of length N^K

  friend bool operator==(const SchemeRandomness&,
                         const SchemeRandomness&) = default;
};

// A contiguous range of symbols retrieved with one scheme.
struct SegmentParams {
  std::uint32_t n = 2;
  std::uint32_t k = 1;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;

  std::uint64_t block() const { return block_length(n, k); }
  std::uint64_t instances() const { return length / block(); }

  void validate() const {
    if (n < 2) throw ValidationError("need at least 2 databases");
    if (k < 1 || k > 20) throw ValidationError("K must lie in [1, 20]");
    if (length == 0 || length % block() != 0) {
      throw ValidationError("segment length " + std::to_string(length) +
                            " is not a positive multiple of N^K = " +
                            std::to_string(block()));
    }
    if (block() > UINT32_MAX) throw ValidationError("block too large");
  }
};

// Draws permutations for one block. With K = 1 no privacy is needed and the
// identity is used, so the query is deterministic.
inline SchemeRandomness draw_randomness(std::uint32_t n, std::uint32_t k,
                                        const Seed& seed) {
  const auto block = static_cast<std::uint32_t>(block_length(n, k));
  SchemeRandomness r;
  ChaChaRng rng(seed);
  for (std::uint32_t m = 0; m < k; ++m) {
    if (k == 1) {
      std::vector<std::uint32_t> id(block);
      std::iota(id.begin(), id.end(), 0u);
      r.permutations.push_back(std::move(id));
    } else {
      r.permutations.push_back(rng.permutation(block));
    }
  }
  return r;
}

// Independent randomness for each block of a segment.
inline std::vector<SchemeRandomness> draw_segment_randomness(
    const SegmentParams& seg, const Seed& seed) {
  seg.validate();
  std::vector<SchemeRandomness> out;
  for (std::uint64_t c = 0; c < seg.instances(); ++c) {
    out.push_back(draw_randomness(seg.n, seg.k, seed.derive("block", c)));
  }
  return out;
}

namespace detail {

// (message, use-ordinal) before the private permutation is applied.
struct TemplateTerm {
  MessageId message;
  std::uint32_t use;
};
using TemplateSum = std::vector<TemplateTerm>;

// Per-database request templates for one block.
inline std::vector<std::vector<TemplateSum>> sj_template(std::uint32_t n,
                                                         std::uint32_t k,
                                                         MessageId theta) {
  const std::uint32_t theta_bit = 1u << (theta - 1);
  std::vector<std::vector<TemplateSum>> per_db(n);
  std::vector<std::map<std::uint32_t, std::vector<TemplateSum>>> undesired(n);
  std::vector<std::uint32_t> next_use(k, 0);
  auto fresh = [&](MessageId m) {
    return TemplateTerm{m, next_use[m - 1]++};
  };

  std::uint64_t repeat = 1;  // (N-1)^(j-1)
  for (std::uint32_t j = 1; j <= k; ++j) {
    for (std::uint32_t db = 0; db < n; ++db) {
      for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        if (static_cast<std::uint32_t>(__builtin_popcount(mask)) != j) continue;
        if (mask & theta_bit) {
          const std::uint32_t rest = mask & ~theta_bit;
          if (rest == 0) {
            per_db[db].push_back({fresh(theta)});
            continue;
          }
          for (std::uint32_t other = 0; other < n; ++other) {
            if (other == db) continue;
            for (const auto& side : undesired[other][rest]) {
              TemplateSum sum = side;
              sum.push_back(fresh(theta));
              per_db[db].push_back(std::move(sum));
            }
          }
        } else {
          for (std::uint64_t rep = 0; rep < repeat; ++rep) {
            TemplateSum sum;
            for (std::uint32_t m = 1; m <= k; ++m) {
              if (mask & (1u << (m - 1))) sum.push_back(fresh(m));
            }
            undesired[db][mask].push_back(sum);
            per_db[db].push_back(std::move(sum));
          }
        }
      }
    }
    repeat *= (n - 1);
  }
  return per_db;
}

}  // namespace detail

// Stage-one query. plan.per_database[n].blocks[c] is the systematic request
// list for block c; symbol indices are absolute message positions.
struct SjQuery {
  SegmentParams segment;
  QueryPlan plan;
};

// Expected request count per database and block: (N^K - 1)/(N - 1).
inline std::uint64_t sj_requests_per_database(std::uint32_t n,
                                              std::uint32_t k) {
  return (block_length(n, k) - 1) / (n - 1);
}

inline SjQuery sj_generate(MessageId theta, const SegmentParams& seg,
                           std::span<const SchemeRandomness> randomness) {
  seg.validate();
  if (theta < 1 || theta > seg.k) {
    throw ValidationError("desired message " + std::to_string(theta) +
                          " out of range");
  }
  if (randomness.size() != seg.instances()) {
    throw ValidationError("need one randomness record per block");
  }
  const auto templ = detail::sj_template(seg.n, seg.k, theta);
  const std::uint64_t block = seg.block();

  SjQuery q{seg, {}};
  q.plan.per_database.resize(seg.n);
  for (std::uint64_t c = 0; c < seg.instances(); ++c) {
    const auto& perms = randomness[c].permutations;
    if (perms.size() != seg.k) {
      throw ValidationError("randomness must hold one permutation per message");
    }
    for (const auto& p : perms) {
      if (p.size() != block) {
        throw ValidationError("permutation length must equal N^K");
      }
    }
    const std::uint64_t base = seg.offset + c * block;
    for (std::uint32_t db = 0; db < seg.n; ++db) {
      QueryBlock qb;
      qb.mode = AnswerMode::kSystematic;
      qb.requests.reserve(templ[db].size());
      for (const auto& sum : templ[db]) {
        Request r;
        r.reserve(sum.size());
        for (const auto& t : sum) {
          r.push_back({t.message, base + perms[t.message - 1][t.use]});
        }
        qb.requests.push_back(std::move(r));
      }
      canonicalize(qb);
      q.plan.per_database[db].blocks.push_back(std::move(qb));
    }
  }
  return q;
}

// Field sum of every request in a block.
inline std::vector<Fp> stage_one_answers(const QueryBlock& block,
                                         const MessageStore& store) {
  std::vector<Fp> out;
  out.reserve(block.requests.size());
  for (const auto& r : block.requests) {
    Fp acc;
    for (const auto& t : r) acc += store.symbol(t.message, t.symbol);
    out.push_back(acc);
  }
  return out;
}

// Database reply to a systematic query.
inline std::vector<Fp> sj_answer(const DatabaseQuery& q,
                                 const MessageStore& store) {
  std::vector<Fp> out;
  for (const auto& b : q.blocks) {
    if (b.mode != AnswerMode::kSystematic) {
      throw ValidationError("sj_answer expects systematic blocks");
    }
    auto a = stage_one_answers(b, store);
    out.insert(out.end(), a.begin(), a.end());
  }
  return out;
}

// Recovers the desired message's segment from the stage-one answers of every
// database. Index i of the result is message position seg.offset + i.
inline std::vector<Fp> sj_decode(const SjQuery& q, const AnswerSet& answers,
                                 MessageId theta) {
  const auto& seg = q.segment;
  if (answers.per_database.size() != seg.n ||
      q.plan.per_database.size() != seg.n) {
    throw DecodeError("expected answers from every database");
  }
  std::vector<Fp> out(seg.length);
  std::vector<bool> filled(seg.length, false);
  std::vector<std::size_t> cursor(seg.n, 0);

  for (std::uint64_t c = 0; c < seg.instances(); ++c) {
    std::map<Request, Fp> side;
    struct Pending {
      SymbolRef desired;
      Request rest;
      Fp value;
    };
    std::vector<Pending> pending;

    for (std::uint32_t db = 0; db < seg.n; ++db) {
      const auto& blocks = q.plan.per_database[db].blocks;
      if (blocks.size() != seg.instances()) {
        throw DecodeError("block count mismatch");
      }
      const auto& reqs = blocks[c].requests;
      const auto& ans = answers.per_database[db];
      if (cursor[db] + reqs.size() > ans.size()) {
        throw DecodeError("database " + std::to_string(db) +
                          " returned too few symbols");
      }
      for (const auto& r : reqs) {
        const Fp value = ans[cursor[db]++];
        Request rest;
        std::optional<SymbolRef> desired;
        for (const auto& t : r) {
          if (t.message == theta) {
            desired = t;
          } else {
            rest.push_back(t);
          }
        }
        if (desired) {
          pending.push_back({*desired, std::move(rest), value});
        } else {
          auto [it, inserted] = side.emplace(std::move(rest), value);
          if (!inserted && it->second != value) {
            throw DecodeError("inconsistent answers for one side sum");
          }
        }
      }
    }
    for (const auto& p : pending) {
      Fp v = p.value;
      if (!p.rest.empty()) {
        auto it = side.find(p.rest);
        if (it == side.end()) {
          throw DecodeError("side information missing for a desired sum");
        }
        v -= it->second;
      }
      if (p.desired.symbol < seg.offset ||
          p.desired.symbol >= seg.offset + seg.length) {
        throw DecodeError("desired symbol outside the segment");
      }
      const std::uint64_t i = p.desired.symbol - seg.offset;
      if (filled[i]) throw DecodeError("desired symbol covered twice");
      filled[i] = true;
      out[i] = v;
    }
  }
  for (std::uint32_t db = 0; db < seg.n; ++db) {
    if (cursor[db] != answers.per_database[db].size()) {
      throw DecodeError("database " + std::to_string(db) +
                        " returned extra symbols");
    }
  }
  for (bool f : filled) {
    if (!f) throw DecodeError("desired segment not fully covered");
  }
  return out;
}

}  // namespace pirpsi
