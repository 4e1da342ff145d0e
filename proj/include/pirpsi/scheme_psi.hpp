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

// PIR when the user fully holds M messages on the segment.
//
// Stage one is the classic query. Each database computes the T stage-one
// sums a but returns only c = G a, where G is the public P x T Cauchy
// matrix with P = T - (number of requests supported inside H). The user
// computes the known entries of a from its cache, solves the P x P Cauchy
// system for the rest and then decodes as in the classic scheme.
//
// The known count per database and block is (N^M - 1)/(N - 1) for every H
// of size M, so P = (N^K - N^M)/(N - 1) reveals nothing about H.

#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pirpsi/capacity.hpp"
#include "pirpsi/errors.hpp"
#include "pirpsi/matrix.hpp"
#include "pirpsi/model.hpp"
#include "pirpsi/scheme_sj.hpp"

namespace pirpsi {

// known[db][block][i] is true when request i is supported inside H.
struct KnownMask {
  std::vector<std::vector<std::vector<bool>>> known;

  std::uint64_t count(std::size_t db, std::size_t block) const {
    std::uint64_t c = 0;
    for (bool b : known[db][block]) c += b ? 1 : 0;
    return c;
  }
};

inline KnownMask known_mask(const SjQuery& q, const std::set<MessageId>& h) {
  KnownMask mask;
  for (const auto& dq : q.plan.per_database) {
    auto& per_block = mask.known.emplace_back();
    for (const auto& b : dq.blocks) {
      auto& bits = per_block.emplace_back();
      bits.reserve(b.requests.size());
      for (const auto& r : b.requests) {
        bool inside = !h.empty();
        for (const auto& t : r) {
          if (!h.contains(t.message)) {
            inside = false;
            break;
          }
        }
        bits.push_back(inside);
      }
    }
  }
  return mask;
}

// Expected parity count per database and block.
inline std::uint64_t psi_parities_per_database(std::uint32_t n,
                                               std::uint32_t k,
                                               std::uint32_t m) {
  return (block_length(n, k) - block_length(n, m)) / (n - 1);
}

struct PsiQuery {
  SjQuery stage_one;    // user-private layout of the stage-one answers
  KnownMask mask;       // user-private
  QueryPlan transmitted;  // what the databases see
};

inline PsiQuery psi_generate(MessageId theta, const std::set<MessageId>& h,
                             const SegmentParams& seg,
                             std::span<const SchemeRandomness> randomness) {
  for (MessageId id : h) {
    if (id < 1 || id > seg.k) {
      throw ValidationError("side-information id " + std::to_string(id) +
                            " out of range");
    }
  }
  PsiQuery q;
  q.stage_one = sj_generate(theta, seg, randomness);
  q.mask = known_mask(q.stage_one, h);
  q.transmitted = q.stage_one.plan;
  for (std::size_t db = 0; db < q.transmitted.per_database.size(); ++db) {
    auto& blocks = q.transmitted.per_database[db].blocks;
    for (std::size_t c = 0; c < blocks.size(); ++c) {
      blocks[c].mode = AnswerMode::kParity;
      blocks[c].parity_count = blocks[c].requests.size() - q.mask.count(db, c);
    }
  }
  return q;
}

namespace detail {

// Cauchy matrices keyed by shape, built on first use.
class CauchyCache {
 public:
  const FpMatrix& get(std::size_t rows, std::size_t cols) {
    auto key = std::make_pair(rows, cols);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(key, cauchy_matrix<Fp>(rows, cols)).first;
    }
    return it->second;
  }

 private:
  std::map<std::pair<std::size_t, std::size_t>, FpMatrix> cache_;
};

}  // namespace detail

// Parity reply for one block: G (P x T) times the stage-one sums.
inline std::vector<Fp> parity_answers(const QueryBlock& block,
                                      const MessageStore& store,
                                      detail::CauchyCache& cache) {
  if (block.parity_count > block.requests.size()) {
    throw ValidationError("more parities requested than requests");
  }
  const auto a = stage_one_answers(block, store);
  const auto& g = cache.get(block.parity_count, block.requests.size());
  return g * std::span<const Fp>(a);
}

// Database reply to a PSI query: exactly P parities per block.
inline std::vector<Fp> psi_answer(const DatabaseQuery& q,
                                  const MessageStore& store) {
  detail::CauchyCache cache;
  std::vector<Fp> out;
  for (const auto& b : q.blocks) {
    if (b.mode != AnswerMode::kParity) {
      throw ValidationError("psi_answer expects parity blocks");
    }
    auto c = parity_answers(b, store, cache);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

// Rebuilds every database's full stage-one answer vector from its parities
// and the cached symbols.
inline AnswerSet psi_reconstruct(const PsiQuery& q, const AnswerSet& parities,
                                 const CacheContent& cache) {
  const auto& plan = q.stage_one.plan;
  if (parities.per_database.size() != plan.per_database.size()) {
    throw DecodeError("expected parities from every database");
  }
  detail::CauchyCache cauchy;
  AnswerSet full;
  for (std::size_t db = 0; db < plan.per_database.size(); ++db) {
    const auto& blocks = plan.per_database[db].blocks;
    const auto& got = parities.per_database[db];
    auto& rebuilt = full.per_database.emplace_back();
    std::size_t cursor = 0;
    for (std::size_t c = 0; c < blocks.size(); ++c) {
      const auto& reqs = blocks[c].requests;
      const auto& bits = q.mask.known[db][c];
      const std::size_t t = reqs.size();
      std::vector<std::size_t> unknown;
      std::vector<Fp> a(t);
      for (std::size_t i = 0; i < t; ++i) {
        if (!bits[i]) {
          unknown.push_back(i);
          continue;
        }
        Fp acc;
        for (const auto& term : reqs[i]) {
          acc += cache.symbol(term.message, term.symbol);
        }
        a[i] = acc;
      }
      const std::size_t p = unknown.size();
      if (cursor + p > got.size()) {
        throw DecodeError("database " + std::to_string(db) +
                          " returned too few parities");
      }
      const auto& g = cauchy.get(p, t);
      // rhs = c - G_known * a_known
      std::vector<Fp> rhs(got.begin() + static_cast<long>(cursor),
                          got.begin() + static_cast<long>(cursor + p));
      cursor += p;
      for (std::size_t r = 0; r < p; ++r) {
        Fp acc;
        for (std::size_t i = 0; i < t; ++i) {
          if (bits[i]) acc += g(r, i) * a[i];
        }
        rhs[r] -= acc;
      }
      std::vector<std::size_t> all_rows(p);
      std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
      std::vector<Fp> solved;
      try {
        solved = solve(g.select(all_rows, unknown), std::move(rhs));
      } catch (const SingularError& e) {
        throw InternalError(std::string("Cauchy subsystem singular: ") +
                            e.what());
      }
      for (std::size_t j = 0; j < p; ++j) a[unknown[j]] = solved[j];
      rebuilt.insert(rebuilt.end(), a.begin(), a.end());
    }
    if (cursor != got.size()) {
      throw DecodeError("database " + std::to_string(db) +
                        " returned extra parities");
    }
  }
  return full;
}

inline std::vector<Fp> psi_decode(const PsiQuery& q, const AnswerSet& parities,
                                  const CacheContent& cache, MessageId theta) {
  return sj_decode(q.stage_one, psi_reconstruct(q, parities, cache), theta);
}

struct SegmentRetrieval {
  std::vector<Fp> symbols;
  CostReport cost;
  QueryPlan transmitted;
  AnswerSet answers;
};

// Runs the full two-stage exchange for one segment against N replicated
// stores. `cache` must hold every symbol of the h messages on the segment.
inline SegmentRetrieval psi_retrieve_segment(
    MessageId theta, const std::set<MessageId>& h, const SegmentParams& seg,
    std::span<const MessageStore> stores, const CacheContent& cache,
    const Seed& seed) {
  if (stores.size() != seg.n) {
    throw ValidationError("need one store per database");
  }
  const auto randomness = draw_segment_randomness(seg, seed);
  PsiQuery q = psi_generate(theta, h, seg, randomness);
  SegmentRetrieval out;
  std::vector<std::uint64_t> counts;
  for (std::uint32_t db = 0; db < seg.n; ++db) {
    out.answers.per_database.push_back(
        psi_answer(q.transmitted.per_database[db], stores[db]));
    counts.push_back(out.answers.per_database.back().size());
  }
  out.symbols = psi_decode(q, out.answers, cache, theta);
  out.cost = CostReport::from_counts(
      seg.length, std::move(counts),
      psi_cost(seg.n, seg.k, static_cast<std::uint32_t>(h.size())));
  out.transmitted = std::move(q.transmitted);
  return out;
}

}  // namespace pirpsi
