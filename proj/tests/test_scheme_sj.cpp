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

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "pirpsi/database.hpp"
#include "pirpsi/scheme_sj.hpp"

namespace pirpsi {
namespace {

struct Run {
  SjQuery query;
  AnswerSet answers;
  std::vector<Fp> decoded;
};

Run run_sj(MessageId theta, const SegmentParams& seg, const MessageStore& store,
           std::uint64_t seed) {
  auto rnd = draw_segment_randomness(seg, Seed::from_u64(seed));
  Run r{sj_generate(theta, seg, rnd), {}, {}};
  for (const auto& dq : r.query.plan.per_database) {
    r.answers.per_database.push_back(sj_answer(dq, store));
  }
  r.decoded = sj_decode(r.query, r.answers, theta);
  return r;
}

std::vector<Fp> slice(const MessageStore& s, MessageId id, std::uint64_t from,
                      std::uint64_t len) {
  const auto& m = s.message(id);
  return {m.begin() + static_cast<long>(from),
          m.begin() + static_cast<long>(from + len)};
}

TEST(SjCountsTest, TwoByTwo) {
  EXPECT_EQ(sj_requests_per_database(2, 2), 3u);
  EXPECT_EQ(sj_requests_per_database(2, 5), 31u);
  EXPECT_EQ(sj_requests_per_database(3, 5), 121u);
  SegmentParams seg{2, 2, 0, 4};
  auto store = generate_messages({2, 2, 4}, Seed::from_u64(1));
  auto r = run_sj(1, seg, store, 7);
  for (const auto& a : r.answers.per_database) EXPECT_EQ(a.size(), 3u);
}

TEST(SjCountsTest, TotalDownloadTwoByFive) {
  SegmentParams seg{2, 5, 0, 32};
  auto store = generate_messages({2, 5, 32}, Seed::from_u64(2));
  auto r = run_sj(3, seg, store, 11);
  std::uint64_t total = 0;
  for (const auto& a : r.answers.per_database) total += a.size();
  EXPECT_EQ(total, 62u);
  EXPECT_EQ(Rational(static_cast<long long>(total), 32), Rational(31, 16));
}

TEST(SjTemplateTest, TwoByTwoShape) {
  // Each database: one fresh symbol of each message plus one pair.
  auto t = detail::sj_template(2, 2, 1);
  ASSERT_EQ(t.size(), 2u);
  for (const auto& db : t) {
    ASSERT_EQ(db.size(), 3u);
    std::size_t singles = 0;
    std::size_t pairs = 0;
    for (const auto& sum : db) {
      (sum.size() == 1 ? singles : pairs) += 1;
    }
    EXPECT_EQ(singles, 2u);
    EXPECT_EQ(pairs, 1u);
  }
}

TEST(SjRoundTripTest, SingleMessageIsDeterministic) {
  SegmentParams seg{3, 1, 0, 3};
  auto store = generate_messages({3, 1, 3}, Seed::from_u64(4));
  auto a = run_sj(1, seg, store, 1);
  auto b = run_sj(1, seg, store, 2);
  EXPECT_EQ(a.decoded, store.message(1));
  EXPECT_EQ(canonical_encode(a.query.plan), canonical_encode(b.query.plan));
}

TEST(SjRoundTripTest, TwoByTwo) {
  SegmentParams seg{2, 2, 0, 16};
  auto store = generate_messages({2, 2, 16}, Seed::from_u64(5));
  for (MessageId theta = 1; theta <= 2; ++theta) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      EXPECT_EQ(run_sj(theta, seg, store, s).decoded, store.message(theta));
    }
  }
}

TEST(SjRoundTripTest, TwoByFiveEveryMessage) {
  SegmentParams seg{2, 5, 0, 64};
  auto store = generate_messages({2, 5, 64}, Seed::from_u64(6));
  for (MessageId theta = 1; theta <= 5; ++theta) {
    EXPECT_EQ(run_sj(theta, seg, store, theta).decoded, store.message(theta));
  }
}

TEST(SjRoundTripTest, ThreeByThreeWithOffset) {
  auto store = generate_messages({3, 3, 81}, Seed::from_u64(7));
  SegmentParams seg{3, 3, 27, 54};
  for (MessageId theta = 1; theta <= 3; ++theta) {
    EXPECT_EQ(run_sj(theta, seg, store, 9).decoded,
              slice(store, theta, 27, 54));
  }
}

TEST(SjRoundTripTest, FourDatabasesTwoMessages) {
  auto store = generate_messages({4, 2, 32}, Seed::from_u64(8));
  SegmentParams seg{4, 2, 0, 32};
  EXPECT_EQ(run_sj(2, seg, store, 3).decoded, store.message(2));
}

TEST(SjAnswerTest, Deterministic) {
  SegmentParams seg{2, 3, 0, 8};
  auto store = generate_messages({2, 3, 8}, Seed::from_u64(10));
  auto rnd = draw_segment_randomness(seg, Seed::from_u64(1));
  auto q = sj_generate(2, seg, rnd);
  Database db(store);
  EXPECT_EQ(db.answer(q.plan.per_database[0]),
            db.answer(q.plan.per_database[0]));
  EXPECT_EQ(db.answer(q.plan.per_database[1]),
            sj_answer(q.plan.per_database[1], store));
}

TEST(SjRandomnessTest, SeedDeterminesQuery) {
  SegmentParams seg{2, 3, 0, 16};
  auto a = draw_segment_randomness(seg, Seed::from_u64(1));
  auto b = draw_segment_randomness(seg, Seed::from_u64(1));
  auto c = draw_segment_randomness(seg, Seed::from_u64(2));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_NE(a[0], a[1]);  // blocks drawn independently
}

// Checks the structure a database sees: every message touched equally often
// and no symbol index of a message repeated within one database.
TEST(SjStructureTest, PerDatabaseSymmetry) {
  for (std::uint32_t n : {2u, 3u}) {
    for (std::uint32_t k = 2; k <= 4; ++k) {
      SegmentParams seg{n, k, 0, block_length(n, k)};
      for (MessageId theta = 1; theta <= k; ++theta) {
        auto rnd = draw_segment_randomness(seg, Seed::from_u64(theta));
        auto q = sj_generate(theta, seg, rnd);
        for (const auto& dq : q.plan.per_database) {
          std::map<MessageId, std::set<std::uint64_t>> used;
          std::map<MessageId, std::size_t> hits;
          for (const auto& r : dq.blocks[0].requests) {
            std::set<MessageId> in_request;
            for (const auto& t : r) {
              EXPECT_TRUE(in_request.insert(t.message).second);
              EXPECT_TRUE(used[t.message].insert(t.symbol).second);
              ++hits[t.message];
            }
          }
          ASSERT_EQ(hits.size(), k);
          for (const auto& [m, h] : hits) EXPECT_EQ(h, hits.begin()->second);
        }
      }
    }
  }
}

// Every desired sum's side part is downloaded in undesired form elsewhere.
TEST(SjStructureTest, SideSumsAreAvailable) {
  SegmentParams seg{3, 3, 0, 27};
  auto rnd = draw_segment_randomness(seg, Seed::from_u64(3));
  const MessageId theta = 2;
  auto q = sj_generate(theta, seg, rnd);
  std::set<Request> undesired;
  for (const auto& dq : q.plan.per_database) {
    for (const auto& r : dq.blocks[0].requests) {
      bool has = false;
      for (const auto& t : r) has |= t.message == theta;
      if (!has) undesired.insert(r);
    }
  }
  std::size_t desired = 0;
  for (const auto& dq : q.plan.per_database) {
    for (const auto& r : dq.blocks[0].requests) {
      Request rest;
      bool has = false;
      for (const auto& t : r) {
        if (t.message == theta) {
          has = true;
        } else {
          rest.push_back(t);
        }
      }
      if (!has) continue;
      ++desired;
      if (!rest.empty()) EXPECT_TRUE(undesired.contains(rest));
    }
  }
  EXPECT_EQ(desired, 27u);
}

TEST(SjErrorTest, InvalidInputs) {
  SegmentParams seg{2, 2, 0, 4};
  auto rnd = draw_segment_randomness(seg, Seed::from_u64(1));
  EXPECT_THROW(sj_generate(0, seg, rnd), ValidationError);
  EXPECT_THROW(sj_generate(3, seg, rnd), ValidationError);
  EXPECT_THROW((draw_segment_randomness({2, 2, 0, 6}, Seed::from_u64(1))),
               ValidationError);
  std::vector<SchemeRandomness> none;
  EXPECT_THROW(sj_generate(1, seg, none), ValidationError);
}

TEST(SjErrorTest, DecodeDetectsTampering) {
  SegmentParams seg{2, 2, 0, 4};
  auto store = generate_messages({2, 2, 4}, Seed::from_u64(12));
  auto r = run_sj(1, seg, store, 4);

  auto short_answers = r.answers;
  short_answers.per_database[0].pop_back();
  EXPECT_THROW(sj_decode(r.query, short_answers, 1), DecodeError);

  auto long_answers = r.answers;
  long_answers.per_database[1].push_back(Fp(1));
  EXPECT_THROW(sj_decode(r.query, long_answers, 1), DecodeError);

  AnswerSet missing;
  missing.per_database.push_back(r.answers.per_database[0]);
  EXPECT_THROW(sj_decode(r.query, missing, 1), DecodeError);
}

}  // namespace
}  // namespace pirpsi
