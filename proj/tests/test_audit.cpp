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

#include "pirpsi/audit.hpp"
#include "pirpsi/json_io.hpp"

namespace pirpsi {
namespace {

QueryDistribution dist(AuditMode mode, std::string name,
                       std::map<std::string, std::uint64_t> counts) {
  QueryDistribution d;
  d.mode = mode;
  d.observable = std::move(name);
  for (auto& [k, v] : counts) d.add(k, v);
  return d;
}

TEST(TvDistanceTest, IdenticalIsZero) {
  auto a = dist(AuditMode::kExact, "x", {{"a", 1}, {"b", 3}});
  auto b = dist(AuditMode::kExact, "x", {{"a", 2}, {"b", 6}});
  EXPECT_EQ(tv_distance(a, b), Rational(0));
}

TEST(TvDistanceTest, DisjointIsOne) {
  auto a = dist(AuditMode::kExact, "x", {{"a", 5}});
  auto b = dist(AuditMode::kExact, "x", {{"b", 2}, {"c", 9}});
  EXPECT_EQ(tv_distance(a, b), Rational(1));
}

TEST(TvDistanceTest, PartialOverlap) {
  auto a = dist(AuditMode::kSample, "x", {{"a", 1}, {"b", 1}});
  auto b = dist(AuditMode::kSample, "x", {{"a", 3}, {"c", 1}});
  // |1/2-3/4| + |1/2-0| + |0-1/4| = 1, halved
  EXPECT_EQ(tv_distance(a, b), Rational(1, 2));
}

TEST(TvDistanceTest, RejectsMismatches) {
  auto a = dist(AuditMode::kExact, "x", {{"a", 1}});
  auto b = dist(AuditMode::kSample, "x", {{"a", 1}});
  auto c = dist(AuditMode::kExact, "y", {{"a", 1}});
  EXPECT_THROW(tv_distance(a, b), ValidationError);
  EXPECT_THROW(tv_distance(a, c), ValidationError);
  EXPECT_THROW(tv_distance(a, QueryDistribution{}), ValidationError);
}

TEST(AuditCasesTest, DeduplicatesByProfile) {
  // Uniform ratios: H is a set, so C(3,2) = 3 profiles for each theta.
  EXPECT_EQ(audit_cases(AuditConfig::full_side_info(2, 3, 2)).size(), 9u);
  // Distinct ratios: ordered choices, 3*2 = 6 profiles for each theta.
  AuditConfig uneven{2, 3, {Rational(1, 2), Rational(1, 4)}};
  EXPECT_EQ(audit_cases(uneven).size(), 18u);
  EXPECT_EQ(audit_cases(AuditConfig::full_side_info(2, 3, 0)).size(), 3u);
}

TEST(EnumerateTest, TwoByTwoOneCachedIsPrivate) {
  auto config = AuditConfig::full_side_info(2, 2, 1);
  auto a = enumerate_distribution(1, {1}, config);
  auto b = enumerate_distribution(1, {2}, config);
  auto c = enumerate_distribution(2, {1}, config);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].total, 576u);  // (4!)^2
  EXPECT_EQ(max_tv(a, b), Rational(0));
  EXPECT_EQ(max_tv(a, c), Rational(0));
}

TEST(EnumerateTest, SingleMessageIsPointMass) {
  auto config = AuditConfig::full_side_info(3, 1, 0);
  auto d = enumerate_distribution(1, {}, config);
  ASSERT_EQ(d.size(), 3u);
  for (const auto& x : d) {
    EXPECT_EQ(x.counts.size(), 1u);
    EXPECT_EQ(x.total, 1u);
  }
}

TEST(EnumerateTest, RefusesHugeSpaces) {
  auto config = AuditConfig::full_side_info(2, 3, 1);
  EXPECT_THROW(enumerate_distribution(1, {2}, config), ScaleError);
  EXPECT_THROW(run_audit(config, AuditMode::kExact, 0, Seed::from_u64(1)),
               ScaleError);
}

TEST(RunAuditTest, ExactTwoByTwo) {
  for (std::uint32_t m = 0; m <= 2; ++m) {
    auto rep = run_audit(AuditConfig::full_side_info(2, 2, m),
                         AuditMode::kExact, 0, Seed::from_u64(1));
    EXPECT_TRUE(rep.pass) << "m=" << m;
    EXPECT_EQ(rep.max_tv, Rational(0));
    EXPECT_TRUE(rep.answer_lengths_constant);
  }
}

TEST(RunAuditTest, ExactPartialCache) {
  AuditConfig config{2, 2, {Rational(1, 2)}};
  auto rep = run_audit(config, AuditMode::kExact, 0, Seed::from_u64(2));
  EXPECT_EQ(rep.configurations, 4u);
  EXPECT_EQ(rep.pairs_tested, 6u);
  EXPECT_TRUE(rep.pass);
}

TEST(RunAuditTest, SamplingIsDeterministic) {
  auto config = AuditConfig::full_side_info(2, 3, 1);
  auto a = run_audit(config, AuditMode::kSample, 200, Seed::from_u64(5));
  auto b = run_audit(config, AuditMode::kSample, 200, Seed::from_u64(5));
  EXPECT_EQ(a.max_tv, b.max_tv);
  EXPECT_EQ(nlohmann::json(a).dump(), nlohmann::json(b).dump());
  EXPECT_EQ(a.threshold, Rational(1, 50));
}

TEST(RunAuditTest, SamplingModerateCount) {
  auto config = AuditConfig::full_side_info(2, 3, 1);
  auto rep = run_audit(config, AuditMode::kSample, 5000, Seed::from_u64(6));
  EXPECT_TRUE(rep.answer_lengths_constant);
  EXPECT_GT(rep.observables, 0u);
  EXPECT_LT(rep.max_tv, Rational(1, 10));
}

// With identity permutations the queries reveal theta; the projections
// must notice.
TEST(ProjectionTest, DetectsUnpermutedQueries) {
  AuditConfig config{2, 2, {}};
  auto project = [&](MessageId theta) {
    auto setup = detail::audit_setup(theta, {}, config);
    RetrievalRandomness rnd;
    auto& blocks = rnd.per_segment.emplace_back();
    SchemeRandomness ident;
    for (int m = 0; m < 2; ++m) {
      ident.permutations.push_back({0, 1, 2, 3});
    }
    blocks.push_back(ident);
    auto prepared = prepare_queries(theta, setup.plan, rnd);
    std::vector<std::pair<std::string, std::string>> features;
    detail::observe_projections(prepared, 0, features);
    ObservableSet out;
    for (auto& [name, value] : features) {
      out.push_back(dist(AuditMode::kSample, name, {{value, 1}}));
    }
    return out;
  };
  EXPECT_EQ(max_tv(project(1), project(2)), Rational(1));
  EXPECT_EQ(max_tv(project(1), project(1)), Rational(0));
}

TEST(MaxTvTest, MissingObservableCountsAsOne) {
  ObservableSet a{dist(AuditMode::kExact, "x", {{"a", 1}})};
  ObservableSet b{dist(AuditMode::kExact, "y", {{"a", 1}})};
  EXPECT_EQ(max_tv(a, b), Rational(1));
  EXPECT_EQ(max_tv(a, {}), Rational(1));
}

}  // namespace
}  // namespace pirpsi
