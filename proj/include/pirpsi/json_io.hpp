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

// JSON forms of the public types. Rationals are "num/den" strings.

#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "pirpsi/audit.hpp"
#include "pirpsi/capacity.hpp"
#include "pirpsi/model.hpp"
#include "pirpsi/rational.hpp"
#include "pirpsi/retrieval.hpp"

namespace pirpsi {

inline void to_json(nlohmann::json& j, const Rational& r) { j = r.str(); }
inline void from_json(const nlohmann::json& j, Rational& r) {
  if (j.is_number_integer()) {
    r = Rational(j.get<long long>());
  } else if (j.is_string()) {
    r = Rational::parse(j.get<std::string>());
  } else {
    throw ValidationError("rational must be a \"num/den\" string");
  }
}

inline void to_json(nlohmann::json& j, const SystemParams& p) {
  j = {{"n_databases", p.n_databases},
       {"n_messages", p.n_messages},
       {"message_len", p.message_len}};
}
inline void from_json(const nlohmann::json& j, SystemParams& p) {
  j.at("n_databases").get_to(p.n_databases);
  j.at("n_messages").get_to(p.n_messages);
  j.at("message_len").get_to(p.message_len);
}

inline void to_json(nlohmann::json& j, const CacheProfile& c) {
  j = {{"identities", c.identities},
       {"ratios", c.ratios},
       {"budget", c.budget}};
}
inline void from_json(const nlohmann::json& j, CacheProfile& c) {
  j.at("identities").get_to(c.identities);
  j.at("ratios").get_to(c.ratios);
  j.at("budget").get_to(c.budget);
}

inline void to_json(nlohmann::json& j, const CostReport& c) {
  j = {{"message_len", c.message_len},
       {"per_database", c.per_database},
       {"total", c.total},
       {"normalized", c.normalized},
       {"theoretical", c.theoretical}};
}
inline void from_json(const nlohmann::json& j, CostReport& c) {
  j.at("message_len").get_to(c.message_len);
  j.at("per_database").get_to(c.per_database);
  j.at("total").get_to(c.total);
  j.at("normalized").get_to(c.normalized);
  j.at("theoretical").get_to(c.theoretical);
}

inline void to_json(nlohmann::json& j, const AllocationResult& a) {
  j = {{"m", a.m}, {"ratios", a.ratios}, {"cost", a.cost}};
}

inline nlohmann::json segment_json(const SegmentTranscript& t) {
  return {{"start", t.segment.start},
          {"end", t.segment.end},
          {"kind", to_string(t.kind)},
          {"m_eff", t.segment.m_eff()},
          {"side_info", t.segment.side_info},
          {"cost", t.cost}};
}

inline void to_json(nlohmann::json& j, const AuditReport& r) {
  j = {{"mode", to_string(r.mode)},
       {"n", r.config.n},
       {"k", r.config.k},
       {"m", r.config.m()},
       {"ratios", r.config.ratios},
       {"samples_per_configuration", r.samples},
       {"configurations", r.configurations},
       {"pairs_tested", r.pairs_tested},
       {"observables", r.observables},
       {"max_tv", r.max_tv},
       {"max_tv_decimal", r.max_tv.to_double()},
       {"threshold", r.threshold},
       {"answer_lengths", r.answer_lengths},
       {"answer_lengths_constant", r.answer_lengths_constant},
       {"pass", r.pass}};
}

// Length-prefixed dump of every transmitted query: for each segment and
// database, u64 little-endian byte count followed by the canonical encoding.
inline std::string transcript_dump(const RetrievalResult& r,
                                   std::uint32_t n_databases) {
  std::string out;
  for (const auto& t : r.transcript) {
    for (std::uint32_t db = 0; db < n_databases; ++db) {
      std::string enc = t.transmitted.per_database.empty()
                            ? canonical_encode(DatabaseQuery{})
                            : canonical_encode(t.transmitted.per_database[db]);
      detail::put_u64(out, enc.size());
      out += enc;
    }
  }
  return out;
}

}  // namespace pirpsi
