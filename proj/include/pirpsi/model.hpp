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

// System model: public parameters, messages, the user's cache, queries,
// answers and download-cost accounting.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pirpsi/errors.hpp"
#include "pirpsi/field.hpp"
#include "pirpsi/random.hpp"
#include "pirpsi/rational.hpp"

namespace pirpsi {

// Messages are identified 1..K throughout the public interface.
using MessageId = std::uint32_t;

inline std::uint64_t int_pow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

// Number of messages N^K covered by one instance of the block scheme.
inline std::uint64_t block_length(std::uint32_t n, std::uint32_t k) {
  return int_pow(n, k);
}

struct SystemParams {
  std::uint32_t n_databases = 2;
  std::uint32_t n_messages = 1;
  std::uint64_t message_len = 2;

  // Throws ValidationError unless N >= 2, K >= 1 and L is a positive
  // multiple of N^K.
  void validate() const {
    if (n_databases < 2) throw ValidationError("need at least 2 databases");
    if (n_messages < 1) throw ValidationError("need at least 1 message");
    if (n_messages > 20) throw ValidationError("too many messages (max 20)");
    const std::uint64_t block = block_length(n_databases, n_messages);
    if (message_len == 0 || message_len % block != 0) {
      throw ValidationError("message length " + std::to_string(message_len) +
                            " is not a positive multiple of N^K = " +
                            std::to_string(block));
    }
  }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

// K independent uniform messages of L symbols each.
class MessageStore {
 public:
  MessageStore() = default;
  explicit MessageStore(std::vector<std::vector<Fp>> messages)
      : messages_(std::move(messages)) {
    for (const auto& m : messages_) {
      if (m.size() != messages_.front().size()) {
        throw ValidationError("messages must share one length");
      }
    }
  }

  std::size_t n_messages() const { return messages_.size(); }
  std::uint64_t message_len() const {
    return messages_.empty() ? 0 : messages_.front().size();
  }

  const std::vector<Fp>& message(MessageId id) const {
    check(id);
    return messages_[id - 1];
  }
  Fp symbol(MessageId id, std::uint64_t index) const {
    const auto& m = message(id);
    if (index >= m.size()) {
      throw ValidationError("symbol index " + std::to_string(index) +
                            " out of range");
    }
    return m[index];
  }

  friend bool operator==(const MessageStore&, const MessageStore&) = default;

 private:
  void check(MessageId id) const {
    if (id < 1 || id > messages_.size()) {
      throw ValidationError("message id " + std::to_string(id) +
                            " out of range");
    }
  }

  std::vector<std::vector<Fp>> messages_;
};

inline MessageStore generate_messages(const SystemParams& params,
                                      const Seed& seed) {
  ChaChaRng rng(seed.derive("messages", 0));
  std::vector<std::vector<Fp>> messages(params.n_messages);
  for (auto& m : messages) {
    m.resize(params.message_len);
    for (auto& s : m) s = Fp(rng.uniform(Fp::kModulus));
  }
  return MessageStore(std::move(messages));
}

// Which messages are cached (H) and what prefix fraction of each.
// Canonical order: ratios non-increasing, ties broken by identity.
struct CacheProfile {
  std::vector<MessageId> identities;
  std::vector<Rational> ratios;
  Rational budget;

  std::size_t size() const { return identities.size(); }

  // Ratio attached to message `id`, zero when not cached.
  Rational ratio_of(MessageId id) const {
    for (std::size_t i = 0; i < identities.size(); ++i) {
      if (identities[i] == id) return ratios[i];
    }
    return Rational(0);
  }
  bool contains(MessageId id) const {
    return std::find(identities.begin(), identities.end(), id) !=
           identities.end();
  }

  friend bool operator==(const CacheProfile&, const CacheProfile&) = default;
};

// Builds a canonical profile. Throws ValidationError for duplicate or
// out-of-range identities, ratios outside [0, 1], or a declared budget that
// does not equal the ratio sum.
inline CacheProfile make_profile(std::uint32_t n_messages,
                                 std::vector<MessageId> identities,
                                 std::vector<Rational> ratios,
                                 std::optional<Rational> budget = {}) {
  if (identities.size() != ratios.size()) {
    throw ValidationError("identities and ratios differ in length");
  }
  if (identities.size() > n_messages) {
    throw ValidationError("more cached messages than messages");
  }
  std::set<MessageId> seen;
  for (MessageId id : identities) {
    if (id < 1 || id > n_messages) {
      throw ValidationError("cached identity " + std::to_string(id) +
                            " out of range");
    }
    if (!seen.insert(id).second) {
      throw ValidationError("duplicate cached identity " + std::to_string(id));
    }
  }
  Rational sum;
  for (const auto& r : ratios) {
    if (r < Rational(0) || r > Rational(1)) {
      throw ValidationError("ratio " + r.str() + " outside [0, 1]");
    }
    sum += r;
  }
  if (budget && *budget != sum) {
    throw ValidationError("ratios sum to " + sum.str() + ", budget is " +
                          budget->str());
  }
  std::vector<std::size_t> order(identities.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ratios[a] != ratios[b]) return ratios[a] > ratios[b];
    return identities[a] < identities[b];
  });
  CacheProfile profile;
  profile.budget = sum;
  for (std::size_t i : order) {
    profile.identities.push_back(identities[i]);
    profile.ratios.push_back(ratios[i]);
  }
  return profile;
}

// Prefixes of cached messages. Only this, never the store, is visible to the
// user at retrieval time.
class CacheContent {
 public:
  CacheContent() = default;
  explicit CacheContent(std::map<MessageId, std::vector<Fp>> prefixes)
      : prefixes_(std::move(prefixes)) {}

  bool holds(MessageId id, std::uint64_t index) const {
    auto it = prefixes_.find(id);
    return it != prefixes_.end() && index < it->second.size();
  }
  Fp symbol(MessageId id, std::uint64_t index) const {
    if (!holds(id, index)) {
      throw ValidationError("symbol " + std::to_string(index) + " of message " +
                            std::to_string(id) + " is not cached");
    }
    return prefixes_.at(id)[index];
  }
  const std::vector<Fp>& prefix(MessageId id) const { return prefixes_.at(id); }

  std::uint64_t total_symbols() const {
    std::uint64_t total = 0;
    for (const auto& [id, p] : prefixes_) total += p.size();
    return total;
  }
  const std::map<MessageId, std::vector<Fp>>& prefixes() const {
    return prefixes_;
  }

 private:
  std::map<MessageId, std::vector<Fp>> prefixes_;
};

// Prefetching phase: caches the first L*r_i symbols of each chosen message.
inline std::pair<CacheProfile, CacheContent> make_cache(
    const SystemParams& params, std::vector<MessageId> identities,
    std::vector<Rational> ratios, const MessageStore& store,
    std::optional<Rational> budget = {}) {
  params.validate();
  if (store.n_messages() != params.n_messages ||
      store.message_len() != params.message_len) {
    throw ValidationError("store does not match system parameters");
  }
  CacheProfile profile = make_profile(params.n_messages, std::move(identities),
                                      std::move(ratios), std::move(budget));
  std::map<MessageId, std::vector<Fp>> prefixes;
  const Rational len(static_cast<long long>(params.message_len));
  for (std::size_t i = 0; i < profile.size(); ++i) {
    Rational count = profile.ratios[i] * len;
    if (!count.is_integer()) {
      throw ValidationError("L*r = " + count.str() + " is not an integer for " +
                            "message " + std::to_string(profile.identities[i]));
    }
    auto n = static_cast<std::size_t>(count.num());
    const auto& msg = store.message(profile.identities[i]);
    prefixes[profile.identities[i]] =
        std::vector<Fp>(msg.begin(), msg.begin() + static_cast<long>(n));
  }
  return {std::move(profile), CacheContent(std::move(prefixes))};
}

// One symbol of one message, as named in a query.
struct SymbolRef {
  MessageId message = 1;
  std::uint64_t symbol = 0;

  friend bool operator==(const SymbolRef&, const SymbolRef&) = default;
  friend auto operator<=>(const SymbolRef&, const SymbolRef&) = default;
};

// A request asks for the field sum of the named symbols.
using Request = std::vector<SymbolRef>;

enum class AnswerMode : std::uint8_t {
  kSystematic = 0,  // reply with every request's sum
  kParity = 1,      // reply with parity_count Cauchy parities of those sums
};

// Requests for one block of N^K symbols sent to one database.
struct QueryBlock {
  AnswerMode mode = AnswerMode::kSystematic;
  std::vector<Request> requests;
  std::uint64_t parity_count = 0;

  // Number of symbols the database returns for this block.
  std::uint64_t answer_len() const {
    return mode == AnswerMode::kParity ? parity_count : requests.size();
  }

  friend bool operator==(const QueryBlock&, const QueryBlock&) = default;
};

struct DatabaseQuery {
  std::vector<QueryBlock> blocks;

  std::uint64_t answer_len() const {
    std::uint64_t n = 0;
    for (const auto& b : blocks) n += b.answer_len();
    return n;
  }
  friend bool operator==(const DatabaseQuery&, const DatabaseQuery&) = default;
};

// Queries to all N databases. Carries no reference to H.
struct QueryPlan {
  std::vector<DatabaseQuery> per_database;

  friend bool operator==(const QueryPlan&, const QueryPlan&) = default;
};

inline void canonicalize(QueryBlock& block) {
  for (auto& r : block.requests) std::sort(r.begin(), r.end());
  std::sort(block.requests.begin(), block.requests.end());
}
inline void canonicalize(DatabaseQuery& q) {
  for (auto& b : q.blocks) canonicalize(b);
}
inline void canonicalize(QueryPlan& plan) {
  for (auto& q : plan.per_database) canonicalize(q);
}

namespace detail {

inline void put_u8(std::string& out, std::uint8_t v) {
  out.push_back(static_cast<char>(v));
}
inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

}  // namespace detail

// Little-endian, length-prefixed encoding of one database's query:
//   u32 n_blocks; per block: u8 mode, u64 parity_count, u64 n_requests;
//   per request: u32 n_terms; per term: u32 message, u64 symbol.
// The caller must canonicalize first; the encoding of a canonical query is
// injective.
inline std::string canonical_encode(const DatabaseQuery& q) {
  std::string out;
  detail::put_u32(out, static_cast<std::uint32_t>(q.blocks.size()));
  for (const auto& b : q.blocks) {
    detail::put_u8(out, static_cast<std::uint8_t>(b.mode));
    detail::put_u64(out, b.parity_count);
    detail::put_u64(out, b.requests.size());
    for (const auto& r : b.requests) {
      detail::put_u32(out, static_cast<std::uint32_t>(r.size()));
      for (const auto& t : r) {
        detail::put_u32(out, t.message);
        detail::put_u64(out, t.symbol);
      }
    }
  }
  return out;
}

// "PQP1", u32 n_databases, then each database's encoding prefixed by its
// u64 byte length.
inline std::string canonical_encode(const QueryPlan& plan) {
  std::string out = "PQP1";
  detail::put_u32(out, static_cast<std::uint32_t>(plan.per_database.size()));
  for (const auto& q : plan.per_database) {
    std::string one = canonical_encode(q);
    detail::put_u64(out, one.size());
    out += one;
  }
  return out;
}

// Replies from each database, concatenated over its blocks.
struct AnswerSet {
  std::vector<std::vector<Fp>> per_database;

  std::vector<std::uint64_t> lengths() const {
    std::vector<std::uint64_t> out;
    for (const auto& a : per_database) out.push_back(a.size());
    return out;
  }
};

// Downloaded symbol counts and normalized cost.
struct CostReport {
  std::uint64_t message_len = 0;
  std::vector<std::uint64_t> per_database;
  std::uint64_t total = 0;
  Rational normalized;
  Rational theoretical;

  static CostReport from_counts(std::uint64_t message_len,
                                std::vector<std::uint64_t> per_database,
                                Rational theoretical = {}) {
    CostReport r;
    r.message_len = message_len;
    r.per_database = std::move(per_database);
    for (auto c : r.per_database) r.total += c;
    r.normalized = Rational(BigInt(r.total), BigInt(message_len));
    r.theoretical = std::move(theoretical);
    return r;
  }
};

}  // namespace pirpsi
