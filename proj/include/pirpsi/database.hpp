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

#pragma once

#include <utility>
#include <vector>

#include "pirpsi/model.hpp"
#include "pirpsi/scheme_psi.hpp"
#include "pirpsi/scheme_sj.hpp"

namespace pirpsi {

// In-process replica. The reply is a deterministic function of the query
// and the stored messages.
class Database {
 public:
  explicit Database(MessageStore store) : store_(std::move(store)) {}

  const MessageStore& store() const { return store_; }

  std::vector<Fp> answer(const DatabaseQuery& q) const {
    std::vector<Fp> out;
    for (const auto& b : q.blocks) {
      auto part = b.mode == AnswerMode::kParity
                      ? parity_answers(b, store_, cauchy_)
                      : stage_one_answers(b, store_);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

 private:
  MessageStore store_;
  mutable detail::CauchyCache cauchy_;
};

// N identical replicas of one store.
inline std::vector<MessageStore> replicate(const MessageStore& store,
                                           std::uint32_t n) {
  return std::vector<MessageStore>(n, store);
}

}  // namespace pirpsi
