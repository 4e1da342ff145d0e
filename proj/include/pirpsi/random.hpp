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

#include <sodium.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "pirpsi/errors.hpp"

namespace pirpsi {

namespace detail {

inline void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw InternalError("libsodium initialisation failed");
}

inline void put_le64(unsigned char* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

}  // namespace detail

// 256-bit seed. User-held state; never part of a query.
class Seed {
 public:
  static constexpr std::size_t kBytes = 32;

  Seed() { key_.fill(0); }

  static Seed from_u64(std::uint64_t value) {
    detail::ensure_sodium();
    unsigned char msg[16] = {'p', 'i', 'r', 'p', 's', 'i', '-', 's'};
    detail::put_le64(msg + 8, value);
    Seed s;
    crypto_generichash(s.key_.data(), kBytes, msg, sizeof msg, nullptr, 0);
    return s;
  }

  // Keyed BLAKE2b derivation of an independent child seed.
  Seed derive(std::string_view label, std::uint64_t index) const {
    detail::ensure_sodium();
    std::vector<unsigned char> msg(label.begin(), label.end());
    msg.resize(label.size() + 8);
    detail::put_le64(msg.data() + label.size(), index);
    Seed s;
    crypto_generichash(s.key_.data(), kBytes, msg.data(), msg.size(),
                       key_.data(), kBytes);
    return s;
  }

  const std::array<unsigned char, kBytes>& bytes() const { return key_; }

  std::string hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (unsigned char b : key_) {
      out.push_back(digits[b >> 4]);
      out.push_back(digits[b & 15]);
    }
    return out;
  }

  friend bool operator==(const Seed&, const Seed&) = default;

 private:
  std::array<unsigned char, kBytes> key_;
};

// Deterministic ChaCha20 keystream generator. Satisfies
// UniformRandomBitGenerator, but callers should use uniform() below so
// results do not depend on the standard library's distributions.
class ChaChaRng {
 public:
  using result_type = std::uint64_t;

  explicit ChaChaRng(const Seed& seed) : key_(seed.bytes()) {
    detail::ensure_sodium();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    if (pos_ == buffer_.size()) refill();
    result_type v;
    std::memcpy(&v, buffer_.data() + pos_, sizeof v);
    pos_ += sizeof v;
    return v;
  }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform(std::uint64_t bound) {
    if (bound == 0) throw ValidationError("uniform: empty range");
    // Rejection sampling on the top of the range keeps the result unbiased.
    const std::uint64_t limit = max() - max() % bound;
    for (;;) {
      std::uint64_t v = (*this)();
      if (v < limit) return v % bound;
    }
  }

  // Uniform permutation of {0..n-1} (Fisher-Yates).
  std::vector<std::uint32_t> permutation(std::uint32_t n) {
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    for (std::uint32_t i = n; i > 1; --i) {
      std::uint32_t j = static_cast<std::uint32_t>(uniform(i));
      std::swap(p[i - 1], p[j]);
    }
    return p;
  }

 private:
  void refill() {
    static const std::array<unsigned char, 256> zeros{};
    std::array<unsigned char, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
    crypto_stream_chacha20_ietf_xor_ic(buffer_.data(), zeros.data(),
                                       buffer_.size(), nonce.data(), counter_,
                                       key_.data());
    counter_ += static_cast<std::uint32_t>(buffer_.size() / 64);
    pos_ = 0;
  }

  std::array<unsigned char, Seed::kBytes> key_;
  std::array<unsigned char, 256> buffer_{};
  std::size_t pos_ = 256;
  std::uint32_t counter_ = 0;
};

}  // namespace pirpsi
