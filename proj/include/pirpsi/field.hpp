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

#include <compare>
#include <cstdint>
#include <ostream>

#include "pirpsi/errors.hpp"

namespace pirpsi {

namespace detail {

constexpr bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

}  // namespace detail

// Element of the prime field Z/pZ. Values are always reduced.
template <std::uint32_t Modulus>
class PrimeField {
  static_assert(detail::is_prime(Modulus), "modulus must be prime");
  static_assert(Modulus > (1u << 16), "modulus must exceed 2^16");

 public:
  static constexpr std::uint32_t kModulus = Modulus;

  constexpr PrimeField() = default;
  constexpr explicit PrimeField(std::uint64_t v)
      : value_(static_cast<std::uint32_t>(v % Modulus)) {}

  static constexpr PrimeField zero() { return PrimeField(); }
  static constexpr PrimeField one() { return PrimeField(1); }

  constexpr std::uint32_t value() const { return value_; }
  constexpr bool is_zero() const { return value_ == 0; }

  constexpr PrimeField& operator+=(PrimeField rhs) {
    std::uint32_t s = value_ + rhs.value_;
    value_ = s >= Modulus ? s - Modulus : s;
    return *this;
  }
  constexpr PrimeField& operator-=(PrimeField rhs) {
    value_ = value_ >= rhs.value_ ? value_ - rhs.value_
                                  : value_ + Modulus - rhs.value_;
    return *this;
  }
  constexpr PrimeField& operator*=(PrimeField rhs) {
    value_ = static_cast<std::uint32_t>(
        static_cast<std::uint64_t>(value_) * rhs.value_ % Modulus);
    return *this;
  }

  friend constexpr PrimeField operator+(PrimeField a, PrimeField b) {
    return a += b;
  }
  friend constexpr PrimeField operator-(PrimeField a, PrimeField b) {
    return a -= b;
  }
  friend constexpr PrimeField operator*(PrimeField a, PrimeField b) {
    return a *= b;
  }
  constexpr PrimeField operator-() const { return PrimeField() - *this; }

  constexpr PrimeField pow(std::uint64_t e) const {
    PrimeField base = *this;
    PrimeField acc = one();
    while (e != 0) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }

  // Throws DomainError for zero.
  constexpr PrimeField inverse() const {
    if (is_zero()) throw DomainError("inverse of zero in prime field");
    return pow(Modulus - 2);
  }

  friend constexpr bool operator==(PrimeField, PrimeField) = default;
  friend constexpr auto operator<=>(PrimeField, PrimeField) = default;

  friend std::ostream& operator<<(std::ostream& os, PrimeField x) {
    return os << x.value_;
  }

 private:
  std::uint32_t value_ = 0;
};

using Fp = PrimeField<65537>;

inline Fp fp_add(Fp a, Fp b) { return a + b; }
inline Fp fp_mul(Fp a, Fp b) { return a * b; }
inline Fp fp_inv(Fp a) { return a.inverse(); }

}  // namespace pirpsi
