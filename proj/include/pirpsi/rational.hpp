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

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "pirpsi/errors.hpp"

namespace pirpsi {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational in lowest terms with a positive denominator.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design of arithmetic
  Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
    normalize();
  }
  Rational(long long n, long long d) : Rational(BigInt(n), BigInt(d)) {}

  // Parses "a/b" or an integer "a". Decimal points are rejected.
  static Rational parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
      return s;
    };
    auto parse_int = [](std::string_view s) {
      if (s.empty()) throw ValidationError("empty integer in rational");
      std::size_t i = (s.front() == '-' || s.front() == '+') ? 1 : 0;
      if (i == s.size()) throw ValidationError("sign without digits");
      for (std::size_t j = i; j < s.size(); ++j) {
        if (s[j] < '0' || s[j] > '9') {
          throw ValidationError("not an exact fraction: '" + std::string(s) +
                                "'");
        }
      }
      return BigInt(std::string(s.front() == '+' ? s.substr(1) : s));
    };
    text = trim(text);
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text), 1);
    BigInt d = parse_int(trim(text.substr(slash + 1)));
    if (d == 0) throw DomainError("zero denominator");
    return Rational(parse_int(trim(text.substr(0, slash))), d);
  }

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  // Smallest integer not below this value.
  BigInt ceil() const {
    BigInt q = num_ / den_;  // truncates toward zero
    if (num_ > 0 && q * den_ != num_) ++q;
    return q;
  }
  BigInt floor() const {
    BigInt q = num_ / den_;
    if (num_ < 0 && q * den_ != num_) --q;
    return q;
  }

  double to_double() const {
    return static_cast<double>(
        boost::multiprecision::cpp_rational(num_, den_));
  }

  std::string str() const {
    return num_.str() + "/" + den_.str();
  }

  Rational& operator+=(const Rational& o) {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ *= o.den_;
    normalize();
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    num_ = num_ * o.den_ - o.num_ * den_;
    den_ *= o.den_;
    normalize();
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    num_ *= o.num_;
    den_ *= o.den_;
    normalize();
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.num_ == 0) throw DomainError("division by zero rational");
    num_ *= o.den_;
    den_ *= o.num_;
    normalize();
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    BigInt lhs = a.num_ * b.den_;
    BigInt rhs = b.num_ * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
  }

 private:
  void normalize() {
    if (den_ == 0) throw DomainError("zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    BigInt g = boost::multiprecision::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  BigInt num_;
  BigInt den_;
};

// 1/base^exp as an exact rational.
inline Rational inverse_power(std::uint64_t base, unsigned exp) {
  return Rational(BigInt(1), boost::multiprecision::pow(BigInt(base), exp));
}

}  // namespace pirpsi
