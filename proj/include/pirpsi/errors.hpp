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

#include <stdexcept>
#include <string>

namespace pirpsi {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arithmetic outside an operation's domain (inverse of zero, zero denominator).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A construction needs more distinct field elements than the field has.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class SingularError : public Error {
 public:
  using Error::Error;
};

// Caller-supplied parameters violate a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Answers do not decode to a message. Never expected for honest databases.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// Segment boundaries are not aligned to the scheme's block size.
class PlanError : public ValidationError {
 public:
  PlanError(const std::string& what, unsigned long long suggested_length)
      : ValidationError(what), suggested_length_(suggested_length) {}

  unsigned long long suggested_length() const { return suggested_length_; }

 private:
  unsigned long long suggested_length_;
};

// Exhaustive enumeration requested over a space larger than the guard.
class ScaleError : public Error {
 public:
  using Error::Error;
};

// A library invariant failed. Indicates a defect, not bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pirpsi
