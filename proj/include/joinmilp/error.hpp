// Copyright 2026 The joinmilp Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef JOINMILP_ERROR_HPP_
#define JOINMILP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace joinmilp {

// Base class for every error raised by the library. Precondition violations
// on caller-supplied data derive from it so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Problem size exceeds what an exact method can hold in memory.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Internal invariant violated; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace joinmilp

#endif  // JOINMILP_ERROR_HPP_
