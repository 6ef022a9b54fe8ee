/* Copyright 2026 The Neural Transducer Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace nt {

/// A precondition or structural invariant was violated (shape mismatch,
/// malformed alignment, bad vocabulary index, ...).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// No valid alignment exists: the target has more tokens than the blocks
/// can hold (S > N * (M - 1)).
class InfeasibleAlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A brute-force routine declined to run because its enumeration would
/// exceed the configured bound.
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A loss, gradient or finite-difference evaluation produced NaN or Inf.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

#define NT_CHECK(cond, msg)                                           \
  do {                                                                \
    if (!(cond)) throw ::nt::InvariantError(std::string(msg));        \
  } while (0)

}  // namespace nt
