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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nt/kv_config.hpp"
#include "nt/precision.hpp"
#include "nt/tensor.hpp"

namespace nt {
inline namespace NT_ABI {

struct ParamEntry {
  Tensor value;
  Tensor grad;
  Tensor velocity;
  bool is_bias = false;
};

/// Named trainable tensors with gradient and momentum slots. Iteration is
/// in name order. Entry addresses are stable for the store's lifetime, so
/// tapes may bind them directly.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed = 0) : seed_(seed) {}

  ParamEntry& add(const std::string& name, std::vector<std::size_t> dims, bool is_bias = false);
  ParamEntry& at(const std::string& name);
  const ParamEntry& at(const std::string& name) const;
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }

  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;
  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Weights ~ uniform(-range, range) drawn in name order from the store's
  /// seed; biases zero; velocities zero.
  void init_uniform(Real range);
  void zero_grads();
  void zero_velocity();

  /// Copies values and velocities from `other`; both must hold the same
  /// names and shapes.
  void copy_values_from(const ParamStore& other);

 private:
  std::map<std::string, ParamEntry> entries_;
  std::uint64_t seed_;
};

/// Classical momentum: v <- momentum * v - lr * grad; w <- w + v; grads are
/// zeroed afterwards. Throws NonFiniteError if any gradient is NaN/Inf.
void sgd_momentum_step(ParamStore& params, Real lr, Real momentum);

double global_grad_norm(const ParamStore& params);

/// Rescales all gradients so that their global L2 norm is at most
/// `max_norm`. Returns the norm before clipping.
double clip_grad_norm(ParamStore& params, double max_norm);

// Checkpoint file (all integers u32 little-endian, floats IEEE-754 binary32
// little-endian):
//   "NTCK" | version | entry count | header length | header (UTF-8
//   "key = value" lines) | per entry: name length, name, rank, dims...,
//   value floats, velocity floats.
// Gradients are never stored.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const ParamStore& params, const KeyValues& header);
/// Replaces `params` with the file's entries; returns the header.
KeyValues load_checkpoint(const std::string& path, ParamStore& params);

std::string encode_checkpoint(const ParamStore& params, const KeyValues& header);
KeyValues decode_checkpoint(const std::string& bytes, ParamStore& params);

}  // namespace NT_ABI
}  // namespace nt
