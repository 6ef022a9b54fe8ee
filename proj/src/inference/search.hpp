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

#include <optional>
#include <span>
#include <vector>

#include "nt/inference.hpp"

namespace nt {
inline namespace NT_ABI {
namespace detail {

struct Prefix {
  std::vector<int> tokens;               // alignment order, <e> included
  std::vector<std::size_t> block_ends;
  std::size_t block = 0;                 // index into the searched blocks
  std::size_t in_block = 0;              // non-<e> tokens in the current block
  std::size_t emitted = 0;               // non-<e> tokens overall
  TransducerState state;                 // already entered into `block`
  double log_prob = 0;
};

/// (log_prob desc, tokens asc).
bool ranks_before(double lp_a, std::span<const int> a, double lp_b, std::span<const int> b);

/// Beam search over `blocks`, starting from `start`. <e> in the last block
/// completes a prefix. Returns nullopt only if nothing completed.
std::optional<Prefix> run_beam(Graph& graph, std::span<const BlockMemory> blocks, Prefix start,
                               const BeamConfig& cfg);

DecodeResult to_result(const Prefix& p, int eob);

}  // namespace detail
}  // namespace NT_ABI
}  // namespace nt
