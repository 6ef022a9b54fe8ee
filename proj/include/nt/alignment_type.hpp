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

#include <cstddef>
#include <span>
#include <vector>

namespace nt {

/// A target sequence interleaved with one end-of-block token per block.
///
/// `tokens` holds y_1..y_{S+N}; `block_ends[b]` is the 1-based position of
/// the end-of-block token that closes block b+1, so block_ends.back() ==
/// tokens.size().
struct Alignment {
  std::vector<int> tokens;
  std::vector<std::size_t> block_ends;

  std::size_t num_blocks() const { return block_ends.size(); }
  /// Tokens of block `b` (0-based), including its trailing end-of-block.
  std::span<const int> segment(std::size_t b) const;
  /// Number of non-end-of-block tokens emitted in each block.
  std::vector<std::size_t> counts() const;
  /// The target sequence with every end-of-block removed.
  std::vector<int> targets(int eob) const;

  /// Builds the alignment that places counts[b] consecutive targets in
  /// block b. Throws InvariantError unless sum(counts) == targets.size().
  static Alignment from_counts(std::span<const int> targets, std::span<const std::size_t> counts,
                               int eob);

  friend bool operator==(const Alignment&, const Alignment&) = default;
};

/// Checks every structural invariant: exactly `num_blocks` end-of-block
/// tokens, each terminating its block; block_ends consistent with tokens;
/// per-block length in [1, max_per_block]; and, when `targets` is given,
/// stripping the end-of-block tokens recovers it. Throws InvariantError.
void validate_alignment(const Alignment& a, int eob, std::size_t num_blocks,
                        std::size_t max_per_block, const std::vector<int>* targets = nullptr);

bool is_valid_alignment(const Alignment& a, int eob, std::size_t num_blocks,
                        std::size_t max_per_block, const std::vector<int>* targets = nullptr);

}  // namespace nt
