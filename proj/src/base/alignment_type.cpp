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

#include "nt/alignment_type.hpp"

#include <numeric>
#include <string>

#include "nt/errors.hpp"

namespace nt {

std::span<const int> Alignment::segment(std::size_t b) const {
  NT_CHECK(b < block_ends.size(), "segment: block out of range");
  const std::size_t begin = b == 0 ? 0 : block_ends[b - 1];
  const std::size_t end = block_ends[b];
  NT_CHECK(begin < end && end <= tokens.size(), "segment: malformed block_ends");
  return std::span<const int>(tokens).subspan(begin, end - begin);
}

std::vector<std::size_t> Alignment::counts() const {
  std::vector<std::size_t> out;
  out.reserve(block_ends.size());
  for (std::size_t b = 0; b < block_ends.size(); ++b) out.push_back(segment(b).size() - 1);
  return out;
}

std::vector<int> Alignment::targets(int eob) const {
  std::vector<int> out;
  for (int t : tokens) {
    if (t != eob) out.push_back(t);
  }
  return out;
}

Alignment Alignment::from_counts(std::span<const int> targets,
                                 std::span<const std::size_t> counts, int eob) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  NT_CHECK(total == targets.size(), "from_counts: counts do not sum to the target length");
  Alignment a;
  a.tokens.reserve(targets.size() + counts.size());
  std::size_t j = 0;
  for (std::size_t c : counts) {
    for (std::size_t k = 0; k < c; ++k) a.tokens.push_back(targets[j++]);
    a.tokens.push_back(eob);
    a.block_ends.push_back(a.tokens.size());
  }
  return a;
}

void validate_alignment(const Alignment& a, int eob, std::size_t num_blocks,
                        std::size_t max_per_block, const std::vector<int>* targets) {
  if (a.block_ends.size() != num_blocks) {
    throw InvariantError("alignment has " + std::to_string(a.block_ends.size()) +
                         " blocks, expected " + std::to_string(num_blocks));
  }
  std::size_t eob_count = 0;
  for (int t : a.tokens) eob_count += t == eob;
  NT_CHECK(eob_count == num_blocks, "alignment end-of-block count differs from block count");
  NT_CHECK(!a.block_ends.empty() && a.block_ends.back() == a.tokens.size(),
           "last block end must be the final position");
  std::size_t prev = 0;
  for (std::size_t b = 0; b < a.block_ends.size(); ++b) {
    const std::size_t e = a.block_ends[b];
    NT_CHECK(e > prev, "block ends must be strictly increasing");
    NT_CHECK(e - prev <= max_per_block, "block segment longer than max tokens per block");
    NT_CHECK(a.tokens[e - 1] == eob, "block does not end with the end-of-block token");
    prev = e;
  }
  if (targets != nullptr) {
    NT_CHECK(a.targets(eob) == *targets, "alignment does not strip to the target sequence");
  }
}

bool is_valid_alignment(const Alignment& a, int eob, std::size_t num_blocks,
                        std::size_t max_per_block, const std::vector<int>* targets) {
  try {
    validate_alignment(a, eob, num_blocks, max_per_block, targets);
    return true;
  } catch (const InvariantError&) {
    return false;
  }
}

}  // namespace nt
