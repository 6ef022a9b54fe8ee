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

// Alignment search.
//
// dp_best_alignment keeps, for every block b and every number j of target
// tokens consumed so far, the single best partial alignment h(j, b). Each
// h(j, b) is extended by k = 0..M-1 target tokens followed by <e>, and only
// the best candidate per (j, b+1) survives. This is approximate: the best
// full alignment may pass through a pruned h(j, b).
//
// exact_best_alignment and marginal_log_prob enumerate every alignment and
// are only meant for tiny instances.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "nt/alignment_type.hpp"
#include "nt/model.hpp"

namespace nt {
inline namespace NT_ABI {

/// h(j, b): best partial alignment that has consumed `emitted` targets by the
/// end of its last block.
struct Hypothesis {
  std::size_t emitted = 0;
  Alignment alignment;
  TransducerState state;   // after the last <e>
  double log_prob = 0;
};

/// Candidates h(j+k, b+1) for k = 0..min(M-1, S-j), in increasing k. Every
/// extension shares the steps of its shorter siblings.
std::vector<Hypothesis> extend_hypothesis(Graph& graph, const Hypothesis& hyp,
                                          const BlockMemory& block, std::span<const int> targets);

struct AlignmentResult {
  Alignment alignment;
  double log_prob = 0;
};

/// Throws InfeasibleAlignmentError if S > N(M-1).
AlignmentResult dp_best_alignment(Graph& graph, std::span<const BlockMemory> blocks,
                                  std::span<const int> targets);
AlignmentResult dp_best_alignment(const Model& model, const FeatureSequence& x,
                                  std::span<const int> targets);

/// Number of ways to place S tokens into N blocks of at most `cap` each,
/// saturating at UINT64_MAX.
std::uint64_t count_alignments(std::size_t num_blocks, std::size_t cap, std::size_t targets);

inline constexpr std::uint64_t kExactAlignmentBound = 100000;

using AlignmentVisitor = std::function<void(const Alignment&, double log_prob)>;

/// Visits every valid alignment of `targets` in lexicographic order of
/// block_ends. Throws RefusalError above `bound` alignments.
void for_each_alignment(const Model& model, const FeatureSequence& x, std::span<const int> targets,
                        const AlignmentVisitor& visit, std::uint64_t bound = kExactAlignmentBound);

/// Exhaustive argmax; ties go to the lexicographically smallest block_ends.
AlignmentResult exact_best_alignment(const Model& model, const FeatureSequence& x,
                                     std::span<const int> targets,
                                     std::uint64_t bound = kExactAlignmentBound);

/// log of the sum over all valid alignments of p(alignment | x).
double marginal_log_prob(const Model& model, const FeatureSequence& x,
                         std::span<const int> targets, std::uint64_t bound = kExactAlignmentBound);

double log_sum_exp(std::span<const double> values);

/// Per-sequence alignments tagged with the parameter version that produced
/// them.
class AlignmentCache {
 public:
  struct Entry {
    Alignment alignment;
    std::uint64_t version = 0;
  };

  void put(std::size_t id, Alignment alignment, std::uint64_t version);
  const Entry* find(std::size_t id) const;
  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }
  const std::map<std::size_t, Entry>& entries() const { return entries_; }

 private:
  std::map<std::size_t, Entry> entries_;
};

/// "id TAB tok tok <e> tok <e> ..." per line.
std::string format_alignment(const Alignment& a, const Vocab& vocab);
Alignment parse_alignment(std::string_view text, const Vocab& vocab);
void write_alignments(std::ostream& out, const std::map<std::size_t, Alignment>& alignments,
                      const Vocab& vocab);
std::map<std::size_t, Alignment> read_alignments(std::istream& in, const Vocab& vocab);

}  // namespace NT_ABI
}  // namespace nt
