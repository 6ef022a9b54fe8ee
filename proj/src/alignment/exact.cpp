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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nt/alignment.hpp"
#include "nt/errors.hpp"

namespace nt {
inline namespace NT_ABI {

std::uint64_t count_alignments(std::size_t num_blocks, std::size_t cap, std::size_t targets) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> ways(targets + 1, 0);
  ways[0] = 1;
  for (std::size_t b = 0; b < num_blocks; ++b) {
    std::vector<std::uint64_t> next(targets + 1, 0);
    for (std::size_t j = 0; j <= targets; ++j) {
      if (ways[j] == 0) continue;
      for (std::size_t k = 0; k <= cap && j + k <= targets; ++k) {
        next[j + k] = next[j + k] > kMax - ways[j] ? kMax : next[j + k] + ways[j];
      }
    }
    ways = std::move(next);
  }
  return ways[targets];
}

namespace {

struct Enumerator {
  Graph& graph;
  std::span<const BlockMemory> blocks;
  std::span<const int> targets;
  const AlignmentVisitor& visit;
  std::vector<std::size_t> counts;
  int eob;
  std::size_t cap;

  void run(std::size_t b, std::size_t j, const TransducerState& state, double log_prob) {
    const std::size_t n = blocks.size();
    if (b == n) {
      if (j == targets.size()) visit(Alignment::from_counts(targets, counts, eob), log_prob);
      return;
    }
    const std::size_t after = n - b - 1;
    const std::size_t s_len = targets.size();
    const std::size_t kmax = std::min(cap, s_len - j);
    Tape& tape = graph.tape();
    TransducerState s = graph.enter_block(state);
    double prefix = 0;
    for (std::size_t k = 0; k <= kmax; ++k) {
      const StepResult r = graph.next_step(s, blocks[b]);
      // Copied: recursion below grows the tape and may move its arena.
      const std::vector<Real> lp(tape.value(r.log_probs).begin(), tape.value(r.log_probs).end());
      if (s_len - (j + k) <= after * cap) {
        counts.push_back(k);
        run(b + 1, j + k, r.after(eob), log_prob + (prefix + static_cast<double>(lp[eob])));
        counts.pop_back();
      }
      if (k == kmax) break;
      const int y = targets[j + k];
      prefix += static_cast<double>(lp[y]);
      s = r.after(y);
    }
  }
};

}  // namespace

void for_each_alignment(const Model& model, const FeatureSequence& x, std::span<const int> targets,
                        const AlignmentVisitor& visit, std::uint64_t bound) {
  const ModelConfig& c = model.config();
  for (int t : targets) {
    NT_CHECK(t >= 0 && static_cast<std::size_t>(t) < c.vocab.size() && t != c.vocab.eob,
             "target token out of range or equal to <e>");
  }
  const std::size_t n = c.block.num_blocks(x.length());
  const std::size_t cap = c.block.max_per_block - 1;
  if (targets.size() > n * cap) {
    throw InfeasibleAlignmentError("target does not fit in " + std::to_string(n) + " blocks");
  }
  const std::uint64_t count = count_alignments(n, cap, targets.size());
  if (count > bound) {
    throw RefusalError("enumeration of " + std::to_string(count) +
                       " alignments exceeds the bound of " + std::to_string(bound));
  }
  Tape tape;
  Graph g(model, tape);
  const std::vector<BlockMemory> blocks = g.prepare_blocks(x);
  Enumerator e{g, blocks, targets, visit, {}, c.vocab.eob, cap};
  e.run(0, 0, g.initial_state(), 0.0);
}

AlignmentResult exact_best_alignment(const Model& model, const FeatureSequence& x,
                                     std::span<const int> targets, std::uint64_t bound) {
  std::optional<AlignmentResult> best;
  for_each_alignment(
      model, x, targets,
      [&](const Alignment& a, double lp) {
        if (!best || lp > best->log_prob) best = AlignmentResult{a, lp};
      },
      bound);
  NT_CHECK(best.has_value(), "exact_best_alignment: no alignment visited");
  return *best;
}

double marginal_log_prob(const Model& model, const FeatureSequence& x,
                         std::span<const int> targets, std::uint64_t bound) {
  std::vector<double> scores;
  for_each_alignment(
      model, x, targets, [&](const Alignment&, double lp) { scores.push_back(lp); }, bound);
  return log_sum_exp(scores);
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double acc = 0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

}  // namespace NT_ABI
}  // namespace nt
