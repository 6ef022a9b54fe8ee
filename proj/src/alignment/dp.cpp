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
#include <string>

#include "nt/alignment.hpp"
#include "nt/errors.hpp"

namespace nt {
inline namespace NT_ABI {
namespace {

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  const auto last = [](const Hypothesis& h) { return h.alignment.counts().back(); };
  if (last(a) != last(b)) return last(a) < last(b);
  return a.alignment.block_ends < b.alignment.block_ends;
}

void check_targets(const ModelConfig& c, std::span<const int> targets) {
  for (int t : targets) {
    NT_CHECK(t >= 0 && static_cast<std::size_t>(t) < c.vocab.size() && t != c.vocab.eob,
             "target token out of range or equal to <e>");
  }
}

}  // namespace

std::vector<Hypothesis> extend_hypothesis(Graph& graph, const Hypothesis& hyp,
                                          const BlockMemory& block, std::span<const int> targets) {
  const ModelConfig& c = graph.config();
  const int eob = c.vocab.eob;
  NT_CHECK(hyp.emitted <= targets.size(), "hypothesis consumed more than the target");
  const std::size_t kmax = std::min(c.block.max_per_block - 1, targets.size() - hyp.emitted);
  Tape& tape = graph.tape();

  std::vector<Hypothesis> out;
  out.reserve(kmax + 1);
  TransducerState s = graph.enter_block(hyp.state);
  double prefix = 0;
  for (std::size_t k = 0;; ++k) {
    const StepResult r = graph.next_step(s, block);
    const auto lp = tape.value(r.log_probs);

    Hypothesis h;
    h.emitted = hyp.emitted + k;
    h.alignment = hyp.alignment;
    h.alignment.tokens.insert(h.alignment.tokens.end(), targets.begin() + hyp.emitted,
                              targets.begin() + hyp.emitted + k);
    h.alignment.tokens.push_back(eob);
    h.alignment.block_ends.push_back(h.alignment.tokens.size());
    h.state = r.after(eob);
    h.log_prob = hyp.log_prob + (prefix + static_cast<double>(lp[eob]));
    out.push_back(std::move(h));

    if (k == kmax) break;
    const int y = targets[hyp.emitted + k];
    prefix += static_cast<double>(lp[y]);
    s = r.after(y);
  }
  return out;
}

AlignmentResult dp_best_alignment(Graph& graph, std::span<const BlockMemory> blocks,
                                  std::span<const int> targets) {
  const ModelConfig& c = graph.config();
  check_targets(c, targets);
  const std::size_t n = blocks.size();
  const std::size_t cap = c.block.max_per_block - 1;
  const std::size_t s_len = targets.size();
  NT_CHECK(n >= 1, "dp_best_alignment: no blocks");
  if (s_len > n * cap) {
    throw InfeasibleAlignmentError("target of length " + std::to_string(s_len) +
                                   " cannot fit in " + std::to_string(n) + " blocks of at most " +
                                   std::to_string(cap) + " tokens");
  }

  std::vector<std::optional<Hypothesis>> cur(s_len + 1);
  cur[0] = Hypothesis{0, {}, graph.initial_state(), 0.0};
  for (std::size_t b = 0; b < n; ++b) {
    const std::size_t after = n - b - 1;
    const std::size_t need = s_len > after * cap ? s_len - after * cap : 0;
    std::vector<std::optional<Hypothesis>> next(s_len + 1);
    for (std::size_t j = 0; j <= s_len; ++j) {
      if (!cur[j]) continue;
      for (Hypothesis& h : extend_hypothesis(graph, *cur[j], blocks[b], targets)) {
        if (h.emitted < need) continue;
        auto& slot = next[h.emitted];
        if (!slot || better(h, *slot)) slot = std::move(h);
      }
    }
    cur = std::move(next);
  }
  NT_CHECK(cur[s_len].has_value(), "dp_best_alignment: no complete hypothesis");
  return {std::move(cur[s_len]->alignment), cur[s_len]->log_prob};
}

AlignmentResult dp_best_alignment(const Model& model, const FeatureSequence& x,
                                  std::span<const int> targets) {
  Tape tape;
  Graph g(model, tape);
  const std::vector<BlockMemory> blocks = g.prepare_blocks(x);
  return dp_best_alignment(g, blocks, targets);
}

}  // namespace NT_ABI
}  // namespace nt
