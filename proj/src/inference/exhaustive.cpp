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

#include <limits>
#include <string>

#include "nt/errors.hpp"
#include "search.hpp"

namespace nt {
inline namespace NT_ABI {

std::uint64_t count_decode_candidates(std::size_t num_blocks, std::size_t cap,
                                      std::size_t symbols, std::size_t max_output_len) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  auto add = [](std::uint64_t a, std::uint64_t b) { return a > kMax - b ? kMax : a + b; };
  auto mul = [](std::uint64_t a, std::uint64_t b) {
    return (a != 0 && b > kMax / a) ? kMax : a * b;
  };
  // ways[j]: candidates having emitted j tokens so far.
  std::vector<std::uint64_t> ways(max_output_len + 1, 0);
  ways[0] = 1;
  for (std::size_t b = 0; b < num_blocks; ++b) {
    std::vector<std::uint64_t> next(max_output_len + 1, 0);
    for (std::size_t j = 0; j <= max_output_len; ++j) {
      std::uint64_t w = ways[j];
      for (std::size_t k = 0; k <= cap && j + k <= max_output_len && w != 0; ++k) {
        next[j + k] = add(next[j + k], w);
        w = mul(w, symbols);
      }
    }
    ways = std::move(next);
  }
  std::uint64_t total = 0;
  for (std::uint64_t w : ways) total = add(total, w);
  return total;
}

namespace {

struct Search {
  Graph& graph;
  std::span<const BlockMemory> blocks;
  std::size_t max_len;
  std::size_t cap;
  int eob;
  const CandidateVisitor& visit;
  detail::Prefix cur;

  void run() {
    Tape& tape = graph.tape();
    const StepResult r = graph.next_step(cur.state, blocks[cur.block]);
    // Copied: recursion below grows the tape and may move its arena.
    const std::vector<Real> lp(tape.value(r.log_probs).begin(), tape.value(r.log_probs).end());
    const int vocab = static_cast<int>(lp.size());
    const detail::Prefix saved = cur;
    for (int v = 0; v < vocab; ++v) {
      if (v != eob && (saved.in_block >= cap || saved.emitted >= max_len)) continue;
      cur.tokens.push_back(v);
      cur.log_prob = saved.log_prob + static_cast<double>(lp[v]);
      cur.state = r.after(v);
      if (v == eob) {
        cur.block_ends.push_back(cur.tokens.size());
        if (saved.block + 1 == blocks.size()) {
          visit(Alignment{cur.tokens, cur.block_ends}, cur.log_prob);
        } else {
          ++cur.block;
          cur.in_block = 0;
          cur.state = graph.enter_block(cur.state);
          run();
        }
      } else {
        ++cur.in_block;
        ++cur.emitted;
        run();
      }
      cur = saved;
    }
  }
};

}  // namespace

void for_each_candidate(const Model& model, const FeatureSequence& x, std::size_t max_output_len,
                        const CandidateVisitor& visit, std::uint64_t bound) {
  const ModelConfig& c = model.config();
  const std::size_t n = c.block.num_blocks(x.length());
  const std::size_t cap = c.block.max_per_block - 1;
  const std::uint64_t count = count_decode_candidates(n, cap, c.vocab.size() - 1, max_output_len);
  if (count > bound) {
    throw RefusalError("exhaustive decode over " + std::to_string(count) +
                       " candidates exceeds the bound of " + std::to_string(bound));
  }
  Tape tape;
  Graph g(model, tape);
  const std::vector<BlockMemory> blocks = g.prepare_blocks(x);
  Search s{g, blocks, max_output_len, cap, c.vocab.eob, visit, {}};
  s.cur.state = g.enter_block(g.initial_state());
  s.run();
}

DecodeResult exhaustive_decode(const Model& model, const FeatureSequence& x,
                               std::size_t max_output_len, std::uint64_t bound) {
  std::optional<detail::Prefix> best;
  for_each_candidate(
      model, x, max_output_len,
      [&](const Alignment& a, double lp) {
        if (!best || detail::ranks_before(lp, a.tokens, best->log_prob, best->tokens)) {
          detail::Prefix p;
          p.tokens = a.tokens;
          p.block_ends = a.block_ends;
          p.log_prob = lp;
          best = std::move(p);
        }
      },
      bound);
  NT_CHECK(best.has_value(), "exhaustive_decode: no candidate");
  return detail::to_result(*best, model.config().vocab.eob);
}

}  // namespace NT_ABI
}  // namespace nt
