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

#include "nt/errors.hpp"
#include "search.hpp"

namespace nt {
inline namespace NT_ABI {

void BeamConfig::validate() const {
  NT_CHECK(beam_width >= 1, "beam width must be at least 1");
  NT_CHECK(max_output_len >= 1, "max output length must be at least 1");
}

namespace detail {

bool ranks_before(double lp_a, std::span<const int> a, double lp_b, std::span<const int> b) {
  if (lp_a != lp_b) return lp_a > lp_b;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

namespace {

struct Candidate {
  std::size_t parent;
  int token;
  double log_prob;
};

}  // namespace

std::optional<Prefix> run_beam(Graph& graph, std::span<const BlockMemory> blocks, Prefix start,
                               const BeamConfig& cfg) {
  cfg.validate();
  const ModelConfig& c = graph.config();
  const int eob = c.vocab.eob;
  const int vocab = static_cast<int>(c.vocab.size());
  const std::size_t cap = c.block.max_per_block - 1;
  const std::size_t last = blocks.size() - 1;
  Tape& tape = graph.tape();

  std::vector<Prefix> live;
  live.push_back(std::move(start));
  std::optional<Prefix> best;
  std::vector<StepResult> steps;
  std::vector<Candidate> cands;
  std::vector<int> key_a, key_b;

  auto key = [](std::vector<int>& out, const Prefix& p, int token) {
    out.assign(p.tokens.begin(), p.tokens.end());
    out.push_back(token);
  };

  while (!live.empty()) {
    double top = live.front().log_prob;
    for (const Prefix& p : live) top = std::max(top, p.log_prob);
    if (best && best->log_prob > top) break;

    steps.clear();
    cands.clear();
    for (std::size_t i = 0; i < live.size(); ++i) {
      const Prefix& p = live[i];
      steps.push_back(graph.next_step(p.state, blocks[p.block]));
      const auto lp = tape.value(steps.back().log_probs);
      for (int v = 0; v < vocab; ++v) {
        const double score = p.log_prob + static_cast<double>(lp[v]);
        if (v == eob) {
          if (p.block == last) {
            key(key_a, p, eob);
            if (!best || ranks_before(score, key_a, best->log_prob, best->tokens)) {
              Prefix done = p;
              done.tokens.push_back(eob);
              done.block_ends.push_back(done.tokens.size());
              done.state = steps.back().after(eob);
              done.log_prob = score;
              best = std::move(done);
            }
            continue;
          }
        } else if (p.in_block >= cap || p.emitted >= cfg.max_output_len) {
          continue;
        }
        cands.push_back({i, v, score});
      }
    }

    const std::size_t keep = std::min(cfg.beam_width, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                      [&](const Candidate& a, const Candidate& b) {
                        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                        key(key_a, live[a.parent], a.token);
                        key(key_b, live[b.parent], b.token);
                        return key_a < key_b;
                      });

    std::vector<Prefix> next;
    next.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      const Candidate& cand = cands[i];
      Prefix q = live[cand.parent];
      q.tokens.push_back(cand.token);
      q.log_prob = cand.log_prob;
      q.state = steps[cand.parent].after(cand.token);
      if (cand.token == eob) {
        q.block_ends.push_back(q.tokens.size());
        ++q.block;
        q.in_block = 0;
        q.state = graph.enter_block(q.state);
      } else {
        ++q.in_block;
        ++q.emitted;
      }
      next.push_back(std::move(q));
    }
    live = std::move(next);
  }
  return best;
}

DecodeResult to_result(const Prefix& p, int eob) {
  DecodeResult r;
  r.alignment.tokens = p.tokens;
  r.alignment.block_ends = p.block_ends;
  r.log_prob = p.log_prob;
  r.blocks.emplace_back();
  for (int t : p.tokens) {
    if (t == eob) {
      r.blocks.emplace_back();
    } else {
      r.tokens.push_back(t);
      r.blocks.back().push_back(t);
    }
  }
  r.blocks.pop_back();
  return r;
}

}  // namespace detail

DecodeResult beam_decode(Graph& graph, std::span<const BlockMemory> blocks, const BeamConfig& cfg) {
  NT_CHECK(!blocks.empty(), "beam_decode: no blocks");
  detail::Prefix start;
  start.state = graph.enter_block(graph.initial_state());
  const auto best = detail::run_beam(graph, blocks, std::move(start), cfg);
  if (!best) {
    DecodeResult r;
    r.complete = false;
    return r;
  }
  return detail::to_result(*best, graph.config().vocab.eob);
}

DecodeResult beam_decode(const Model& model, const FeatureSequence& x, const BeamConfig& cfg) {
  Tape tape;
  Graph g(model, tape);
  const std::vector<BlockMemory> blocks = g.prepare_blocks(x);
  return beam_decode(g, blocks, cfg);
}

}  // namespace NT_ABI
}  // namespace nt
