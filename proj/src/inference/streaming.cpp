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

#include "nt/errors.hpp"
#include "search.hpp"

namespace nt {
inline namespace NT_ABI {
namespace {

Var copy_var(const Tape& from, Tape& to, Var v) {
  if (!v.valid()) return v;
  return to.input_matrix(from.value(v), from.rows(v), from.cols(v));
}

LstmCell copy_cell(const Tape& from, Tape& to, const LstmCell& c) {
  return {copy_var(from, to, c.h), copy_var(from, to, c.c)};
}

}  // namespace

StreamingDecoder::StreamingDecoder(const Model& model, BeamConfig cfg)
    : model_(&model), cfg_(cfg) {
  cfg_.validate();
  tape_ = std::make_unique<Tape>();
  graph_ = std::make_unique<Graph>(model, *tape_);
  encoder_ = std::make_unique<EncoderStream>(*graph_);
  state_ = graph_->initial_state();
}

StreamingDecoder::~StreamingDecoder() = default;

std::size_t StreamingDecoder::frames_seen() const { return encoder_->frames_seen(); }

std::optional<std::vector<int>> StreamingDecoder::push(std::span<const Real> frame) {
  NT_CHECK(!finished_, "StreamingDecoder: push after finish");
  pending_.push_back(encoder_->push(frame));
  if (pending_.size() < model_->config().block.block_size) return std::nullopt;
  return commit_block();
}

std::optional<std::vector<int>> StreamingDecoder::finish() {
  NT_CHECK(!finished_, "StreamingDecoder: finish called twice");
  finished_ = true;
  if (pending_.empty()) {
    NT_CHECK(frames_seen() > 0, "StreamingDecoder: empty input stream");
    return std::nullopt;
  }
  return commit_block();
}

std::vector<int> StreamingDecoder::commit_block() {
  const int eob = model_->config().vocab.eob;
  const BlockMemory block = graph_->prepare_block(pending_);
  detail::Prefix start;
  start.state = graph_->enter_block(state_);
  start.emitted = result_.tokens.size();
  const auto best = detail::run_beam(*graph_, std::span(&block, 1), std::move(start), cfg_);
  NT_CHECK(best.has_value(), "StreamingDecoder: block search produced no candidate");

  std::vector<int> seg(best->tokens.begin(), best->tokens.end() - 1);
  result_.tokens.insert(result_.tokens.end(), seg.begin(), seg.end());
  result_.alignment.tokens.insert(result_.alignment.tokens.end(), best->tokens.begin(),
                                  best->tokens.end());
  result_.alignment.block_ends.push_back(result_.alignment.tokens.size());
  result_.log_prob += best->log_prob;
  result_.blocks.push_back(seg);
  NT_CHECK(best->tokens.back() == eob, "StreamingDecoder: committed block lacks <e>");
  state_ = best->state;
  pending_.clear();
  compact();
  return seg;
}

// Moves the carried state onto a fresh tape so memory stays bounded on long
// streams.
void StreamingDecoder::compact() {
  auto tape = std::make_unique<Tape>();
  auto graph = std::make_unique<Graph>(*model_, *tape);
  TransducerState s;
  for (const LstmCell& c : state_.layers) s.layers.push_back(copy_cell(*tape_, *tape, c));
  s.attention = copy_cell(*tape_, *tape, state_.attention);
  s.prev_context = copy_var(*tape_, *tape, state_.prev_context);
  s.prev_token = state_.prev_token;
  std::vector<LstmCell> enc;
  for (const LstmCell& c : encoder_->layers()) enc.push_back(copy_cell(*tape_, *tape, c));
  encoder_->rebind(*graph, std::move(enc));
  state_ = std::move(s);
  graph_ = std::move(graph);
  tape_ = std::move(tape);
}

DecodeResult streaming_decode(const Model& model, const FrameSource& source, const BeamConfig& cfg,
                              const CommitFn& on_commit) {
  StreamingDecoder dec(model, cfg);
  std::size_t block = 0;
  while (auto frame = source()) {
    if (auto seg = dec.push(*frame)) {
      if (on_commit) on_commit(block, *seg);
      ++block;
    }
  }
  if (auto seg = dec.finish()) {
    if (on_commit) on_commit(block, *seg);
  }
  return dec.result();
}

DecodeResult streaming_decode(const Model& model, const FeatureSequence& x, const BeamConfig& cfg,
                              const CommitFn& on_commit) {
  std::size_t t = 0;
  const FrameSource source = [&]() -> std::optional<std::vector<Real>> {
    if (t == x.length()) return std::nullopt;
    const auto f = x.frame(t++);
    return std::vector<Real>(f.begin(), f.end());
  };
  return streaming_decode(model, source, cfg, on_commit);
}

}  // namespace NT_ABI
}  // namespace nt
