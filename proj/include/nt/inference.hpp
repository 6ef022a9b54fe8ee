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

// Decoding.
//
// beam_decode is step-synchronous: every live prefix is extended by one
// symbol per step and the n best live prefixes survive. Emitting <e> moves a
// prefix to the next block, or completes it in the last block. The search
// stops once the best completed candidate beats every live prefix, since
// log-probabilities only decrease.
//
// Ties are broken towards the lexicographically smallest token sequence
// (alignment order, <e> included) everywhere, so beam_decode with a
// saturating width and exhaustive_decode return the same candidate.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nt/alignment_type.hpp"
#include "nt/model.hpp"

namespace nt {
inline namespace NT_ABI {

struct BeamConfig {
  std::size_t beam_width = 4;
  /// Cap on emitted tokens, <e> not counted.
  std::size_t max_output_len = 64;

  void validate() const;
};

struct DecodeResult {
  std::vector<int> tokens;                 // without <e>
  Alignment alignment;
  double log_prob = 0;
  std::vector<std::vector<int>> blocks;    // tokens emitted in each block
  bool complete = true;
};

DecodeResult beam_decode(const Model& model, const FeatureSequence& x, const BeamConfig& cfg);
DecodeResult beam_decode(Graph& graph, std::span<const BlockMemory> blocks, const BeamConfig& cfg);

inline constexpr std::uint64_t kExhaustiveDecodeBound = 1000000;

/// Number of (token sequence, alignment) candidates with at most
/// `max_output_len` tokens; saturates at UINT64_MAX.
std::uint64_t count_decode_candidates(std::size_t num_blocks, std::size_t cap,
                                      std::size_t symbols, std::size_t max_output_len);

using CandidateVisitor = std::function<void(const Alignment&, double log_prob)>;

/// Visits every complete candidate (depth first, tokens in index order).
/// Throws RefusalError above `bound` candidates.
void for_each_candidate(const Model& model, const FeatureSequence& x, std::size_t max_output_len,
                        const CandidateVisitor& visit,
                        std::uint64_t bound = kExhaustiveDecodeBound);

/// True argmax over every complete candidate. Throws RefusalError above
/// `bound` candidates.
DecodeResult exhaustive_decode(const Model& model, const FeatureSequence& x,
                               std::size_t max_output_len,
                               std::uint64_t bound = kExhaustiveDecodeBound);

/// Online decoder. Runs a beam confined to each block as soon as the block's
/// frames are in, then commits the best segment; commitments are final.
class StreamingDecoder {
 public:
  StreamingDecoder(const Model& model, BeamConfig cfg);
  ~StreamingDecoder();
  StreamingDecoder(const StreamingDecoder&) = delete;
  StreamingDecoder& operator=(const StreamingDecoder&) = delete;

  /// Returns the block's committed tokens when this frame closes a block.
  std::optional<std::vector<int>> push(std::span<const Real> frame);
  /// Flushes a partial final block, if any.
  std::optional<std::vector<int>> finish();

  std::size_t frames_seen() const;
  /// Everything committed so far.
  const DecodeResult& result() const { return result_; }

 private:
  std::vector<int> commit_block();
  void compact();

  const Model* model_;
  BeamConfig cfg_;
  std::unique_ptr<Tape> tape_;
  std::unique_ptr<Graph> graph_;
  std::unique_ptr<EncoderStream> encoder_;
  std::vector<Var> pending_;
  TransducerState state_;
  DecodeResult result_;
  bool finished_ = false;
};

using FrameSource = std::function<std::optional<std::vector<Real>>()>;
using CommitFn = std::function<void(std::size_t block, const std::vector<int>& tokens)>;

/// Pulls frames until the source returns nullopt; `on_commit` fires once per
/// block.
DecodeResult streaming_decode(const Model& model, const FrameSource& source, const BeamConfig& cfg,
                              const CommitFn& on_commit = {});
DecodeResult streaming_decode(const Model& model, const FeatureSequence& x, const BeamConfig& cfg,
                              const CommitFn& on_commit = {});

}  // namespace NT_ABI
}  // namespace nt
