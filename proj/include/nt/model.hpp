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

// Encoder RNN, transducer RNN and attention.
//
// The input x_1..x_L is encoded by a unidirectional LSTM stack into
// h_1..h_L and cut into blocks of W frames. Within a block the transducer
// makes next-step predictions
//
//   s_m  = LSTM(s_{m-1}, [c_{m-1}; embed(y_{m-1})])
//   c_m  = context(s_m, h of the current block)
//   h'_m = LSTM(h'_{m-1}, [c_m; s_m])           (zero or more layers)
//   p(y_m | x_1..bW, y_1..m-1) = softmax(out(h'_m))
//
// and its state is carried across block boundaries. The end-of-block token
// <e> is part of the output vocabulary; emitting it moves to the next block.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nt/alignment_type.hpp"
#include "nt/kv_config.hpp"
#include "nt/param_store.hpp"
#include "nt/precision.hpp"
#include "nt/tape.hpp"

namespace nt {
inline namespace NT_ABI {

enum class AttentionKind { kNone, kDot, kMlp, kLstm };

std::string_view to_string(AttentionKind kind);
AttentionKind parse_attention(std::string_view name);

struct Vocab {
  std::vector<std::string> tokens;
  int eob = 0;

  /// `symbols` followed by "<e>".
  static Vocab with_eob(std::vector<std::string> symbols);

  std::size_t size() const { return tokens.size(); }
  int index_of(std::string_view token) const;
  void validate() const;
};

inline constexpr std::string_view kEobToken = "<e>";

struct BlockConfig {
  std::size_t block_size = 1;      // W
  std::size_t max_per_block = 8;   // M, counting the trailing <e>

  std::size_t num_blocks(std::size_t length) const {
    return (length + block_size - 1) / block_size;
  }
};

struct ModelConfig {
  std::size_t input_dim = 1;
  std::vector<int> encoder_widths{100};
  /// First entry is the s layer; any further entries form the h' stack.
  std::vector<int> transducer_widths{100};
  std::size_t embed_dim = 32;
  AttentionKind attention = AttentionKind::kNone;
  std::size_t attention_dim = 32;
  Vocab vocab;
  BlockConfig block;
  /// When false, the transducer state is reset at every block boundary
  /// (the block-independent baseline).
  bool block_recurrence = true;
  /// When true, the encoder restarts from zero state at every block.
  bool block_local_encoder = false;

  void validate() const;
  std::size_t encoder_dim() const { return static_cast<std::size_t>(encoder_widths.back()); }
  std::size_t state_dim() const { return static_cast<std::size_t>(transducer_widths.front()); }
  /// Index of the start-of-sequence row in the embedding table.
  int sos() const { return static_cast<int>(vocab.size()); }

  void write(KeyValues& kv) const;
  static ModelConfig read(const KeyValues& kv);
  static const std::vector<std::string>& keys();
};

/// An input sequence x_1..x_L of fixed-width real frames.
struct FeatureSequence {
  std::size_t dim = 0;
  std::vector<Real> data;

  FeatureSequence() = default;
  FeatureSequence(std::size_t dim, std::vector<Real> data);
  std::size_t length() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const Real> frame(std::size_t t) const { return {data.data() + t * dim, dim}; }
  void push_frame(std::span<const Real> f);
};

struct LstmCell {
  Var h;
  Var c;
};

struct TransducerState {
  std::vector<LstmCell> layers;
  LstmCell attention;   // only for LSTM-attention
  Var prev_context;     // c_{m-1}
  int prev_token = 0;   // y_{m-1}
};

/// Parameters plus architecture.
class Model {
 public:
  /// Registers parameters and initializes weights ~ U(-init_range,
  /// init_range), biases 0, from `seed`.
  Model(ModelConfig config, std::uint64_t seed, Real init_range = Real(0.08));
  /// Adopts existing parameters; throws InvariantError on any missing or
  /// mis-shaped entry.
  Model(ModelConfig config, ParamStore params);

  const ModelConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  static void register_params(const ModelConfig& config, ParamStore& params);

 private:
  ModelConfig config_;
  ParamStore params_;
};

/// Per-block encoder memory shared by every step in the block.
struct BlockMemory {
  std::size_t frames = 0;
  std::vector<Var> h;   // encoder outputs of the block
  Var stacked;          // frames x encoder_dim
  Var keys;             // frames x attention_dim (MLP / LSTM attention)
};

struct ContextResult {
  Var context;
  Var alpha;
  LstmCell attention;
};

struct StepResult {
  TransducerState state;  // prev_token not yet updated
  Var log_probs;          // log p(. | history), length |V|
  Var alpha;

  TransducerState after(int token) const {
    TransducerState s = state;
    s.prev_token = token;
    return s;
  }
};

struct BlockScore {
  Var log_prob;
  TransducerState state;
};

class Graph;

/// Incremental encoder: frames in, top-layer vectors out. Causal by
/// construction.
class EncoderStream {
 public:
  explicit EncoderStream(Graph& graph);
  Var push(std::span<const Real> frame);
  std::size_t frames_seen() const { return frames_; }

  const std::vector<LstmCell>& layers() const { return layers_; }
  /// Moves the stream onto another graph; `layers` must already live on
  /// that graph's tape.
  void rebind(Graph& graph, std::vector<LstmCell> layers);

 private:
  Graph* graph_;
  std::vector<LstmCell> layers_;
  std::size_t frames_ = 0;
};

/// Binds a Model to a Tape for one forward (and optional backward) pass.
/// With `with_grad`, backward on this tape accumulates into the model's
/// grad slots.
class Graph {
 public:
  Graph(const Model& model, Tape& tape);
  Graph(Model& model, Tape& tape, bool with_grad);

  Tape& tape() { return *tape_; }
  const ModelConfig& config() const { return *config_; }

  Var zeros(std::size_t n);
  LstmCell zero_cell(std::size_t width);

  struct Layer {
    Var weight;
    Var bias;
    std::size_t width = 0;
    std::size_t input = 0;
  };

  LstmCell lstm_step(const Layer& layer, const LstmCell& prev, Var input);
  const std::vector<Layer>& encoder_layers() const { return encoder_; }
  const std::vector<Layer>& transducer_layers() const { return transducer_; }

  std::vector<Var> encode(const FeatureSequence& x);
  BlockMemory prepare_block(std::span<const Var> block_h);
  /// Encodes x and prepares every block.
  std::vector<BlockMemory> prepare_blocks(const FeatureSequence& x);

  ContextResult compute_context(Var s, const BlockMemory& block, const LstmCell& attention);

  TransducerState initial_state();
  /// Applied when a new block starts: resets the attention RNN, and the
  /// whole transducer state when block recurrence is disabled.
  TransducerState enter_block(const TransducerState& state);

  StepResult next_step(const TransducerState& state, const BlockMemory& block);

  /// Sum of log p over `segment`, which must end with <e> and have no
  /// interior <e>. `state` is the state at the end of the previous block;
  /// enter_block is applied first.
  BlockScore block_log_prob(const TransducerState& state, const BlockMemory& block,
                            std::span<const int> segment);

  /// log p(alignment | x), a scalar node.
  Var sequence_log_prob(const FeatureSequence& x, const Alignment& alignment);

 private:
  void bind(const ParamStore& params, ParamStore* grads);
  Var param(const ParamStore& params, ParamStore* grads, const std::string& name);

  Tape* tape_;
  const ModelConfig* config_;
  std::vector<Layer> encoder_;
  std::vector<Layer> transducer_;
  Var embed_, out_w_, out_b_;
  Var att_ws_, att_wh_, att_b_, att_v_;
  Layer att_rnn_;
  Var att_proj_w_, att_proj_b_;
  std::map<std::size_t, Var> zeros_;
};

/// Convenience: fresh no-grad tape, returns log p(alignment | x).
double sequence_log_prob(const Model& model, const FeatureSequence& x, const Alignment& alignment);

/// exp of a log-prob vector.
std::vector<double> probabilities(const Tape& tape, Var log_probs);

}  // namespace NT_ABI
}  // namespace nt
