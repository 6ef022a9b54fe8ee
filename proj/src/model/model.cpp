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

#include <cmath>

#include "nt/errors.hpp"
#include "nt/model.hpp"

namespace nt {
inline namespace NT_ABI {
namespace {

std::string layer_name(const char* stack, std::size_t i, const char* what) {
  return std::string(stack) + ".l" + std::to_string(i) + "." + what;
}

std::size_t top_input_dim(const ModelConfig& c) {
  if (c.transducer_widths.size() > 1) return static_cast<std::size_t>(c.transducer_widths.back());
  return c.encoder_dim() + c.state_dim();
}

// Expected (name, dims, is_bias) for a config.
struct Spec {
  std::string name;
  std::vector<std::size_t> dims;
  bool bias;
};

std::vector<Spec> param_specs(const ModelConfig& c) {
  std::vector<Spec> out;
  auto lstm = [&](const std::string& w, const std::string& b, std::size_t in, std::size_t h) {
    out.push_back({w, {4 * h, in + h}, false});
    out.push_back({b, {4 * h}, true});
  };
  std::size_t in = c.input_dim;
  for (std::size_t i = 0; i < c.encoder_widths.size(); ++i) {
    const auto h = static_cast<std::size_t>(c.encoder_widths[i]);
    lstm(layer_name("encoder", i, "W"), layer_name("encoder", i, "b"), in, h);
    in = h;
  }
  const std::size_t enc = c.encoder_dim();
  const std::size_t v = c.vocab.size();
  out.push_back({"embedding", {v + 1, c.embed_dim}, false});
  for (std::size_t i = 0; i < c.transducer_widths.size(); ++i) {
    const auto h = static_cast<std::size_t>(c.transducer_widths[i]);
    std::size_t layer_in;
    if (i == 0) {
      layer_in = enc + c.embed_dim;
    } else if (i == 1) {
      layer_in = enc + c.state_dim();
    } else {
      layer_in = static_cast<std::size_t>(c.transducer_widths[i - 1]);
    }
    lstm(layer_name("transducer", i, "W"), layer_name("transducer", i, "b"), layer_in, h);
  }
  out.push_back({"softmax.W", {v, top_input_dim(c)}, false});
  out.push_back({"softmax.b", {v}, true});
  if (c.attention == AttentionKind::kMlp || c.attention == AttentionKind::kLstm) {
    const std::size_t a = c.attention_dim;
    out.push_back({"attention.Ws", {a, c.state_dim()}, false});
    out.push_back({"attention.Wh", {a, enc}, false});
    out.push_back({"attention.b", {a}, true});
    out.push_back({"attention.v", {a}, false});
  }
  if (c.attention == AttentionKind::kLstm) {
    const std::size_t a = c.attention_dim;
    const std::size_t w = c.block.block_size;
    lstm("attention.rnn.W", "attention.rnn.b", w, a);
    out.push_back({"attention.proj.W", {w, a}, false});
    out.push_back({"attention.proj.b", {w}, true});
  }
  return out;
}

}  // namespace

void Model::register_params(const ModelConfig& config, ParamStore& params) {
  for (const auto& s : param_specs(config)) params.add(s.name, s.dims, s.bias);
}

Model::Model(ModelConfig config, std::uint64_t seed, Real init_range)
    : config_(std::move(config)), params_(seed) {
  config_.validate();
  register_params(config_, params_);
  params_.init_uniform(init_range);
}

Model::Model(ModelConfig config, ParamStore params)
    : config_(std::move(config)), params_(std::move(params)) {
  config_.validate();
  const auto specs = param_specs(config_);
  NT_CHECK(specs.size() == params_.size(), "parameter set does not match the model config");
  for (const auto& s : specs) {
    NT_CHECK(params_.contains(s.name), "missing parameter '" + s.name + "'");
    ParamEntry& e = params_.at(s.name);
    NT_CHECK(e.value.dims() == s.dims, "parameter '" + s.name + "' has the wrong shape");
    e.is_bias = s.bias;
  }
}

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(const Model& model, Tape& tape) : tape_(&tape), config_(&model.config()) {
  bind(model.params(), nullptr);
}

Graph::Graph(Model& model, Tape& tape, bool with_grad)
    : tape_(&tape), config_(&model.config()) {
  bind(model.params(), with_grad ? &model.params() : nullptr);
}

Var Graph::param(const ParamStore& params, ParamStore* grads, const std::string& name) {
  const ParamEntry& e = params.at(name);
  return tape_->parameter(e.value, grads ? &grads->at(name).grad : nullptr);
}

void Graph::bind(const ParamStore& params, ParamStore* grads) {
  const ModelConfig& c = *config_;
  std::size_t in = c.input_dim;
  for (std::size_t i = 0; i < c.encoder_widths.size(); ++i) {
    Layer l;
    l.weight = param(params, grads, layer_name("encoder", i, "W"));
    l.bias = param(params, grads, layer_name("encoder", i, "b"));
    l.width = static_cast<std::size_t>(c.encoder_widths[i]);
    l.input = in;
    in = l.width;
    encoder_.push_back(l);
  }
  for (std::size_t i = 0; i < c.transducer_widths.size(); ++i) {
    Layer l;
    l.weight = param(params, grads, layer_name("transducer", i, "W"));
    l.bias = param(params, grads, layer_name("transducer", i, "b"));
    l.width = static_cast<std::size_t>(c.transducer_widths[i]);
    l.input = tape_->cols(l.weight) - l.width;
    transducer_.push_back(l);
  }
  embed_ = param(params, grads, "embedding");
  out_w_ = param(params, grads, "softmax.W");
  out_b_ = param(params, grads, "softmax.b");
  if (c.attention == AttentionKind::kMlp || c.attention == AttentionKind::kLstm) {
    att_ws_ = param(params, grads, "attention.Ws");
    att_wh_ = param(params, grads, "attention.Wh");
    att_b_ = param(params, grads, "attention.b");
    att_v_ = param(params, grads, "attention.v");
  }
  if (c.attention == AttentionKind::kLstm) {
    att_rnn_.weight = param(params, grads, "attention.rnn.W");
    att_rnn_.bias = param(params, grads, "attention.rnn.b");
    att_rnn_.width = c.attention_dim;
    att_rnn_.input = c.block.block_size;
    att_proj_w_ = param(params, grads, "attention.proj.W");
    att_proj_b_ = param(params, grads, "attention.proj.b");
  }
}

Var Graph::zeros(std::size_t n) {
  auto it = zeros_.find(n);
  if (it != zeros_.end()) return it->second;
  const Var z = tape_->zeros(n);
  zeros_.emplace(n, z);
  return z;
}

LstmCell Graph::zero_cell(std::size_t width) { return {zeros(width), zeros(width)}; }

LstmCell Graph::lstm_step(const Layer& layer, const LstmCell& prev, Var input) {
  Tape& t = *tape_;
  if (t.size(input) != layer.input) {
    throw InvariantError("lstm_step: input width " + std::to_string(t.size(input)) +
                         ", layer expects " + std::to_string(layer.input));
  }
  const std::size_t h = layer.width;
  const Var z = t.affine(layer.weight, t.concat({input, prev.h}), layer.bias);
  const Var i = t.sigmoid(t.slice(z, 0, h));
  const Var f = t.sigmoid(t.slice(z, h, h));
  const Var o = t.sigmoid(t.slice(z, 2 * h, h));
  const Var g = t.tanh(t.slice(z, 3 * h, h));
  const Var c = t.add(t.mul(f, prev.c), t.mul(i, g));
  return {t.mul(o, t.tanh(c)), c};
}

// ---------------------------------------------------------------------------
// Encoder

EncoderStream::EncoderStream(Graph& graph) : graph_(&graph) {
  for (const auto& l : graph.encoder_layers()) layers_.push_back(graph.zero_cell(l.width));
}

Var EncoderStream::push(std::span<const Real> frame) {
  const ModelConfig& c = graph_->config();
  if (frame.size() != c.input_dim) {
    throw InvariantError("frame width " + std::to_string(frame.size()) + ", model expects " +
                         std::to_string(c.input_dim));
  }
  if (c.block_local_encoder && frames_ % c.block.block_size == 0) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      layers_[i] = graph_->zero_cell(graph_->encoder_layers()[i].width);
    }
  }
  Var x = graph_->tape().input(frame);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i] = graph_->lstm_step(graph_->encoder_layers()[i], layers_[i], x);
    x = layers_[i].h;
  }
  ++frames_;
  return x;
}

void EncoderStream::rebind(Graph& graph, std::vector<LstmCell> layers) {
  NT_CHECK(layers.size() == graph.encoder_layers().size(), "rebind: wrong layer count");
  graph_ = &graph;
  layers_ = std::move(layers);
}

std::vector<Var> Graph::encode(const FeatureSequence& x) {
  NT_CHECK(x.length() >= 1, "encode: empty input sequence");
  if (x.dim != config_->input_dim) {
    throw InvariantError("input frames have width " + std::to_string(x.dim) +
                         ", model expects " + std::to_string(config_->input_dim));
  }
  EncoderStream enc(*this);
  std::vector<Var> out;
  out.reserve(x.length());
  for (std::size_t t = 0; t < x.length(); ++t) out.push_back(enc.push(x.frame(t)));
  return out;
}

BlockMemory Graph::prepare_block(std::span<const Var> block_h) {
  NT_CHECK(!block_h.empty(), "prepare_block: empty block");
  NT_CHECK(block_h.size() <= config_->block.block_size, "prepare_block: block longer than W");
  Tape& t = *tape_;
  BlockMemory m;
  m.frames = block_h.size();
  m.h.assign(block_h.begin(), block_h.end());
  const AttentionKind kind = config_->attention;
  if (kind == AttentionKind::kNone) return m;
  m.stacked = t.stack(block_h);
  if (kind == AttentionKind::kMlp || kind == AttentionKind::kLstm) {
    std::vector<Var> keys;
    keys.reserve(block_h.size());
    for (Var h : block_h) keys.push_back(t.affine(att_wh_, h, att_b_));
    m.keys = t.stack(keys);
  }
  return m;
}

std::vector<BlockMemory> Graph::prepare_blocks(const FeatureSequence& x) {
  const std::vector<Var> h = encode(x);
  const std::size_t w = config_->block.block_size;
  std::vector<BlockMemory> blocks;
  for (std::size_t start = 0; start < h.size(); start += w) {
    const std::size_t n = std::min(w, h.size() - start);
    blocks.push_back(prepare_block(std::span<const Var>(h).subspan(start, n)));
  }
  return blocks;
}

// ---------------------------------------------------------------------------
// Attention

ContextResult Graph::compute_context(Var s, const BlockMemory& block, const LstmCell& attention) {
  Tape& t = *tape_;
  ContextResult r;
  r.attention = attention;
  switch (config_->attention) {
    case AttentionKind::kNone: {
      std::vector<Real> onehot(block.frames, Real(0));
      onehot.back() = Real(1);
      r.context = block.h.back();
      r.alpha = t.input(onehot);
      return r;
    }
    case AttentionKind::kDot: {
      if (t.size(s) != t.cols(block.stacked)) {
        throw InvariantError("DOT attention: state width " + std::to_string(t.size(s)) +
                             " vs encoder width " + std::to_string(t.cols(block.stacked)));
      }
      r.alpha = t.softmax(t.affine(block.stacked, s));
      break;
    }
    case AttentionKind::kMlp:
    case AttentionKind::kLstm: {
      const Var q = t.affine(att_ws_, s);
      const Var energies = t.affine(t.tanh(t.add_rows(block.keys, q)), att_v_);
      if (config_->attention == AttentionKind::kMlp) {
        r.alpha = t.softmax(energies);
        break;
      }
      const std::size_t w = config_->block.block_size;
      const Var in = block.frames < w ? t.pad(energies, w) : energies;
      r.attention = lstm_step(att_rnn_, attention, in);
      Var logits = t.affine(att_proj_w_, r.attention.h, att_proj_b_);
      if (block.frames < w) logits = t.slice(logits, 0, block.frames);
      r.alpha = t.softmax(logits);
      break;
    }
  }
  r.context = t.matvec_t(block.stacked, r.alpha);
  return r;
}

// ---------------------------------------------------------------------------
// Transducer

TransducerState Graph::initial_state() {
  TransducerState s;
  for (const auto& l : transducer_) s.layers.push_back(zero_cell(l.width));
  if (config_->attention == AttentionKind::kLstm) s.attention = zero_cell(config_->attention_dim);
  s.prev_context = zeros(config_->encoder_dim());
  s.prev_token = config_->sos();
  return s;
}

TransducerState Graph::enter_block(const TransducerState& state) {
  if (!config_->block_recurrence) return initial_state();
  TransducerState s = state;
  if (config_->attention == AttentionKind::kLstm) s.attention = zero_cell(config_->attention_dim);
  return s;
}

StepResult Graph::next_step(const TransducerState& state, const BlockMemory& block) {
  Tape& t = *tape_;
  NT_CHECK(state.layers.size() == transducer_.size(), "next_step: state has wrong layer count");
  NT_CHECK(state.prev_token >= 0 && state.prev_token <= config_->sos(),
           "next_step: previous token out of range");
  StepResult r;
  r.state.layers.resize(transducer_.size());
  r.state.prev_token = state.prev_token;

  const Var x = t.concat({state.prev_context, t.row(embed_, static_cast<std::size_t>(state.prev_token))});
  const LstmCell s = lstm_step(transducer_[0], state.layers[0], x);
  r.state.layers[0] = s;

  const ContextResult ctx = compute_context(s.h, block, state.attention);
  r.state.attention = ctx.attention;
  r.state.prev_context = ctx.context;
  r.alpha = ctx.alpha;

  Var top = t.concat({ctx.context, s.h});
  for (std::size_t i = 1; i < transducer_.size(); ++i) {
    r.state.layers[i] = lstm_step(transducer_[i], state.layers[i], top);
    top = r.state.layers[i].h;
  }
  r.log_probs = t.log_softmax(t.affine(out_w_, top, out_b_));
  return r;
}

BlockScore Graph::block_log_prob(const TransducerState& state, const BlockMemory& block,
                                 std::span<const int> segment) {
  const ModelConfig& c = *config_;
  NT_CHECK(!segment.empty() && segment.size() <= c.block.max_per_block,
           "block segment length must be in [1, M]");
  NT_CHECK(segment.back() == c.vocab.eob, "block segment must end with <e>");
  for (std::size_t i = 0; i < segment.size(); ++i) {
    NT_CHECK(segment[i] >= 0 && static_cast<std::size_t>(segment[i]) < c.vocab.size(),
             "block segment token out of range");
    NT_CHECK(i + 1 == segment.size() || segment[i] != c.vocab.eob,
             "block segment has an interior <e>");
  }
  Tape& t = *tape_;
  TransducerState s = enter_block(state);
  std::vector<Var> terms;
  terms.reserve(segment.size());
  for (int tok : segment) {
    const StepResult r = next_step(s, block);
    terms.push_back(t.pick(r.log_probs, static_cast<std::size_t>(tok)));
    s = r.after(tok);
  }
  return {t.sum(terms), std::move(s)};
}

Var Graph::sequence_log_prob(const FeatureSequence& x, const Alignment& alignment) {
  const std::size_t n = config_->block.num_blocks(x.length());
  if (alignment.num_blocks() != n) {
    throw InvariantError("alignment has " + std::to_string(alignment.num_blocks()) +
                         " blocks but the input has " + std::to_string(n));
  }
  const std::vector<BlockMemory> blocks = prepare_blocks(x);
  TransducerState s = initial_state();
  std::vector<Var> parts;
  parts.reserve(n);
  for (std::size_t b = 0; b < n; ++b) {
    BlockScore score = block_log_prob(s, blocks[b], alignment.segment(b));
    parts.push_back(score.log_prob);
    s = std::move(score.state);
  }
  return tape_->sum(parts);
}

double sequence_log_prob(const Model& model, const FeatureSequence& x, const Alignment& alignment) {
  Tape tape;
  Graph g(model, tape);
  return static_cast<double>(tape.scalar(g.sequence_log_prob(x, alignment)));
}

std::vector<double> probabilities(const Tape& tape, Var log_probs) {
  std::vector<double> p;
  for (Real v : tape.value(log_probs)) p.push_back(std::exp(static_cast<double>(v)));
  return p;
}

}  // namespace NT_ABI
}  // namespace nt
