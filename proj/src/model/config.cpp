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
#include <set>

#include "nt/errors.hpp"
#include "nt/model.hpp"

namespace nt {
inline namespace NT_ABI {

std::string_view to_string(AttentionKind kind) {
  switch (kind) {
    case AttentionKind::kNone: return "none";
    case AttentionKind::kDot: return "dot";
    case AttentionKind::kMlp: return "mlp";
    case AttentionKind::kLstm: return "lstm";
  }
  return "none";
}

AttentionKind parse_attention(std::string_view name) {
  if (name == "none") return AttentionKind::kNone;
  if (name == "dot") return AttentionKind::kDot;
  if (name == "mlp") return AttentionKind::kMlp;
  if (name == "lstm") return AttentionKind::kLstm;
  throw ConfigError("unknown attention kind '" + std::string(name) +
                    "' (expected none, dot, mlp or lstm)");
}

Vocab Vocab::with_eob(std::vector<std::string> symbols) {
  Vocab v;
  v.tokens = std::move(symbols);
  v.tokens.emplace_back(kEobToken);
  v.eob = static_cast<int>(v.tokens.size() - 1);
  v.validate();
  return v;
}

int Vocab::index_of(std::string_view token) const {
  const auto it = std::find(tokens.begin(), tokens.end(), token);
  if (it == tokens.end()) throw InvariantError("token '" + std::string(token) + "' not in vocabulary");
  return static_cast<int>(it - tokens.begin());
}

void Vocab::validate() const {
  NT_CHECK(tokens.size() >= 2, "vocabulary needs <e> and at least one symbol");
  const std::set<std::string> unique(tokens.begin(), tokens.end());
  NT_CHECK(unique.size() == tokens.size(), "vocabulary tokens must be unique");
  NT_CHECK(eob >= 0 && static_cast<std::size_t>(eob) < tokens.size(), "eob index out of range");
  NT_CHECK(tokens[eob] == kEobToken, "eob index must point at <e>");
  for (const auto& t : tokens) {
    NT_CHECK(!t.empty() && t.find_first_of(" \t\n") == std::string::npos,
             "vocabulary tokens must be non-empty and contain no whitespace");
  }
}

void ModelConfig::validate() const {
  NT_CHECK(input_dim > 0, "input_dim must be positive");
  NT_CHECK(!encoder_widths.empty(), "at least one encoder layer is required");
  NT_CHECK(!transducer_widths.empty(), "at least one transducer layer is required");
  for (int w : encoder_widths) NT_CHECK(w > 0, "encoder widths must be positive");
  for (int w : transducer_widths) NT_CHECK(w > 0, "transducer widths must be positive");
  NT_CHECK(embed_dim > 0, "embed_dim must be positive");
  NT_CHECK(attention_dim > 0, "attention_dim must be positive");
  NT_CHECK(block.block_size > 0, "block size must be positive");
  NT_CHECK(block.max_per_block > 0, "max tokens per block must be positive");
  vocab.validate();
  if (attention == AttentionKind::kDot) {
    NT_CHECK(state_dim() == encoder_dim(),
             "DOT attention needs the first transducer layer as wide as the encoder output");
  }
}

const std::vector<std::string>& ModelConfig::keys() {
  static const std::vector<std::string> k{
      "input_dim",     "encoder_widths", "transducer_widths", "embed_dim",
      "attention",     "attention_dim",  "vocab",             "block_size",
      "max_per_block", "block_recurrence", "block_local_encoder"};
  return k;
}

void ModelConfig::write(KeyValues& kv) const {
  kv.set("input_dim", std::to_string(input_dim));
  kv.set("encoder_widths", join_ints(encoder_widths));
  kv.set("transducer_widths", join_ints(transducer_widths));
  kv.set("embed_dim", std::to_string(embed_dim));
  kv.set("attention", std::string(to_string(attention)));
  kv.set("attention_dim", std::to_string(attention_dim));
  std::string v;
  for (const auto& t : vocab.tokens) v += (v.empty() ? "" : " ") + t;
  kv.set("vocab", v);
  kv.set("block_size", std::to_string(block.block_size));
  kv.set("max_per_block", std::to_string(block.max_per_block));
  kv.set("block_recurrence", block_recurrence ? "true" : "false");
  kv.set("block_local_encoder", block_local_encoder ? "true" : "false");
}

ModelConfig ModelConfig::read(const KeyValues& kv) {
  ModelConfig c;
  auto positive = [&](const std::string& key) {
    const auto v = kv.get_int(key);
    if (v <= 0) throw ConfigError("key '" + key + "' must be positive");
    return static_cast<std::size_t>(v);
  };
  c.input_dim = positive("input_dim");
  c.encoder_widths = kv.get_int_list("encoder_widths");
  c.transducer_widths = kv.get_int_list("transducer_widths");
  c.embed_dim = positive("embed_dim");
  c.attention = parse_attention(kv.get("attention"));
  c.attention_dim = positive("attention_dim");
  c.vocab.tokens = kv.get_words("vocab");
  const auto it = std::find(c.vocab.tokens.begin(), c.vocab.tokens.end(), kEobToken);
  if (it == c.vocab.tokens.end()) throw ConfigError("vocab must contain <e>");
  c.vocab.eob = static_cast<int>(it - c.vocab.tokens.begin());
  c.block.block_size = positive("block_size");
  c.block.max_per_block = positive("max_per_block");
  c.block_recurrence = kv.get_bool("block_recurrence");
  c.block_local_encoder = kv.get_bool("block_local_encoder");
  try {
    c.validate();
  } catch (const InvariantError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

FeatureSequence::FeatureSequence(std::size_t d, std::vector<Real> values)
    : dim(d), data(std::move(values)) {
  NT_CHECK(dim > 0, "feature dimension must be positive");
  NT_CHECK(data.size() % dim == 0, "feature data is not a whole number of frames");
}

void FeatureSequence::push_frame(std::span<const Real> f) {
  if (dim == 0) dim = f.size();
  NT_CHECK(f.size() == dim && dim > 0, "frame width mismatch");
  data.insert(data.end(), f.begin(), f.end());
}

}  // namespace NT_ABI
}  // namespace nt
