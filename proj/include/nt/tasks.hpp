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

// Synthetic tasks and evaluation.
//
// Addition: "a + reverse(b) <s>" in, reverse(a + b) out, one input token
// per one-hot frame. E.g. 2 + 527 is presented as "2 + 7 2 5 <s>" and the
// target is "9 2 5".
//
// Recurrence probe: blocks of W frames; the first frame of block b carries a
// digit sym_b, the rest are filler. The target for block b is one digit,
//   sym_b                              if span == 0 or b <= span
//   (sym_b + sym_{b - span}) mod 10    otherwise
// so a model that forgets everything at block boundaries cannot solve it.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nt/alignment_type.hpp"
#include "nt/inference.hpp"
#include "nt/model.hpp"

namespace nt {
inline namespace NT_ABI {

/// Symbolic example, as written in dataset dumps.
struct TokenExample {
  std::vector<std::string> input;
  std::vector<std::string> target;

  friend bool operator==(const TokenExample&, const TokenExample&) = default;
};

/// A training / evaluation item in model form.
struct Sequence {
  std::size_t id = 0;
  FeatureSequence x;
  std::vector<int> targets;
  std::optional<Alignment> alignment;   // a given alignment, if the task has one
};

/// One-hot frames over `symbols`.
FeatureSequence one_hot(std::span<const std::string> tokens, std::span<const std::string> symbols);

// --- addition --------------------------------------------------------------

struct AdditionExample {
  int a = 0;
  int b = 0;
  TokenExample tokens;
};

const std::vector<std::string>& addition_input_symbols();   // 0-9 + <s>
Vocab addition_vocab();                                       // 0-9 <e>

AdditionExample make_addition(int a, int b);
/// Example `index` of the stream for `seed`: operand lengths uniform in
/// 1..max_digits, then values uniform within that length.
AdditionExample gen_addition_one(std::uint64_t seed, std::size_t index, int max_digits = 3);
std::vector<AdditionExample> gen_addition(std::uint64_t seed, std::size_t count,
                                          int max_digits = 3, std::size_t first_index = 0);
/// Re-derives a and b from the input tokens and checks the target.
bool check_addition(const TokenExample& ex);

// --- recurrence probe -----------------------------------------------------

struct ProbeConfig {
  std::size_t blocks = 8;
  std::size_t block_size = 2;
  std::size_t span = 2;
};

inline constexpr std::string_view kProbeFiller = "_";

const std::vector<std::string>& probe_input_symbols();      // 0-9 _
Vocab probe_vocab();                                          // 0-9 <e>

std::vector<int> probe_targets(std::span<const int> symbols, std::size_t span);
TokenExample gen_probe_one(std::uint64_t seed, std::size_t index, const ProbeConfig& cfg);
std::vector<TokenExample> gen_recurrence_probe(std::uint64_t seed, std::size_t count,
                                               const ProbeConfig& cfg, std::size_t first_index = 0);
/// Recovers the symbols from the input tokens and checks the targets.
bool check_probe(const TokenExample& ex, const ProbeConfig& cfg);
/// One target then <e> in every block.
Alignment probe_alignment(std::span<const int> targets, int eob);

// --- conversion -------------------------------------------------------------

/// Builds model-ready sequences with ids first_id, first_id + 1, ...
std::vector<Sequence> to_sequences(std::span<const TokenExample> examples,
                                   std::span<const std::string> input_symbols, const Vocab& vocab,
                                   std::size_t first_id = 0);

std::vector<std::string> detokenize(std::span<const int> tokens, const Vocab& vocab);

// --- dataset dumps ("input tokens TAB target tokens") ---------------------

void write_examples(std::ostream& out, std::span<const TokenExample> examples);
std::vector<TokenExample> read_examples(std::istream& in);

// --- evaluation -------------------------------------------------------------

struct EvalReport {
  double sequence_error_rate = 0;
  double token_error_rate = 0;
  std::size_t count = 0;
  std::size_t sequence_errors = 0;
  std::size_t edits = 0;
  std::size_t reference_tokens = 0;
};

std::size_t edit_distance(std::span<const int> a, std::span<const int> b);

using Decoder = std::function<std::vector<int>(const Sequence&)>;

/// Runs `decode` on every sequence (in parallel when workers > 1; the
/// decoder must then be thread-safe).
EvalReport evaluate(std::span<const Sequence> data, const Decoder& decode, std::size_t workers = 1);
EvalReport eval_model(const Model& model, std::span<const Sequence> data, const BeamConfig& cfg,
                      std::size_t workers = 1);

/// Runs fn(i) for i in [0, n) on up to `workers` threads; exceptions are
/// rethrown on the caller.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace NT_ABI
}  // namespace nt
