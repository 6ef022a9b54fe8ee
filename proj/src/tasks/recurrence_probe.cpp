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
#include "nt/rng.hpp"
#include "nt/tasks.hpp"

namespace nt {
inline namespace NT_ABI {

const std::vector<std::string>& probe_input_symbols() {
  static const std::vector<std::string> s{"0", "1", "2", "3", "4", "5",
                                          "6", "7", "8", "9", std::string(kProbeFiller)};
  return s;
}

Vocab probe_vocab() { return addition_vocab(); }

std::vector<int> probe_targets(std::span<const int> symbols, std::size_t span) {
  std::vector<int> out;
  out.reserve(symbols.size());
  for (std::size_t b = 0; b < symbols.size(); ++b) {
    if (span == 0 || b < span) {
      out.push_back(symbols[b]);
    } else {
      out.push_back((symbols[b] + symbols[b - span]) % 10);
    }
  }
  return out;
}

TokenExample gen_probe_one(std::uint64_t seed, std::size_t index, const ProbeConfig& cfg) {
  NT_CHECK(cfg.blocks >= 1 && cfg.block_size >= 1, "probe needs at least one block of one frame");
  Rng rng(mix_seed(seed, index));
  std::vector<int> symbols;
  for (std::size_t b = 0; b < cfg.blocks; ++b) symbols.push_back(static_cast<int>(rng.below(10)));
  TokenExample ex;
  for (int s : symbols) {
    ex.input.push_back(std::to_string(s));
    for (std::size_t k = 1; k < cfg.block_size; ++k) ex.input.emplace_back(kProbeFiller);
  }
  for (int t : probe_targets(symbols, cfg.span)) ex.target.push_back(std::to_string(t));
  return ex;
}

std::vector<TokenExample> gen_recurrence_probe(std::uint64_t seed, std::size_t count,
                                               const ProbeConfig& cfg, std::size_t first_index) {
  std::vector<TokenExample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen_probe_one(seed, first_index + i, cfg));
  return out;
}

bool check_probe(const TokenExample& ex, const ProbeConfig& cfg) {
  if (ex.input.size() != cfg.blocks * cfg.block_size || ex.target.size() != cfg.blocks) return false;
  std::vector<int> symbols;
  for (std::size_t b = 0; b < cfg.blocks; ++b) {
    const std::string& s = ex.input[b * cfg.block_size];
    if (s.size() != 1 || s[0] < '0' || s[0] > '9') return false;
    symbols.push_back(s[0] - '0');
    for (std::size_t k = 1; k < cfg.block_size; ++k) {
      if (ex.input[b * cfg.block_size + k] != kProbeFiller) return false;
    }
  }
  const auto expect = probe_targets(symbols, cfg.span);
  for (std::size_t b = 0; b < cfg.blocks; ++b) {
    if (ex.target[b] != std::to_string(expect[b])) return false;
  }
  return true;
}

Alignment probe_alignment(std::span<const int> targets, int eob) {
  const std::vector<std::size_t> counts(targets.size(), 1);
  return Alignment::from_counts(targets, counts, eob);
}

}  // namespace NT_ABI
}  // namespace nt
