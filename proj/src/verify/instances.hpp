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

// Random tiny instances shared by the verification suites.

#include <string>
#include <vector>

#include "nt/model.hpp"
#include "nt/rng.hpp"

namespace nt {
inline namespace NT_ABI {
namespace verify_detail {

inline Vocab tiny_vocab(std::size_t symbols) {
  std::vector<std::string> s;
  for (std::size_t i = 0; i < symbols; ++i) s.push_back(std::string(1, static_cast<char>('a' + i)));
  return Vocab::with_eob(std::move(s));
}

inline FeatureSequence random_input(Rng& rng, std::size_t dim, std::size_t length) {
  FeatureSequence x;
  x.dim = dim;
  for (std::size_t i = 0; i < dim * length; ++i) x.data.push_back(static_cast<Real>(rng.uniform(-1, 1)));
  return x;
}

inline std::vector<int> random_targets(Rng& rng, std::size_t length, const Vocab& v) {
  std::vector<int> out;
  for (std::size_t i = 0; i < length; ++i) {
    int t;
    do {
      t = static_cast<int>(rng.below(v.size()));
    } while (t == v.eob);
    out.push_back(t);
  }
  return out;
}

/// Places S tokens into N blocks of capacity `cap`, one token at a time.
inline std::vector<std::size_t> random_counts(Rng& rng, std::size_t blocks, std::size_t cap,
                                              std::size_t total) {
  std::vector<std::size_t> counts(blocks, 0);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t b;
    do {
      b = static_cast<std::size_t>(rng.below(blocks));
    } while (counts[b] >= cap);
    ++counts[b];
  }
  return counts;
}

inline void zero_params(Model& m) {
  for (auto& [name, e] : m.params()) e.value.fill(Real(0));
}

}  // namespace verify_detail
}  // namespace NT_ABI
}  // namespace nt
