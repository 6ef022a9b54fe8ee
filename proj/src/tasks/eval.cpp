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
#include <atomic>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "nt/errors.hpp"
#include "nt/tasks.hpp"

namespace nt {
inline namespace NT_ABI {

FeatureSequence one_hot(std::span<const std::string> tokens, std::span<const std::string> symbols) {
  NT_CHECK(!tokens.empty(), "one_hot: empty token sequence");
  FeatureSequence x;
  x.dim = symbols.size();
  x.data.assign(tokens.size() * symbols.size(), Real(0));
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto it = std::find(symbols.begin(), symbols.end(), tokens[t]);
    if (it == symbols.end()) throw InvariantError("input token '" + tokens[t] + "' not in input alphabet");
    x.data[t * symbols.size() + static_cast<std::size_t>(it - symbols.begin())] = Real(1);
  }
  return x;
}

std::vector<Sequence> to_sequences(std::span<const TokenExample> examples,
                                   std::span<const std::string> input_symbols, const Vocab& vocab,
                                   std::size_t first_id) {
  std::vector<Sequence> out;
  out.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    Sequence s;
    s.id = first_id + i;
    s.x = one_hot(examples[i].input, input_symbols);
    for (const auto& t : examples[i].target) {
      const int v = vocab.index_of(t);
      NT_CHECK(v != vocab.eob, "targets may not contain <e>");
      s.targets.push_back(v);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> detokenize(std::span<const int> tokens, const Vocab& vocab) {
  std::vector<std::string> out;
  for (int t : tokens) {
    NT_CHECK(t >= 0 && static_cast<std::size_t>(t) < vocab.size(), "token out of vocabulary");
    out.push_back(vocab.tokens[t]);
  }
  return out;
}

void write_examples(std::ostream& out, std::span<const TokenExample> examples) {
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& t : v) s += (s.empty() ? "" : " ") + t;
    return s;
  };
  for (const auto& ex : examples) out << join(ex.input) << '\t' << join(ex.target) << '\n';
}

std::vector<TokenExample> read_examples(std::istream& in) {
  std::vector<TokenExample> out;
  std::string line;
  std::size_t line_no = 0;
  auto split = [](std::string_view s) {
    std::vector<std::string> v;
    std::istringstream ss{std::string(s)};
    std::string w;
    while (ss >> w) v.push_back(w);
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw InvariantError("dataset line " + std::to_string(line_no) +
                           ": expected 'input tokens<TAB>target tokens'");
    }
    TokenExample ex{split(std::string_view(line).substr(0, tab)),
                    split(std::string_view(line).substr(tab + 1))};
    if (ex.input.empty()) throw InvariantError("dataset line " + std::to_string(line_no) + ": empty input");
    out.push_back(std::move(ex));
  }
  return out;
}

std::size_t edit_distance(std::span<const int> a, std::span<const int> b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

EvalReport evaluate(std::span<const Sequence> data, const Decoder& decode, std::size_t workers) {
  NT_CHECK(!data.empty(), "evaluate: no examples");
  std::vector<std::size_t> edits(data.size());
  parallel_for(data.size(), workers, [&](std::size_t i) {
    edits[i] = edit_distance(decode(data[i]), data[i].targets);
  });
  EvalReport r;
  r.count = data.size();
  for (std::size_t i = 0; i < data.size(); ++i) {
    r.edits += edits[i];
    r.sequence_errors += edits[i] != 0;
    r.reference_tokens += data[i].targets.size();
  }
  r.sequence_error_rate = static_cast<double>(r.sequence_errors) / static_cast<double>(r.count);
  r.token_error_rate = r.reference_tokens == 0
                           ? (r.edits == 0 ? 0.0 : 1.0)
                           : std::min(1.0, static_cast<double>(r.edits) /
                                               static_cast<double>(r.reference_tokens));
  return r;
}

EvalReport eval_model(const Model& model, std::span<const Sequence> data, const BeamConfig& cfg,
                      std::size_t workers) {
  return evaluate(
      data, [&](const Sequence& s) { return beam_decode(model, s.x, cfg).tokens; }, workers);
}

}  // namespace NT_ABI
}  // namespace nt
