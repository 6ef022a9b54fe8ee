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

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "nt/alignment.hpp"
#include "nt/errors.hpp"

namespace nt {
inline namespace NT_ABI {

void AlignmentCache::put(std::size_t id, Alignment alignment, std::uint64_t version) {
  entries_[id] = Entry{std::move(alignment), version};
}

const AlignmentCache::Entry* AlignmentCache::find(std::size_t id) const {
  const auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string format_alignment(const Alignment& a, const Vocab& vocab) {
  std::string out;
  for (int t : a.tokens) {
    NT_CHECK(t >= 0 && static_cast<std::size_t>(t) < vocab.size(), "token out of vocabulary");
    if (!out.empty()) out += ' ';
    out += vocab.tokens[t];
  }
  return out;
}

Alignment parse_alignment(std::string_view text, const Vocab& vocab) {
  Alignment a;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    const int t = vocab.index_of(word);
    NT_CHECK(t >= 0, "unknown token '" + word + "' in alignment");
    a.tokens.push_back(t);
    if (t == vocab.eob) a.block_ends.push_back(a.tokens.size());
  }
  NT_CHECK(!a.tokens.empty() && a.tokens.back() == vocab.eob, "alignment must end with <e>");
  return a;
}

void write_alignments(std::ostream& out, const std::map<std::size_t, Alignment>& alignments,
                      const Vocab& vocab) {
  for (const auto& [id, a] : alignments) out << id << '\t' << format_alignment(a, vocab) << '\n';
}

std::map<std::size_t, Alignment> read_alignments(std::istream& in, const Vocab& vocab) {
  std::map<std::size_t, Alignment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    std::size_t id = 0;
    const auto [p, ec] = std::from_chars(line.data(), line.data() + (tab == std::string::npos ? 0 : tab), id);
    if (tab == std::string::npos || ec != std::errc() || p != line.data() + tab) {
      throw InvariantError("alignment line " + std::to_string(line_no) + ": expected 'id<TAB>tokens'");
    }
    NT_CHECK(out.count(id) == 0, "duplicate alignment id " + std::to_string(id));
    out.emplace(id, parse_alignment(std::string_view(line).substr(tab + 1), vocab));
  }
  return out;
}

}  // namespace NT_ABI
}  // namespace nt
