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
#include <optional>
#include <string>

#include "nt/errors.hpp"
#include "nt/rng.hpp"
#include "nt/tasks.hpp"

namespace nt {
inline namespace NT_ABI {
namespace {

std::vector<std::string> digits_of(int v) {
  std::vector<std::string> out;
  for (char ch : std::to_string(v)) out.emplace_back(1, ch);
  return out;
}

std::optional<int> parse_digits(std::span<const std::string> tokens) {
  if (tokens.empty() || tokens.size() > 9) return std::nullopt;
  int v = 0;
  for (const auto& t : tokens) {
    if (t.size() != 1 || t[0] < '0' || t[0] > '9') return std::nullopt;
    v = v * 10 + (t[0] - '0');
  }
  return v;
}

}  // namespace

const std::vector<std::string>& addition_input_symbols() {
  static const std::vector<std::string> s{"0", "1", "2", "3", "4", "5", "6",
                                          "7", "8", "9", "+", "<s>"};
  return s;
}

Vocab addition_vocab() {
  return Vocab::with_eob({"0", "1", "2", "3", "4", "5", "6", "7", "8", "9"});
}

AdditionExample make_addition(int a, int b) {
  NT_CHECK(a >= 0 && b >= 0, "addition operands must be non-negative");
  AdditionExample ex{a, b, {}};
  ex.tokens.input = digits_of(a);
  ex.tokens.input.emplace_back("+");
  auto bd = digits_of(b);
  ex.tokens.input.insert(ex.tokens.input.end(), bd.rbegin(), bd.rend());
  ex.tokens.input.emplace_back("<s>");
  auto sd = digits_of(a + b);
  ex.tokens.target.assign(sd.rbegin(), sd.rend());
  return ex;
}

AdditionExample gen_addition_one(std::uint64_t seed, std::size_t index, int max_digits) {
  NT_CHECK(max_digits >= 1 && max_digits <= 8, "max_digits must be in [1, 8]");
  Rng rng(mix_seed(seed, index));
  auto operand = [&] {
    const auto len = rng.range(1, max_digits);
    std::int64_t lo = 1;
    for (int i = 1; i < len; ++i) lo *= 10;
    const std::int64_t hi = lo * 10 - 1;
    return static_cast<int>(rng.range(len == 1 ? 0 : lo, hi));
  };
  const int a = operand();
  const int b = operand();
  return make_addition(a, b);
}

std::vector<AdditionExample> gen_addition(std::uint64_t seed, std::size_t count, int max_digits,
                                          std::size_t first_index) {
  std::vector<AdditionExample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen_addition_one(seed, first_index + i, max_digits));
  return out;
}

bool check_addition(const TokenExample& ex) {
  const auto& in = ex.input;
  if (in.size() < 4 || in.back() != "<s>") return false;
  const auto plus = std::find(in.begin(), in.end(), "+");
  if (plus == in.end()) return false;
  const auto a = parse_digits(std::span(in.begin(), plus));
  std::vector<std::string> b_rev(plus + 1, in.end() - 1);
  std::reverse(b_rev.begin(), b_rev.end());
  const auto b = parse_digits(b_rev);
  std::vector<std::string> s_rev(ex.target.rbegin(), ex.target.rend());
  const auto sum = parse_digits(s_rev);
  if (!a || !b || !sum) return false;
  // Reject non-canonical leading zeros.
  if ((in.front() == "0" && *a != 0) || (b_rev.front() == "0" && *b != 0) ||
      (s_rev.front() == "0" && *sum != 0)) {
    return false;
  }
  return *a + *b == *sum;
}

}  // namespace NT_ABI
}  // namespace nt
