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

// Flat "key = value" text dialect shared by run configs and checkpoint
// headers. '#' starts a comment; blank lines are ignored; keys are unique.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nt {

class KeyValues {
 public:
  KeyValues() = default;

  static KeyValues parse(std::string_view text);
  static KeyValues load(const std::string& path);

  /// Serializes in key order, one "key = value" per line.
  std::string format() const;

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  void erase(const std::string& key) { values_.erase(key); }

  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;

  std::int64_t get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  /// Comma-separated integers, e.g. "100,100".
  std::vector<int> get_int_list(const std::string& key) const;
  /// Whitespace-separated words.
  std::vector<std::string> get_words(const std::string& key) const;

  /// Throws ConfigError naming every key not in `allowed`.
  void reject_unknown(const std::vector<std::string>& allowed) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::string format_real(double v);
std::string join_ints(const std::vector<int>& v);

}  // namespace nt
