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

#include "run_config.hpp"

#include <filesystem>
#include <fstream>

#include "nt/errors.hpp"

namespace ntrans {

using nt::ConfigError;
using nt::KeyValues;

RunConfig::RunConfig() {
  model.encoder_widths = {100};
  model.transducer_widths = {100};
  model.embed_dim = 32;
  model.attention = nt::AttentionKind::kNone;
  model.block.block_size = 1;
  model.block.max_per_block = 8;
  train.checkpoint_dir = "run";
  resolve_task();
}

const std::vector<std::string>& RunConfig::input_symbols() const {
  return task == "probe" ? nt::probe_input_symbols() : nt::addition_input_symbols();
}

nt::Vocab RunConfig::vocab() const {
  return task == "probe" ? nt::probe_vocab() : nt::addition_vocab();
}

void RunConfig::resolve_task() {
  model.input_dim = input_symbols().size();
  model.vocab = vocab();
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> k{"task",
                             "data_seed",
                             "train_size",
                             "val_size",
                             "test_size",
                             "max_digits",
                             "probe_blocks",
                             "probe_span",
                             "train_file",
                             "val_file",
                             "test_file",
                             "train_alignments",
                             "val_alignments",
                             "init_range",
                             "workers",
                             "beam_width",
                             "max_output_len",
                             "gradcheck_instances",
                             "gradcheck_epsilon",
                             "gradcheck_tolerance",
                             "oracle_models",
                             "oracle_streaming_inputs"};
  for (const auto& m : nt::ModelConfig::keys()) {
    if (m != "input_dim" && m != "vocab") k.push_back(m);
  }
  for (const auto& t : nt::TrainConfig::keys()) k.push_back(t);
  return k;
}

KeyValues RunConfig::to_kv() const {
  KeyValues kv;
  kv.set("task", task);
  kv.set("data_seed", std::to_string(data_seed));
  kv.set("train_size", std::to_string(train_size));
  kv.set("val_size", std::to_string(val_size));
  kv.set("test_size", std::to_string(test_size));
  kv.set("max_digits", std::to_string(max_digits));
  kv.set("probe_blocks", std::to_string(probe_blocks));
  kv.set("probe_span", std::to_string(probe_span));
  kv.set("train_file", train_file);
  kv.set("val_file", val_file);
  kv.set("test_file", test_file);
  kv.set("train_alignments", train_alignments);
  kv.set("val_alignments", val_alignments);
  kv.set("init_range", nt::format_real(init_range));
  kv.set("workers", std::to_string(train.workers));
  kv.set("beam_width", std::to_string(beam.beam_width));
  kv.set("max_output_len", std::to_string(beam.max_output_len));
  kv.set("gradcheck_instances", std::to_string(gradcheck_instances));
  kv.set("gradcheck_epsilon", nt::format_real(gradcheck_epsilon));
  kv.set("gradcheck_tolerance", nt::format_real(gradcheck_tolerance));
  kv.set("oracle_models", std::to_string(oracle_models));
  kv.set("oracle_streaming_inputs", std::to_string(oracle_streaming_inputs));
  model.write(kv);
  kv.erase("input_dim");
  kv.erase("vocab");
  train.write(kv);
  return kv;
}

RunConfig RunConfig::from(const KeyValues& overrides) {
  overrides.reject_unknown(keys());
  KeyValues kv = RunConfig().to_kv();
  for (const auto& [k, v] : overrides.entries()) kv.set(k, v);

  auto count = [&](const std::string& key) {
    const auto v = kv.get_int(key);
    if (v < 0) throw ConfigError("key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
  };
  auto positive = [&](const std::string& key) {
    const std::size_t v = count(key);
    if (v == 0) throw ConfigError("key '" + key + "' must be positive");
    return v;
  };

  RunConfig r;
  r.task = kv.get("task");
  if (r.task != "addition" && r.task != "probe") {
    throw ConfigError("key 'task' must be 'addition' or 'probe', got '" + r.task + "'");
  }
  r.data_seed = static_cast<std::uint64_t>(kv.get_int("data_seed"));
  r.train_size = count("train_size");
  r.val_size = count("val_size");
  r.test_size = count("test_size");
  r.max_digits = static_cast<int>(kv.get_int("max_digits"));
  if (r.max_digits < 1 || r.max_digits > 9) throw ConfigError("key 'max_digits' must be in 1..9");
  r.probe_blocks = positive("probe_blocks");
  r.probe_span = count("probe_span");
  r.train_file = kv.get("train_file");
  r.val_file = kv.get("val_file");
  r.test_file = kv.get("test_file");
  r.train_alignments = kv.get("train_alignments");
  r.val_alignments = kv.get("val_alignments");
  r.init_range = kv.get_real("init_range");
  if (!(r.init_range >= 0)) throw ConfigError("key 'init_range' must be non-negative");
  r.beam.beam_width = positive("beam_width");
  r.beam.max_output_len = positive("max_output_len");
  r.gradcheck_instances = positive("gradcheck_instances");
  r.gradcheck_epsilon = kv.get_real("gradcheck_epsilon");
  r.gradcheck_tolerance = kv.get_real("gradcheck_tolerance");
  if (!(r.gradcheck_epsilon > 0) || !(r.gradcheck_tolerance > 0)) {
    throw ConfigError("gradcheck epsilon and tolerance must be positive");
  }
  r.oracle_models = positive("oracle_models");
  r.oracle_streaming_inputs = positive("oracle_streaming_inputs");

  kv.set("input_dim", std::to_string(r.input_symbols().size()));
  std::string v;
  for (const auto& t : r.vocab().tokens) v += (v.empty() ? "" : " ") + t;
  kv.set("vocab", v);
  r.model = nt::ModelConfig::read(kv);
  r.train = nt::TrainConfig::read(kv);
  r.train.workers = positive("workers");
  return r;
}

std::string RunConfig::metrics_path() const {
  if (!train.metrics_path.empty() || train.checkpoint_dir.empty()) return train.metrics_path;
  return (std::filesystem::path(train.checkpoint_dir) / "metrics.csv").string();
}

namespace {

std::vector<nt::TokenExample> read_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read dataset '" + path + "'");
  return nt::read_examples(in);
}

void attach_alignments(std::vector<nt::Sequence>& seqs, const std::string& path,
                       const nt::Vocab& vocab) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read alignments '" + path + "'");
  const auto table = nt::read_alignments(in, vocab);
  for (auto& s : seqs) {
    const auto it = table.find(s.id);
    if (it != table.end()) s.alignment = it->second;
  }
}

}  // namespace

Splits RunConfig::load_data() const {
  const nt::Vocab v = vocab();
  const nt::ProbeConfig probe{probe_blocks, model.block.block_size, probe_span};
  auto make = [&](std::size_t count, std::size_t first, const std::string& file) {
    std::vector<nt::TokenExample> ex;
    if (!file.empty()) {
      ex = read_dump(file);
    } else if (count > 0 && task == "addition") {
      for (auto& a : nt::gen_addition(data_seed, count, max_digits, first)) ex.push_back(std::move(a.tokens));
    } else if (count > 0) {
      ex = nt::gen_recurrence_probe(data_seed, count, probe, first);
    }
    std::vector<nt::Sequence> seqs = nt::to_sequences(ex, input_symbols(), v);
    if (task == "probe") {
      for (auto& s : seqs) {
        if (s.targets.size() == model.block.num_blocks(s.x.length())) {
          s.alignment = nt::probe_alignment(s.targets, v.eob);
        }
      }
    }
    return seqs;
  };
  // One generator stream, cut into disjoint index ranges.
  Splits out;
  out.train = make(train_size, 0, train_file);
  out.val = make(val_size, train_size, val_file);
  out.test = make(test_size, train_size + val_size, test_file);
  if (!train_alignments.empty()) attach_alignments(out.train, train_alignments, v);
  if (!val_alignments.empty()) attach_alignments(out.val, val_alignments, v);
  return out;
}

}  // namespace ntrans
