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

// Flat "key = value" run configuration for the ntrans tool. Every key has a
// default; unknown keys are rejected. The model's input_dim and vocab come
// from the task and are not keys.

#include <string>
#include <vector>

#include "nt/inference.hpp"
#include "nt/kv_config.hpp"
#include "nt/model.hpp"
#include "nt/tasks.hpp"
#include "nt/training.hpp"

namespace ntrans {

struct Splits {
  std::vector<nt::Sequence> train;
  std::vector<nt::Sequence> val;
  std::vector<nt::Sequence> test;
};

struct RunConfig {
  // Task.
  std::string task = "addition";   // addition | probe
  std::uint64_t data_seed = 11;
  std::size_t train_size = 10000;
  std::size_t val_size = 500;
  std::size_t test_size = 10000;
  int max_digits = 3;
  std::size_t probe_blocks = 8;
  std::size_t probe_span = 2;
  std::string train_file, val_file, test_file;               // dataset dumps
  std::string train_alignments, val_alignments;              // "id TAB tokens"

  nt::ModelConfig model;
  double init_range = 0.08;
  nt::TrainConfig train;
  nt::BeamConfig beam{4, 64};

  std::size_t gradcheck_instances = 20;
  double gradcheck_epsilon = 1e-4;
  double gradcheck_tolerance = 1e-4;
  std::size_t oracle_models = 50;
  std::size_t oracle_streaming_inputs = 100;

  RunConfig();

  /// Defaults overlaid with `kv`; throws nt::ConfigError.
  static RunConfig from(const nt::KeyValues& kv);
  nt::KeyValues to_kv() const;
  static std::vector<std::string> keys();

  const std::vector<std::string>& input_symbols() const;
  nt::Vocab vocab() const;
  /// Fills model.input_dim and model.vocab from the task.
  void resolve_task();

  /// Generated or loaded train/val/test sequences.
  Splits load_data() const;
  /// metrics_path, or metrics.csv inside checkpoint_dir when unset.
  std::string metrics_path() const;
};

}  // namespace ntrans
