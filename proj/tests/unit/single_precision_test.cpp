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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "nt/training.hpp"

namespace nt {
namespace {

namespace fs = std::filesystem;

static_assert(std::is_same_v<Real, float>);

ModelConfig small_config() {
  ModelConfig c;
  c.input_dim = probe_input_symbols().size();
  c.encoder_widths = {6};
  c.transducer_widths = {6};
  c.embed_dim = 3;
  c.attention = AttentionKind::kLstm;
  c.attention_dim = 3;
  c.vocab = probe_vocab();
  c.block.block_size = 2;
  c.block.max_per_block = 3;
  return c;
}

std::vector<Sequence> data(std::uint64_t seed, std::size_t n) {
  return to_sequences(gen_recurrence_probe(seed, n, ProbeConfig{3, 2, 1}), probe_input_symbols(), probe_vocab());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TrainConfig config_in(const fs::path& dir, std::size_t epochs) {
  TrainConfig c;
  c.lr = 0.05;
  c.epochs = epochs;
  c.refresh_period = 3;
  c.val_beam = BeamConfig{2, 12};
  c.checkpoint_dir = dir.string();
  c.metrics_path = (dir / "metrics.csv").string();
  return c;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nt_f32_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST(SinglePrecisionTest, TrainingIsReproducible) {
  const auto tr = data(1, 10);
  const auto va = data(2, 4);
  const fs::path a = fresh_dir("a"), b = fresh_dir("b");
  Model m1(small_config(), 3), m2(small_config(), 3);
  train(m1, tr, va, config_in(a, 2));
  train(m2, tr, va, config_in(b, 2));
  EXPECT_EQ(slurp(a / "metrics.csv"), slurp(b / "metrics.csv"));
  for (const auto& [name, e] : m1.params()) {
    for (std::size_t i = 0; i < e.value.size(); ++i) ASSERT_EQ(e.value[i], m2.params().at(name).value[i]) << name;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(SinglePrecisionTest, CheckpointRoundTripIsExact) {
  Model m(small_config(), 9);
  const std::string bytes = encode_checkpoint(m.params(), KeyValues{});
  ParamStore back;
  decode_checkpoint(bytes, back);
  for (const auto& [name, e] : m.params()) {
    const Tensor& t = back.at(name).value;
    ASSERT_EQ(t.size(), e.value.size());
    for (std::size_t i = 0; i < t.size(); ++i) ASSERT_EQ(t[i], e.value[i]) << name;
  }
}

TEST(SinglePrecisionTest, ResumeMatchesUninterruptedRun) {
  const auto tr = data(1, 7);
  const auto va = data(2, 3);
  const fs::path a = fresh_dir("straight"), b = fresh_dir("resume");
  Model straight(small_config(), 4);
  train(straight, tr, va, config_in(a, 3));

  Model first(small_config(), 4);
  train(first, tr, va, config_in(b, 1));
  LoadedCheckpoint ck = load_training_checkpoint((b / "last.ntck").string());
  Model resumed(ck.config, std::move(ck.params));
  train(resumed, tr, va, config_in(b, 3), ck.state);

  for (const auto& [name, e] : resumed.params()) {
    const Tensor& ref = straight.params().at(name).value;
    for (std::size_t i = 0; i < e.value.size(); ++i) ASSERT_EQ(e.value[i], ref[i]) << name;
  }
  EXPECT_EQ(slurp(a / "metrics.csv"), slurp(b / "metrics.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(SinglePrecisionTest, DecodeRescoresConsistently) {
  Model m(small_config(), 5, 0.5f);
  const auto seqs = data(3, 5);
  for (const auto& s : seqs) {
    const DecodeResult r = beam_decode(m, s.x, BeamConfig{3, 10});
    EXPECT_NEAR(r.log_prob, sequence_log_prob(m, s.x, r.alignment), 1e-4);
  }
}

}  // namespace
}  // namespace nt
