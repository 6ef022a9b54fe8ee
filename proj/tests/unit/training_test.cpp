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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nt/errors.hpp"
#include "nt/training.hpp"
#include "test_util.hpp"

namespace nt {
namespace {

namespace fs = std::filesystem;
using testing::random_input;
using testing::tiny_config;
using testing::zero_params;

ModelConfig probe_model_config() {
  ModelConfig c;
  c.input_dim = probe_input_symbols().size();
  c.encoder_widths = {8};
  c.transducer_widths = {8};
  c.embed_dim = 4;
  c.attention = AttentionKind::kMlp;
  c.attention_dim = 4;
  c.vocab = probe_vocab();
  c.block.block_size = 2;
  c.block.max_per_block = 3;
  return c;
}

std::vector<Sequence> probe_data(std::uint64_t seed, std::size_t n, std::size_t first_index = 0) {
  const ProbeConfig pc{4, 2, 1};
  const auto ex = gen_recurrence_probe(seed, n, pc, first_index);
  auto seqs = to_sequences(ex, probe_input_symbols(), probe_vocab());
  for (auto& s : seqs) s.alignment = probe_alignment(s.targets, probe_vocab().eob);
  return seqs;
}

TrainConfig quiet_config() {
  TrainConfig c;
  c.lr = 0.05;
  c.epochs = 1;
  c.refresh_period = 4;
  c.val_beam = BeamConfig{1, 16};
  return c;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nt_training_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST(LossTest, IsNegatedSequenceLogProb) {
  Model m(tiny_config(AttentionKind::kLstm, 3, 2, 3), 2, Real(1));
  Rng rng(1);
  const FeatureSequence x = random_input(rng, 2, 4);
  const Alignment a{{1, 3, 0, 2, 3}, {2, 5}};
  Tape t;
  Graph g(m, t);
  EXPECT_NEAR(t.scalar(loss(g, x, a)), -sequence_log_prob(m, x, a), 1e-12);
}

TEST(LossTest, ZeroWeightsCostLogVocabPerToken) {
  Model m(tiny_config(AttentionKind::kMlp, 3, 2, 3), 1);
  zero_params(m);
  Rng rng(1);
  const FeatureSequence x = random_input(rng, 2, 6);
  const Alignment a{{0, 3, 1, 2, 3, 3}, {2, 5, 6}};
  EXPECT_NEAR(accumulate_gradient(m, x, a), 6 * std::log(4.0), 1e-12);
}

TEST(TrainStepTest, PlainGradientStepOnSquare) {
  ParamStore ps;
  ParamEntry& p = ps.add("p", {1});
  p.value[0] = 1;
  p.grad[0] = 2 * p.value[0];
  sgd_momentum_step(ps, Real(0.1), Real(0));
  EXPECT_NEAR(p.value[0], 0.8, 1e-12);
  EXPECT_EQ(p.grad[0], 0);
}

TEST(TrainStepTest, LossDecreasesOnFixedExample) {
  for (AttentionKind kind : {AttentionKind::kNone, AttentionKind::kDot, AttentionKind::kMlp, AttentionKind::kLstm}) {
    Model m(tiny_config(kind, 3, 2, 3), 4);
    Rng rng(3);
    const FeatureSequence x = random_input(rng, 2, 4);
    const Alignment a{{2, 0, 3, 1, 3}, {3, 5}};
    TrainConfig cfg;
    const double start = train_step(m, x, a, 0.01, cfg);
    double last = start;
    for (int i = 0; i < 50; ++i) last = train_step(m, x, a, 0.01, cfg);
    EXPECT_LT(last, start);
  }
}

TEST(TrainStepTest, NonFiniteInputThrows) {
  Model m(tiny_config(AttentionKind::kMlp, 3, 2, 3), 4);
  FeatureSequence x(2, {Real(1), std::numeric_limits<Real>::quiet_NaN()});
  EXPECT_THROW(accumulate_gradient(m, x, Alignment{{3}, {1}}), NonFiniteError);
}

TEST(ScheduleTest, DecaysOnlyWhenValidationDrops) {
  TrainConfig cfg;
  cfg.lr_decay = 0.5;
  cfg.max_decays = 4;
  TrainState st;
  st.lr = 0.1;
  EXPECT_FALSE(update_schedule(st, -5, cfg));
  EXPECT_FALSE(update_schedule(st, -4, cfg));
  EXPECT_TRUE(update_schedule(st, -4.5, cfg));
  EXPECT_EQ(st.decays_applied, 1);
  EXPECT_DOUBLE_EQ(st.lr, 0.05);
}

TEST(ScheduleTest, StopsAtMaxDecays) {
  TrainConfig cfg;
  cfg.max_decays = 2;
  TrainState st;
  st.lr = 1;
  double v = 0;
  for (int i = 0; i < 6; ++i) update_schedule(st, v -= 1, cfg);
  EXPECT_EQ(st.decays_applied, 2);
  EXPECT_DOUBLE_EQ(st.lr, 0.25);
}

TEST(RefreshTest, StoresDpAlignmentsWithVersion) {
  Model m(probe_model_config(), 5);
  const auto data = probe_data(1, 6);
  AlignmentCache cache;
  const std::vector<std::size_t> ids{4, 1};
  RefreshStats st = refresh_alignments(m, data, ids, cache, 3);
  EXPECT_EQ(st.aligned, 2u);
  EXPECT_EQ(st.compared, 0u);
  ASSERT_NE(cache.find(4), nullptr);
  EXPECT_EQ(cache.find(4)->version, 3u);
  EXPECT_EQ(cache.find(4)->alignment, dp_best_alignment(m, data[4].x, data[4].targets).alignment);
  EXPECT_EQ(cache.find(0), nullptr);
  st = refresh_alignments(m, data, ids, cache, 4, 2);
  EXPECT_EQ(st.compared, 2u);
  EXPECT_EQ(st.improved, 2u);
}

TEST(RefreshTest, SkipsInfeasibleTargets) {
  Model m(probe_model_config(), 5);
  auto data = probe_data(1, 2);
  data[1].targets.assign(20, 1);
  AlignmentCache cache;
  const std::vector<std::size_t> ids{0, 1};
  const RefreshStats st = refresh_alignments(m, data, ids, cache, 0);
  EXPECT_EQ(st.aligned, 1u);
  EXPECT_EQ(st.skipped, 1u);
  EXPECT_EQ(cache.find(1), nullptr);
}

TEST(TrainTest, RefreshesOncePerSliceOfEveryEpoch) {
  Model m(probe_model_config(), 5);
  const auto train_set = probe_data(1, 10);
  const auto val_set = probe_data(2, 3);
  TrainConfig cfg = quiet_config();
  cfg.epochs = 2;
  cfg.refresh_period = 4;
  const TrainResult r = train(m, train_set, val_set, cfg);
  EXPECT_EQ(r.state.refreshes, 2u * 3u);
  EXPECT_EQ(r.state.sequences_seen, 20u);
  EXPECT_EQ(r.state.params_version, 20u);
  EXPECT_EQ(r.state.metrics.size(), 2u);
}

TEST(TrainTest, BatchSizeGroupsUpdates) {
  Model m(probe_model_config(), 5);
  const auto train_set = probe_data(1, 10);
  const auto val_set = probe_data(2, 3);
  TrainConfig cfg = quiet_config();
  cfg.batch_size = 4;
  cfg.given_alignments = true;
  const TrainResult r = train(m, train_set, val_set, cfg);
  EXPECT_EQ(r.state.params_version, 3u);
  EXPECT_EQ(r.state.refreshes, 0u);
}

TEST(TrainTest, ZeroEpochsLeavesParamsUnchanged) {
  Model m(probe_model_config(), 5);
  const ParamStore before = m.params();
  TrainConfig cfg = quiet_config();
  cfg.epochs = 0;
  const TrainResult r = train(m, probe_data(1, 4), probe_data(2, 2), cfg);
  for (const auto& [name, e] : m.params()) {
    for (std::size_t i = 0; i < e.value.size(); ++i) EXPECT_EQ(e.value[i], before.at(name).value[i]) << name;
  }
  EXPECT_TRUE(r.state.metrics.empty());
}

TEST(TrainTest, GivenAlignmentsMustBePresent) {
  Model m(probe_model_config(), 5);
  auto data = probe_data(1, 3);
  data[2].alignment.reset();
  TrainConfig cfg = quiet_config();
  cfg.given_alignments = true;
  EXPECT_THROW(train(m, data, probe_data(2, 2), cfg), InvariantError);
}

TEST(TrainTest, WritesCheckpointsAndMetrics) {
  const fs::path dir = scratch_dir("outputs");
  Model m(probe_model_config(), 5);
  TrainConfig cfg = quiet_config();
  cfg.epochs = 2;
  cfg.checkpoint_dir = dir.string();
  cfg.metrics_path = (dir / "metrics.csv").string();
  cfg.annotations.set("task", "probe");
  std::vector<std::string> lines;
  train(m, probe_data(1, 6), probe_data(2, 3), cfg, std::nullopt,
        [&](const std::string& s) { lines.push_back(s); });
  for (const char* f : {"initial.ntck", "epoch_001.ntck", "epoch_002.ntck", "last.ntck", "best.ntck"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(lines.size(), 2u);
  std::ifstream csv(dir / "metrics.csv");
  std::string header, row;
  std::getline(csv, header);
  EXPECT_EQ(header, metrics_csv_header());
  EXPECT_EQ(header, "epoch,mean_train_loss,val_log_prob,val_seq_error,lr,decays");
  std::size_t rows = 0;
  while (std::getline(csv, row)) ++rows;
  EXPECT_EQ(rows, 2u);

  const LoadedCheckpoint last = load_training_checkpoint((dir / "last.ntck").string());
  ASSERT_TRUE(last.state.has_value());
  EXPECT_EQ(last.state->epochs_done, 2u);
  EXPECT_EQ(last.header.get("task"), "probe");
  EXPECT_EQ(last.config.attention, AttentionKind::kMlp);
  fs::remove_all(dir);
}

TEST(TrainTest, ResumeContinuesFromLastEpoch) {
  const fs::path a = scratch_dir("straight");
  const fs::path b = scratch_dir("resumed");
  const auto train_set = probe_data(1, 8);
  const auto val_set = probe_data(2, 3);
  TrainConfig cfg = quiet_config();
  cfg.epochs = 2;

  Model straight(probe_model_config(), 5);
  cfg.checkpoint_dir = a.string();
  const TrainResult full = train(straight, train_set, val_set, cfg);

  Model first(probe_model_config(), 5);
  cfg.checkpoint_dir = b.string();
  cfg.epochs = 1;
  train(first, train_set, val_set, cfg);
  LoadedCheckpoint ck = load_training_checkpoint((b / "last.ntck").string());
  Model resumed(ck.config, std::move(ck.params));
  cfg.epochs = 2;
  const TrainResult rest = train(resumed, train_set, val_set, cfg, ck.state);

  EXPECT_EQ(rest.state.epochs_done, 2u);
  EXPECT_EQ(rest.state.params_version, full.state.params_version);
  ASSERT_FALSE(rest.state.metrics.empty());
  EXPECT_EQ(rest.state.metrics.back().epoch, 2u);
  // Checkpoints hold binary32, so the double build only agrees approximately.
  for (const auto& [name, e] : resumed.params()) {
    const Tensor& ref = straight.params().at(name).value;
    for (std::size_t i = 0; i < e.value.size(); ++i) EXPECT_NEAR(e.value[i], ref[i], 1e-4) << name;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(TrainConfigTest, RoundTripAndValidation) {
  TrainConfig c = quiet_config();
  c.seed = 99;
  c.epoch_checkpoints = false;
  KeyValues kv;
  c.write(kv);
  const TrainConfig back = TrainConfig::read(kv);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_FALSE(back.epoch_checkpoints);
  EXPECT_EQ(back.refresh_period, c.refresh_period);
  EXPECT_EQ(back.val_beam.beam_width, 1u);

  TrainConfig bad = c;
  bad.lr = -1;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.refresh_period = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  KeyValues missing = kv;
  missing.erase("lr");
  EXPECT_THROW(TrainConfig::read(missing), ConfigError);
}

TEST(TrainConfigTest, MetricsRowFormat) {
  EpochMetrics m;
  m.epoch = 3;
  m.mean_train_loss = 1.5;
  m.val_log_prob = -2.25;
  m.val_seq_error = 0.5;
  m.lr = 0.025;
  m.decays = 1;
  EXPECT_EQ(metrics_csv_row(m).substr(0, 2), "3,");
  std::istringstream in(metrics_csv_row(m));
  std::string field;
  std::size_t fields = 0;
  while (std::getline(in, field, ',')) ++fields;
  EXPECT_EQ(fields, 6u);
}

}  // namespace
}  // namespace nt
