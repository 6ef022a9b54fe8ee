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

// Training loop.
//
// Each sequence is trained on one alignment: either a given one, or the DP
// best alignment under a recent parameter snapshot. DP alignments are
// recomputed in slices: before positions 0, P, 2P, ... of every epoch the
// next P sequences are realigned (P = refresh_period), so an alignment is at
// most P updates stale when it is used.
//
// After every epoch the mean validation log-prob is measured; if it dropped
// below the previous epoch's value the learning rate is multiplied by
// lr_decay, at most max_decays times. The best epoch is kept as best.ntck.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nt/alignment.hpp"
#include "nt/inference.hpp"
#include "nt/kv_config.hpp"
#include "nt/model.hpp"
#include "nt/tasks.hpp"

namespace nt {
inline namespace NT_ABI {

struct TrainConfig {
  double lr = 0.05;
  double momentum = 0.9;
  double lr_decay = 0.5;
  int max_decays = 4;
  std::size_t epochs = 50;
  std::size_t refresh_period = 300;
  std::size_t batch_size = 1;
  double clip_norm = 10.0;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  /// Train on Sequence::alignment and never run the DP.
  bool given_alignments = false;
  /// Beam used for the per-epoch validation error.
  BeamConfig val_beam{1, 64};
  std::string checkpoint_dir;   // empty: no checkpoints
  std::string metrics_path;     // empty: no CSV
  bool epoch_checkpoints = true;
  /// Copied verbatim into every checkpoint header; not a config key.
  KeyValues annotations;

  void validate() const;
  void write(KeyValues& kv) const;
  static TrainConfig read(const KeyValues& kv);
  static const std::vector<std::string>& keys();
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double mean_train_loss = 0;
  double val_log_prob = 0;
  double val_seq_error = 0;
  double lr = 0;
  int decays = 0;
};

struct TrainState {
  std::uint64_t params_version = 0;   // optimizer steps taken
  std::size_t epochs_done = 0;
  int decays_applied = 0;
  double lr = 0;
  double best_val_log_prob = -std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  double last_val_log_prob = std::numeric_limits<double>::quiet_NaN();
  std::size_t sequences_seen = 0;
  std::vector<EpochMetrics> metrics;
  // Alignment refresh bookkeeping.
  std::size_t refreshes = 0;
  std::size_t refresh_compared = 0;
  std::size_t refresh_improved = 0;
  std::size_t skipped_infeasible = 0;

  void write(KeyValues& kv) const;
  static TrainState read(const KeyValues& kv);
};

/// -log p(alignment | x), taped.
Var loss(Graph& graph, const FeatureSequence& x, const Alignment& alignment);

/// Forward + backward; gradients accumulate into model.params(). Returns the
/// loss. Throws NonFiniteError on a NaN/Inf loss.
double accumulate_gradient(Model& model, const FeatureSequence& x, const Alignment& alignment);

/// Clips the accumulated gradient to `cfg.clip_norm` and applies one
/// momentum step with learning rate `lr`.
void apply_update(Model& model, double lr, const TrainConfig& cfg);

/// accumulate_gradient + apply_update. Returns the pre-update loss.
double train_step(Model& model, const FeatureSequence& x, const Alignment& alignment,
                  double lr, const TrainConfig& cfg);

struct RefreshStats {
  std::size_t aligned = 0;
  std::size_t skipped = 0;     // infeasible targets
  std::size_t compared = 0;    // had a previous alignment
  std::size_t improved = 0;    // new log-prob >= previous alignment's, new params
};

/// Realigns data[ids[i]] against `model` and stores the results under
/// `version`. Runs on up to `workers` threads with the model read-only.
RefreshStats refresh_alignments(const Model& model, std::span<const Sequence> data,
                                std::span<const std::size_t> ids, AlignmentCache& cache,
                                std::uint64_t version, std::size_t workers = 1);

/// Mean per-sequence log-prob of the validation set under DP (or given)
/// alignments. Sequences with infeasible targets are skipped.
double validation_log_prob(const Model& model, std::span<const Sequence> data,
                           bool given_alignments, std::size_t workers = 1);

/// Applies the decay rule after an epoch. Returns true if a decay happened.
bool update_schedule(TrainState& state, double val_log_prob, const TrainConfig& cfg);

using TrainLogger = std::function<void(const std::string&)>;

struct TrainResult {
  TrainState state;
  ParamStore best_params;
};

/// Runs epochs state.epochs_done+1 .. cfg.epochs. Pass a state restored by
/// load_training_checkpoint to resume.
TrainResult train(Model& model, std::span<const Sequence> train_set,
                  std::span<const Sequence> val_set, const TrainConfig& cfg,
                  std::optional<TrainState> resume = std::nullopt, const TrainLogger& log = {});

std::string metrics_csv_header();
std::string metrics_csv_row(const EpochMetrics& m);

/// Header = model config + train config + train state.
void save_training_checkpoint(const std::string& path, const Model& model, const TrainConfig& cfg,
                              const TrainState& state);

struct LoadedCheckpoint {
  ModelConfig config;
  ParamStore params;
  std::optional<TrainState> state;
  KeyValues header;
};

/// Throws CheckpointVersionError on a version mismatch.
LoadedCheckpoint load_training_checkpoint(const std::string& path);

}  // namespace NT_ABI
}  // namespace nt
