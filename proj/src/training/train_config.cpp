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

#include "nt/errors.hpp"
#include "nt/training.hpp"

namespace nt {
inline namespace NT_ABI {

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(lr > 0, "lr must be positive");
  require(momentum >= 0 && momentum < 1, "momentum must be in [0, 1)");
  require(lr_decay > 0 && lr_decay < 1, "lr_decay must be in (0, 1)");
  require(max_decays >= 0, "max_decays must be non-negative");
  require(refresh_period >= 1, "refresh_period must be positive");
  require(batch_size >= 1, "batch_size must be positive");
  require(clip_norm > 0, "clip_norm must be positive");
  require(workers >= 1, "workers must be positive");
  require(val_beam.beam_width >= 1 && val_beam.max_output_len >= 1,
          "validation beam width and max output length must be positive");
}

const std::vector<std::string>& TrainConfig::keys() {
  static const std::vector<std::string> k{
      "lr",         "momentum",      "lr_decay",         "max_decays",         "epochs",
      "refresh_period", "batch_size", "clip_norm",       "seed",         "given_alignments",
      "val_beam_width", "val_max_output_len", "checkpoint_dir", "metrics_path", "epoch_checkpoints"};
  return k;
}

void TrainConfig::write(KeyValues& kv) const {
  kv.set("lr", format_real(lr));
  kv.set("momentum", format_real(momentum));
  kv.set("lr_decay", format_real(lr_decay));
  kv.set("max_decays", std::to_string(max_decays));
  kv.set("epochs", std::to_string(epochs));
  kv.set("refresh_period", std::to_string(refresh_period));
  kv.set("batch_size", std::to_string(batch_size));
  kv.set("clip_norm", format_real(clip_norm));
  kv.set("seed", std::to_string(seed));
  kv.set("given_alignments", given_alignments ? "true" : "false");
  kv.set("val_beam_width", std::to_string(val_beam.beam_width));
  kv.set("val_max_output_len", std::to_string(val_beam.max_output_len));
  kv.set("checkpoint_dir", checkpoint_dir);
  kv.set("metrics_path", metrics_path);
  kv.set("epoch_checkpoints", epoch_checkpoints ? "true" : "false");
}

TrainConfig TrainConfig::read(const KeyValues& kv) {
  TrainConfig c;
  auto count = [&](const std::string& key) {
    const auto v = kv.get_int(key);
    if (v < 0) throw ConfigError("key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
  };
  c.lr = kv.get_real("lr");
  c.momentum = kv.get_real("momentum");
  c.lr_decay = kv.get_real("lr_decay");
  c.max_decays = static_cast<int>(kv.get_int("max_decays"));
  c.epochs = count("epochs");
  c.refresh_period = count("refresh_period");
  c.batch_size = count("batch_size");
  c.clip_norm = kv.get_real("clip_norm");
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed"));
  c.given_alignments = kv.get_bool("given_alignments");
  c.val_beam.beam_width = count("val_beam_width");
  c.val_beam.max_output_len = count("val_max_output_len");
  c.checkpoint_dir = kv.get_or("checkpoint_dir", "");
  c.metrics_path = kv.get_or("metrics_path", "");
  c.epoch_checkpoints = kv.get_bool("epoch_checkpoints");
  c.validate();
  return c;
}

void TrainState::write(KeyValues& kv) const {
  kv.set("state.params_version", std::to_string(params_version));
  kv.set("state.epochs_done", std::to_string(epochs_done));
  kv.set("state.decays_applied", std::to_string(decays_applied));
  kv.set("state.lr", format_real(lr));
  kv.set("state.best_val_log_prob", format_real(best_val_log_prob));
  kv.set("state.best_epoch", std::to_string(best_epoch));
  kv.set("state.last_val_log_prob", format_real(last_val_log_prob));
  kv.set("state.sequences_seen", std::to_string(sequences_seen));
}

TrainState TrainState::read(const KeyValues& kv) {
  TrainState s;
  s.params_version = static_cast<std::uint64_t>(kv.get_int("state.params_version"));
  s.epochs_done = static_cast<std::size_t>(kv.get_int("state.epochs_done"));
  s.decays_applied = static_cast<int>(kv.get_int("state.decays_applied"));
  s.lr = kv.get_real("state.lr");
  s.best_val_log_prob = kv.get_real("state.best_val_log_prob");
  s.best_epoch = static_cast<std::size_t>(kv.get_int("state.best_epoch"));
  s.last_val_log_prob = kv.get_real("state.last_val_log_prob");
  s.sequences_seen = static_cast<std::size_t>(kv.get_int("state.sequences_seen"));
  return s;
}

std::string metrics_csv_header() {
  return "epoch,mean_train_loss,val_log_prob,val_seq_error,lr,decays";
}

std::string metrics_csv_row(const EpochMetrics& m) {
  return std::to_string(m.epoch) + ',' + format_real(m.mean_train_loss) + ',' +
         format_real(m.val_log_prob) + ',' + format_real(m.val_seq_error) + ',' +
         format_real(m.lr) + ',' + std::to_string(m.decays);
}

void save_training_checkpoint(const std::string& path, const Model& model, const TrainConfig& cfg,
                              const TrainState& state) {
  KeyValues header = cfg.annotations;
  model.config().write(header);
  cfg.write(header);
  state.write(header);
  save_checkpoint(path, model.params(), header);
}

LoadedCheckpoint load_training_checkpoint(const std::string& path) {
  LoadedCheckpoint out;
  out.header = load_checkpoint(path, out.params);
  try {
    out.config = ModelConfig::read(out.header);
  } catch (const ConfigError& e) {
    throw CheckpointError(path + ": bad model header: " + e.what());
  }
  if (out.header.contains("state.epochs_done")) {
    try {
      out.state = TrainState::read(out.header);
    } catch (const ConfigError& e) {
      throw CheckpointError(path + ": bad training state: " + e.what());
    }
  }
  return out;
}

}  // namespace NT_ABI
}  // namespace nt
