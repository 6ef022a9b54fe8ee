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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "nt/errors.hpp"
#include "nt/rng.hpp"
#include "nt/training.hpp"

namespace nt {
inline namespace NT_ABI {

Var loss(Graph& graph, const FeatureSequence& x, const Alignment& alignment) {
  return graph.tape().scale(graph.sequence_log_prob(x, alignment), Real(-1));
}

double accumulate_gradient(Model& model, const FeatureSequence& x, const Alignment& alignment) {
  Tape tape;
  Graph g(model, tape, true);
  const Var l = loss(g, x, alignment);
  const double v = static_cast<double>(tape.scalar(l));
  if (!std::isfinite(v)) throw NonFiniteError("non-finite loss " + format_real(v));
  tape.backward(l);
  return v;
}

void apply_update(Model& model, double lr, const TrainConfig& cfg) {
  clip_grad_norm(model.params(), cfg.clip_norm);
  sgd_momentum_step(model.params(), static_cast<Real>(lr), static_cast<Real>(cfg.momentum));
}

double train_step(Model& model, const FeatureSequence& x, const Alignment& alignment, double lr,
                  const TrainConfig& cfg) {
  const double l = accumulate_gradient(model, x, alignment);
  apply_update(model, lr, cfg);
  return l;
}

RefreshStats refresh_alignments(const Model& model, std::span<const Sequence> data,
                                std::span<const std::size_t> ids, AlignmentCache& cache,
                                std::uint64_t version, std::size_t workers) {
  struct Slot {
    std::optional<Alignment> alignment;
    bool compared = false;
    bool improved = false;
  };
  std::vector<Slot> slots(ids.size());
  parallel_for(ids.size(), workers, [&](std::size_t i) {
    const Sequence& s = data[ids[i]];
    AlignmentResult r;
    try {
      r = dp_best_alignment(model, s.x, s.targets);
    } catch (const InfeasibleAlignmentError&) {
      return;
    }
    if (const auto* prev = cache.find(ids[i])) {
      slots[i].compared = true;
      slots[i].improved = r.log_prob >= sequence_log_prob(model, s.x, prev->alignment);
    }
    slots[i].alignment = std::move(r.alignment);
  });

  RefreshStats st;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!slots[i].alignment) {
      ++st.skipped;
      continue;
    }
    ++st.aligned;
    st.compared += slots[i].compared;
    st.improved += slots[i].improved;
    cache.put(ids[i], std::move(*slots[i].alignment), version);
  }
  return st;
}

double validation_log_prob(const Model& model, std::span<const Sequence> data,
                           bool given_alignments, std::size_t workers) {
  std::vector<double> lp(data.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(data.size(), workers, [&](std::size_t i) {
    const Sequence& s = data[i];
    if (given_alignments) {
      NT_CHECK(s.alignment.has_value(), "validation sequence has no given alignment");
      lp[i] = sequence_log_prob(model, s.x, *s.alignment);
      return;
    }
    try {
      lp[i] = dp_best_alignment(model, s.x, s.targets).log_prob;
    } catch (const InfeasibleAlignmentError&) {
    }
  });
  double sum = 0;
  std::size_t n = 0;
  for (double v : lp) {
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  return n == 0 ? -std::numeric_limits<double>::infinity() : sum / static_cast<double>(n);
}

bool update_schedule(TrainState& state, double val_log_prob, const TrainConfig& cfg) {
  bool decayed = false;
  if (!std::isnan(state.last_val_log_prob) && val_log_prob < state.last_val_log_prob &&
      state.decays_applied < cfg.max_decays) {
    state.lr *= cfg.lr_decay;
    ++state.decays_applied;
    decayed = true;
  }
  state.last_val_log_prob = val_log_prob;
  return decayed;
}

namespace {

std::string epoch_name(std::size_t epoch) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "epoch_%03zu.ntck", epoch);
  return buf;
}

void check_given(std::span<const Sequence> data, const ModelConfig& c, const char* what) {
  for (const Sequence& s : data) {
    if (!s.alignment) {
      throw InvariantError(std::string(what) + " sequence " + std::to_string(s.id) +
                           " has no given alignment");
    }
    validate_alignment(*s.alignment, c.vocab.eob, c.block.num_blocks(s.x.length()),
                       c.block.max_per_block, &s.targets);
  }
}

}  // namespace

TrainResult train(Model& model, std::span<const Sequence> train_set,
                  std::span<const Sequence> val_set, const TrainConfig& cfg,
                  std::optional<TrainState> resume, const TrainLogger& log) {
  namespace fs = std::filesystem;
  cfg.validate();
  NT_CHECK(!train_set.empty(), "train: empty training set");
  NT_CHECK(!val_set.empty(), "train: empty validation set");
  const ModelConfig& mc = model.config();
  if (cfg.given_alignments) {
    check_given(train_set, mc, "training");
    check_given(val_set, mc, "validation");
  }
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };

  const bool fresh = !resume.has_value();
  TrainResult result{resume.value_or(TrainState{}), model.params()};
  TrainState& st = result.state;
  if (fresh) st.lr = cfg.lr;

  const fs::path dir = cfg.checkpoint_dir;
  if (!dir.empty()) {
    fs::create_directories(dir);
    if (fresh) {
      save_training_checkpoint((dir / "initial.ntck").string(), model, cfg, st);
    } else if (fs::exists(dir / "best.ntck")) {
      ParamStore best;
      load_checkpoint((dir / "best.ntck").string(), best);
      result.best_params = std::move(best);
    }
  }
  std::ofstream csv;
  if (!cfg.metrics_path.empty()) {
    csv.open(cfg.metrics_path, fresh ? std::ios::trunc : std::ios::app);
    if (!csv) throw std::runtime_error("cannot open metrics file " + cfg.metrics_path);
    if (fresh) csv << metrics_csv_header() << '\n' << std::flush;
  }

  AlignmentCache cache;
  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  for (std::size_t epoch = st.epochs_done + 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(cfg.seed, epoch));
    shuffle(order, rng);

    double loss_sum = 0;
    std::size_t trained = 0;
    std::size_t pending = 0;
    for (std::size_t pos = 0; pos < n; ++pos) {
      if (!cfg.given_alignments && pos % cfg.refresh_period == 0) {
        const std::size_t end = std::min(n, pos + cfg.refresh_period);
        const RefreshStats rs =
            refresh_alignments(model, train_set, std::span(order).subspan(pos, end - pos), cache,
                               st.params_version, cfg.workers);
        ++st.refreshes;
        st.refresh_compared += rs.compared;
        st.refresh_improved += rs.improved;
        st.skipped_infeasible += rs.skipped;
      }
      const std::size_t idx = order[pos];
      const Sequence& s = train_set[idx];
      const Alignment* a = nullptr;
      if (cfg.given_alignments) {
        a = &*s.alignment;
      } else if (const auto* e = cache.find(idx)) {
        a = &e->alignment;
      }
      if (a != nullptr) {
        try {
          loss_sum += accumulate_gradient(model, s.x, *a);
        } catch (const NonFiniteError& e) {
          throw NonFiniteError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                               ", sequence " + std::to_string(s.id) + ")");
        }
        ++trained;
        ++pending;
        ++st.sequences_seen;
      }
      if (pending == cfg.batch_size || (pos + 1 == n && pending > 0)) {
        try {
          apply_update(model, st.lr, cfg);
        } catch (const NonFiniteError& e) {
          throw NonFiniteError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ")");
        }
        ++st.params_version;
        pending = 0;
      }
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.mean_train_loss = trained == 0 ? 0.0 : loss_sum / static_cast<double>(trained);
    m.val_log_prob = validation_log_prob(model, val_set, cfg.given_alignments, cfg.workers);
    m.val_seq_error = eval_model(model, val_set, cfg.val_beam, cfg.workers).sequence_error_rate;
    m.lr = st.lr;
    update_schedule(st, m.val_log_prob, cfg);
    m.decays = st.decays_applied;
    st.epochs_done = epoch;
    st.metrics.push_back(m);

    const bool improved = m.val_log_prob > st.best_val_log_prob;
    if (improved) {
      st.best_val_log_prob = m.val_log_prob;
      st.best_epoch = epoch;
      result.best_params = model.params();
    }
    if (csv.is_open()) csv << metrics_csv_row(m) << '\n' << std::flush;
    if (!dir.empty()) {
      if (cfg.epoch_checkpoints) save_training_checkpoint((dir / epoch_name(epoch)).string(), model, cfg, st);
      save_training_checkpoint((dir / "last.ntck").string(), model, cfg, st);
      if (improved) save_training_checkpoint((dir / "best.ntck").string(), model, cfg, st);
    }
    say("epoch " + std::to_string(epoch) + " loss " + format_real(m.mean_train_loss) +
        " val_log_prob " + format_real(m.val_log_prob) + " val_seq_error " +
        format_real(m.val_seq_error) + " lr " + format_real(m.lr) + " decays " +
        std::to_string(m.decays) +
        (cfg.given_alignments || st.refresh_compared == 0
             ? std::string()
             : " realign_improved " + std::to_string(st.refresh_improved) + "/" +
                   std::to_string(st.refresh_compared)));
  }
  if (!dir.empty() && !fs::exists(dir / "best.ntck")) {
    save_training_checkpoint((dir / "best.ntck").string(), model, cfg, st);
  }
  return result;
}

}  // namespace NT_ABI
}  // namespace nt
