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

// ntrans: train, decode, stream, align, verify.
//
// Exit codes: 0 success, 1 other failure (including failed self-checks),
// 2 invalid configuration or usage, 3 non-finite loss, 4 checkpoint version
// mismatch.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nt/alignment.hpp"
#include "nt/errors.hpp"
#include "nt/inference.hpp"
#include "nt/training.hpp"
#include "nt/verify.hpp"
#include "run_config.hpp"

namespace {

using ntrans::RunConfig;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> attention;
  std::optional<std::size_t> block_size;
  std::optional<std::size_t> max_per_block;
  std::optional<std::size_t> workers;
  std::optional<std::string> checkpoint;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "run config file (key = value lines)");
  cmd->add_option("--seed", f.seed, "seed, overrides the config file");
  cmd->add_option("--attention", f.attention, "none, dot, mlp or lstm");
  cmd->add_option("--block-size", f.block_size, "frames per block (W)");
  cmd->add_option("--max-per-block", f.max_per_block, "symbols per block including <e> (M)");
  cmd->add_option("--workers", f.workers, "worker threads for alignment and evaluation");
}

RunConfig resolve(const CommonFlags& f) {
  nt::KeyValues kv;
  if (!f.config.empty()) {
    if (!std::filesystem::is_regular_file(f.config)) {
      throw nt::ConfigError("config file '" + f.config + "' not found");
    }
    kv = nt::KeyValues::load(f.config);
  }
  if (f.seed) kv.set("seed", std::to_string(*f.seed));
  if (f.attention) kv.set("attention", *f.attention);
  if (f.block_size) kv.set("block_size", std::to_string(*f.block_size));
  if (f.max_per_block) kv.set("max_per_block", std::to_string(*f.max_per_block));
  if (f.workers) kv.set("workers", std::to_string(*f.workers));
  RunConfig r = RunConfig::from(kv);
  std::cerr << "# resolved config\n" << r.to_kv().format() << std::flush;
  return r;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

std::vector<std::string> split_words(std::string_view s) {
  std::istringstream ss{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; ss >> w;) out.push_back(w);
  return out;
}

std::string checkpoint_path(const CommonFlags& f, const RunConfig& r) {
  if (f.checkpoint) return *f.checkpoint;
  return (std::filesystem::path(r.train.checkpoint_dir) / "best.ntck").string();
}

struct Loaded {
  nt::Model model;
  std::vector<std::string> symbols;   // empty when the checkpoint has none
};

Loaded load_model(const std::string& path) {
  nt::LoadedCheckpoint ck = nt::load_training_checkpoint(path);
  std::vector<std::string> symbols;
  if (ck.header.contains("input_symbols")) symbols = ck.header.get_words("input_symbols");
  return {nt::Model(ck.config, std::move(ck.params)), std::move(symbols)};
}

nt::FeatureSequence symbolic_input(const Loaded& m, const std::vector<std::string>& words) {
  if (m.symbols.empty()) throw nt::CheckpointError("checkpoint has no input_symbols annotation");
  return nt::one_hot(words, m.symbols);
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  return file;
}

std::istream& open_in(const std::string& path, std::ifstream& file) {
  if (path.empty() || path == "-") return std::cin;
  file.open(path);
  if (!file) throw nt::ConfigError("cannot read '" + path + "'");
  return file;
}

// --- commands ---------------------------------------------------------------

int cmd_train(const CommonFlags& f, bool resume) {
  RunConfig r = resolve(f);
  const ntrans::Splits data = r.load_data();
  if (data.train.empty() || data.val.empty()) {
    throw nt::ConfigError("training needs non-empty train and validation sets");
  }
  nt::TrainConfig tc = r.train;
  tc.metrics_path = r.metrics_path();
  tc.annotations.set("task", r.task);
  tc.annotations.set("input_symbols", join(r.input_symbols()));

  std::optional<nt::TrainState> state;
  nt::Model model(r.model, tc.seed, static_cast<nt::Real>(r.init_range));
  if (resume) {
    const std::string last = (std::filesystem::path(tc.checkpoint_dir) / "last.ntck").string();
    nt::LoadedCheckpoint ck = nt::load_training_checkpoint(last);
    if (!ck.state) throw nt::CheckpointError(last + ": no training state");
    model = nt::Model(r.model, std::move(ck.params));
    state = ck.state;
  }
  const nt::TrainResult res = nt::train(model, data.train, data.val, tc, state,
                                        [](const std::string& s) { std::cerr << s << std::endl; });
  const nt::TrainState& st = res.state;
  std::cerr << "best epoch " << st.best_epoch << " val_log_prob "
            << nt::format_real(st.best_val_log_prob) << "\n";
  if (st.refresh_compared > 0) {
    std::cerr << "realignment kept or improved log-prob in " << st.refresh_improved << " of "
              << st.refresh_compared << " sequences\n";
  }
  if (!data.test.empty() && st.epochs_done > 0) {
    const nt::Model best(r.model, res.best_params);
    const nt::EvalReport rep = nt::eval_model(best, data.test, r.beam, tc.workers);
    std::cout << "test sequence_error_rate " << nt::format_real(rep.sequence_error_rate)
              << " token_error_rate " << nt::format_real(rep.token_error_rate) << " count "
              << rep.count << std::endl;
  }
  return 0;
}

int cmd_decode(const CommonFlags& f, const std::string& input, const std::string& output) {
  const RunConfig r = resolve(f);
  const Loaded m = load_model(checkpoint_path(f, r));
  const nt::Vocab& vocab = m.model.config().vocab;
  std::ifstream fin;
  std::ofstream fout;
  std::istream& in = open_in(input, fin);
  std::ostream& out = open_out(output, fout);

  std::vector<nt::Sequence> scored;
  std::vector<std::vector<int>> hyps;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split_words(line).empty()) continue;
    const auto tab = line.find('\t');
    const auto words = split_words(std::string_view(line).substr(0, tab));
    nt::Sequence s;
    s.x = symbolic_input(m, words);
    const nt::DecodeResult d = nt::beam_decode(m.model, s.x, r.beam);
    out << join(nt::detokenize(d.tokens, vocab)) << '\n';
    if (tab != std::string::npos) {
      for (const auto& w : split_words(std::string_view(line).substr(tab + 1))) {
        const int t = vocab.index_of(w);
        if (t < 0 || t == vocab.eob) throw nt::InvariantError("unknown target token '" + w + "'");
        s.targets.push_back(t);
      }
      scored.push_back(std::move(s));
      hyps.push_back(d.tokens);
    }
  }
  out.flush();
  if (!scored.empty()) {
    std::size_t i = 0;
    const nt::EvalReport rep =
        nt::evaluate(scored, [&](const nt::Sequence&) { return hyps[i++]; });
    std::cerr << "sequence_error_rate " << nt::format_real(rep.sequence_error_rate)
              << " token_error_rate " << nt::format_real(rep.token_error_rate) << " count "
              << rep.count << "\n";
  }
  return 0;
}

int cmd_stream(const CommonFlags& f) {
  const RunConfig r = resolve(f);
  const Loaded m = load_model(checkpoint_path(f, r));
  const nt::ModelConfig& c = m.model.config();
  nt::StreamingDecoder dec(m.model, r.beam);
  auto emit = [&](const std::optional<std::vector<int>>& seg) {
    if (seg) std::cout << join(nt::detokenize(*seg, c.vocab)) << std::endl;
  };
  std::string line;
  std::vector<nt::Real> frame;
  while (std::getline(std::cin, line)) {
    const auto words = split_words(line);
    if (words.empty()) break;
    frame.assign(c.input_dim, nt::Real(0));
    bool numeric = words.size() == c.input_dim;
    for (std::size_t k = 0; numeric && k < words.size(); ++k) {
      double v = 0;
      const auto [p, ec] = std::from_chars(words[k].data(), words[k].data() + words[k].size(), v);
      numeric = ec == std::errc{} && p == words[k].data() + words[k].size();
      frame[k] = static_cast<nt::Real>(v);
    }
    if (!numeric) {
      const auto it = std::find(m.symbols.begin(), m.symbols.end(), words[0]);
      if (words.size() != 1 || it == m.symbols.end()) {
        throw nt::InvariantError("frame line needs " + std::to_string(c.input_dim) +
                                 " numbers or one input symbol: '" + line + "'");
      }
      frame.assign(c.input_dim, nt::Real(0));
      frame[static_cast<std::size_t>(it - m.symbols.begin())] = nt::Real(1);
    }
    emit(dec.push(frame));
  }
  emit(dec.finish());
  return 0;
}

int cmd_align(const CommonFlags& f, const std::string& data_path, const std::string& output) {
  const RunConfig r = resolve(f);
  const Loaded m = load_model(checkpoint_path(f, r));
  const nt::Vocab& vocab = m.model.config().vocab;
  std::ifstream fin;
  std::ofstream fout;
  const auto examples = nt::read_examples(open_in(data_path, fin));
  if (m.symbols.empty()) throw nt::CheckpointError("checkpoint has no input_symbols annotation");
  const auto seqs = nt::to_sequences(examples, m.symbols, vocab);
  std::map<std::size_t, nt::Alignment> table;
  for (const auto& s : seqs) {
    try {
      table[s.id] = nt::dp_best_alignment(m.model, s.x, s.targets).alignment;
    } catch (const nt::InfeasibleAlignmentError& e) {
      std::cerr << "warning: sequence " << s.id << " skipped: " << e.what() << "\n";
    }
  }
  nt::write_alignments(open_out(output, fout), table, vocab);
  return 0;
}

int report(const nt::verify::SuiteResult& res) {
  for (const auto& c : res.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  return res.ok() ? 0 : 1;
}

int cmd_gradcheck(const CommonFlags& f) {
  const RunConfig r = resolve(f);
  nt::verify::GradcheckOptions o;
  o.instances_per_kind = r.gradcheck_instances;
  o.seed = r.train.seed;
  o.epsilon = r.gradcheck_epsilon;
  o.tolerance = r.gradcheck_tolerance;
  return report(nt::verify::run_gradcheck_suite(o));
}

int cmd_oracle(const CommonFlags& f) {
  const RunConfig r = resolve(f);
  nt::verify::OracleOptions o;
  o.models = r.oracle_models;
  o.streaming_inputs = r.oracle_streaming_inputs;
  o.seed = r.train.seed;
  return report(nt::verify::run_oracle_suite(o));
}

int cmd_gen(const CommonFlags& f, const std::string& split, const std::string& output) {
  const RunConfig r = resolve(f);
  const ntrans::Splits data = r.load_data();
  const std::vector<nt::Sequence>& seqs =
      split == "train" ? data.train : split == "val" ? data.val : data.test;
  std::vector<nt::TokenExample> ex;
  for (const auto& s : seqs) {
    nt::TokenExample e;
    for (std::size_t t = 0; t < s.x.length(); ++t) {
      const auto fr = s.x.frame(t);
      const auto hot = std::max_element(fr.begin(), fr.end()) - fr.begin();
      e.input.push_back(r.input_symbols()[static_cast<std::size_t>(hot)]);
    }
    e.target = nt::detokenize(s.targets, r.model.vocab);
    ex.push_back(std::move(e));
  }
  std::ofstream fout;
  nt::write_examples(open_out(output, fout), ex);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural transducer: training, decoding and self-checks"};
  app.require_subcommand(1);
  CommonFlags f;
  bool resume = false;
  std::string input = "-", output = "-", data_path = "-", split = "train";

  auto* train = app.add_subcommand("train", "train a model; writes checkpoints and metrics CSV");
  add_common(train, f);
  train->add_flag("--resume", resume, "continue from last.ntck in checkpoint_dir");

  auto* decode = app.add_subcommand("decode", "beam-decode one input per line");
  add_common(decode, f);
  decode->add_option("--checkpoint", f.checkpoint, "default: checkpoint_dir/best.ntck");
  decode->add_option("--input", input, "input tokens per line, optional TAB targets");
  decode->add_option("--output", output);

  auto* stream = app.add_subcommand("stream", "online decoding: one frame per line on stdin");
  add_common(stream, f);
  stream->add_option("--checkpoint", f.checkpoint, "default: checkpoint_dir/best.ntck");

  auto* align = app.add_subcommand("align", "best alignments of a dataset dump");
  add_common(align, f);
  align->add_option("--checkpoint", f.checkpoint, "default: checkpoint_dir/best.ntck");
  align->add_option("--data", data_path, "dataset dump (input TAB target)");
  align->add_option("--output", output);

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient suite");
  add_common(gradcheck, f);
  auto* oracle = app.add_subcommand("oracle", "brute-force equivalence suite on tiny models");
  add_common(oracle, f);

  auto* gen = app.add_subcommand("gen", "write a dataset split as a dump");
  add_common(gen, f);
  gen->add_option("--split", split)->check(CLI::IsMember({"train", "val", "test"}));
  gen->add_option("--output", output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train) return cmd_train(f, resume);
    if (*decode) return cmd_decode(f, input, output);
    if (*stream) return cmd_stream(f);
    if (*align) return cmd_align(f, data_path, output);
    if (*gradcheck) return cmd_gradcheck(f);
    if (*oracle) return cmd_oracle(f);
    if (*gen) return cmd_gen(f, split, output);
  } catch (const nt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nt::NonFiniteError& e) {
    std::cerr << "non-finite: " << e.what() << "\n";
    return 3;
  } catch (const nt::CheckpointVersionError& e) {
    std::cerr << "checkpoint version: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
