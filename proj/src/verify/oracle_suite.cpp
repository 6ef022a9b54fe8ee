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
#include <sstream>

#include "instances.hpp"
#include "nt/alignment.hpp"
#include "nt/inference.hpp"
#include "nt/verify.hpp"

static_assert(NT_DOUBLE_PRECISION, "verification suites are built in double precision only");

namespace nt::verify {
namespace {

using namespace verify_detail;

struct TinyCase {
  ModelConfig config;
  FeatureSequence x;
};

// N <= 3, M <= 3, |V| <= 4.
TinyCase tiny_case(Rng& rng) {
  TinyCase t;
  ModelConfig& c = t.config;
  c.input_dim = 2;
  c.encoder_widths = {3};
  c.transducer_widths = {3};
  c.embed_dim = 2;
  const AttentionKind kinds[] = {AttentionKind::kNone, AttentionKind::kDot, AttentionKind::kMlp,
                                 AttentionKind::kLstm};
  c.attention = kinds[rng.below(4)];
  c.attention_dim = 2;
  c.vocab = tiny_vocab(2 + rng.below(2));
  c.block.block_size = 1 + rng.below(2);
  c.block.max_per_block = 2 + rng.below(2);
  const std::size_t len = 1 + rng.below(3 * c.block.block_size);
  t.x = random_input(rng, c.input_dim, len);
  return t;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

}  // namespace

SuiteResult run_oracle_suite(const OracleOptions& opt) {
  SuiteResult out;

  // Total probability of every complete candidate, and DP vs exhaustive
  // alignment, and beam vs exhaustive decode, on one model population.
  double max_mass = 0;
  std::size_t mass_fail = 0;
  std::size_t dp_cases = 0, dp_equal = 0, dp_fail = 0;
  double dp_max_gap = 0;
  std::size_t beam_fail = 0, mono_fail = 0;
  std::string beam_note, mono_note;
  for (std::size_t i = 0; i < opt.models; ++i) {
    Rng rng(mix_seed(opt.seed, i));
    const TinyCase tc = tiny_case(rng);
    const Model model(tc.config, rng(), Real(1.5));
    const ModelConfig& c = tc.config;
    const std::size_t n = c.block.num_blocks(tc.x.length());
    const std::size_t cap = c.block.max_per_block - 1;
    const std::size_t max_len = n * cap;

    double mass = 0;
    for_each_candidate(model, tc.x, max_len, [&](const Alignment&, double lp) { mass += std::exp(lp); });
    max_mass = std::max(max_mass, mass);
    if (!(mass <= 1 + 1e-6)) ++mass_fail;

    for (std::size_t s_len = 0; s_len <= std::min<std::size_t>(3, max_len); ++s_len) {
      const auto targets = random_targets(rng, s_len, c.vocab);
      const AlignmentResult dp = dp_best_alignment(model, tc.x, targets);
      const AlignmentResult ex = exact_best_alignment(model, tc.x, targets);
      ++dp_cases;
      if (dp.log_prob > ex.log_prob) ++dp_fail;
      if (dp.log_prob == ex.log_prob) ++dp_equal;
      dp_max_gap = std::max(dp_max_gap, ex.log_prob - dp.log_prob);
    }

    const DecodeResult truth = exhaustive_decode(model, tc.x, max_len);
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t width : {1, 2, 3, 4, 6, 8, 16, 64, 1000000}) {
      const DecodeResult b = beam_decode(model, tc.x, BeamConfig{width, max_len});
      if (b.log_prob < prev && mono_note.empty()) {
        mono_note = "model " + std::to_string(i) + " width " + std::to_string(width) + ": " +
                    fmt(b.log_prob) + " < " + fmt(prev);
      }
      if (b.log_prob < prev) ++mono_fail;
      prev = std::max(prev, b.log_prob);
      if (width == 1000000 &&
          (b.tokens != truth.tokens || b.alignment != truth.alignment ||
           std::abs(b.log_prob - truth.log_prob) > 1e-9)) {
        ++beam_fail;
        if (beam_note.empty()) beam_note = "model " + std::to_string(i);
      }
    }
  }
  out.checks.push_back({"marginal_mass", mass_fail == 0,
                        std::to_string(opt.models) + " models, max total probability " +
                            fmt(max_mass) + ", " + std::to_string(mass_fail) + " above 1+1e-6"});

  {
    ModelConfig c;
    c.input_dim = 2;
    c.encoder_widths = {3};
    c.transducer_widths = {3};
    c.embed_dim = 2;
    c.attention = AttentionKind::kMlp;
    c.attention_dim = 2;
    c.vocab = tiny_vocab(3);
    c.block.block_size = 1;
    c.block.max_per_block = 3;
    Model model(c, 1);
    zero_params(model);
    Rng rng(opt.seed);
    const FeatureSequence x = random_input(rng, 2, 2);
    const std::vector<int> targets{0, 1};
    const double got = marginal_log_prob(model, x, targets);
    const double want = std::log(3.0) + 4 * std::log(0.25);
    out.checks.push_back({"zero_weight_closed_form", std::abs(got - want) <= 1e-9,
                          "marginal " + fmt(got) + ", closed form " + fmt(want)});
  }

  out.checks.push_back({"dp_vs_exact", dp_fail == 0 && dp_cases > 0,
                        std::to_string(dp_cases) + " cases, DP above exact in " +
                            std::to_string(dp_fail) + ", exact equality in " +
                            std::to_string(dp_equal) + " (" +
                            fmt(100.0 * static_cast<double>(dp_equal) / static_cast<double>(std::max<std::size_t>(1, dp_cases))) +
                            "%), largest gap " + fmt(dp_max_gap)});
  out.checks.push_back({"beam_vs_exhaustive", beam_fail == 0,
                        std::to_string(opt.models) + " models, " + std::to_string(beam_fail) +
                            " mismatches" + (beam_note.empty() ? "" : " (first: " + beam_note + ")")});
  out.checks.push_back({"beam_monotone", mono_fail == 0,
                        std::to_string(mono_fail) + " width steps where log-prob decreased" +
                            (mono_note.empty() ? "" : " (first: " + mono_note + ")")});

  // Online vs offline with a single block, and prefix stability with many.
  std::size_t online_fail = 0, prefix_fail = 0, prefix_blocks = 0;
  for (std::size_t i = 0; i < opt.streaming_inputs; ++i) {
    Rng rng(mix_seed(opt.seed ^ 0x5eedULL, i));
    TinyCase tc = tiny_case(rng);
    const std::size_t len = tc.x.length();
    const BeamConfig beam{1 + rng.below(4), 8};

    ModelConfig single = tc.config;
    single.block.block_size = len + rng.below(3);
    const Model m1(single, rng(), Real(1.5));
    const DecodeResult off = beam_decode(m1, tc.x, beam);
    std::size_t commits = 0;
    const DecodeResult on = streaming_decode(m1, tc.x, beam, [&](std::size_t, const std::vector<int>&) { ++commits; });
    if (on.tokens != off.tokens || commits != 1) ++online_fail;

    ModelConfig multi = tc.config;
    multi.block.block_size = 1 + rng.below(2);
    const Model m2(multi, rng(), Real(1.5));
    std::vector<std::vector<int>> snapshots;
    std::vector<int> emitted;
    bool over_cap = false;
    const DecodeResult fin = streaming_decode(m2, tc.x, beam, [&](std::size_t, const std::vector<int>& seg) {
      emitted.insert(emitted.end(), seg.begin(), seg.end());
      snapshots.push_back(emitted);
      over_cap = over_cap || seg.size() + 1 > multi.block.max_per_block;
    });
    for (const auto& snap : snapshots) {
      ++prefix_blocks;
      if (snap.size() > fin.tokens.size() || !std::equal(snap.begin(), snap.end(), fin.tokens.begin())) {
        ++prefix_fail;
      }
    }
    if (over_cap || snapshots.size() != multi.block.num_blocks(len)) ++prefix_fail;
  }
  out.checks.push_back({"online_offline", online_fail == 0,
                        std::to_string(opt.streaming_inputs) + " inputs, " +
                            std::to_string(online_fail) + " mismatches"});
  out.checks.push_back({"prefix_stability", prefix_fail == 0,
                        std::to_string(prefix_blocks) + " block commits checked, " +
                            std::to_string(prefix_fail) + " violations"});
  return out;
}

}  // namespace nt::verify
