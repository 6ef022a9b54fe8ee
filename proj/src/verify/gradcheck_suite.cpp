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

#include <sstream>

#include "instances.hpp"
#include "nt/gradcheck.hpp"
#include "nt/training.hpp"
#include "nt/verify.hpp"

static_assert(NT_DOUBLE_PRECISION, "verification suites are built in double precision only");

namespace nt::verify {

SuiteResult run_gradcheck_suite(const GradcheckOptions& opt) {
  using namespace verify_detail;
  SuiteResult out;
  const AttentionKind kinds[] = {AttentionKind::kNone, AttentionKind::kDot, AttentionKind::kMlp,
                                 AttentionKind::kLstm};
  for (std::size_t ki = 0; ki < 4; ++ki) {
    const AttentionKind kind = kinds[ki];
    std::size_t failures = 0;
    double worst = 0;
    std::string worst_where;
    std::size_t checked = 0;
    for (std::size_t inst = 0; inst < opt.instances_per_kind; ++inst) {
      Rng rng(mix_seed(mix_seed(opt.seed, ki), inst));
      ModelConfig c;
      c.input_dim = 3;
      c.encoder_widths.clear();
      c.transducer_widths.clear();
      const std::size_t enc_layers = 1 + rng.below(2);
      for (std::size_t l = 0; l < enc_layers; ++l) c.encoder_widths.push_back(static_cast<int>(rng.range(2, 6)));
      const std::size_t tr_layers = 1 + rng.below(2);
      for (std::size_t l = 0; l < tr_layers; ++l) c.transducer_widths.push_back(static_cast<int>(rng.range(2, 8)));
      if (kind == AttentionKind::kDot) c.transducer_widths[0] = c.encoder_widths.back();
      c.embed_dim = 3;
      c.attention = kind;
      c.attention_dim = static_cast<std::size_t>(rng.range(2, 4));
      c.vocab = tiny_vocab(3);
      c.block.block_size = static_cast<std::size_t>(rng.range(1, 3));
      c.block.max_per_block = static_cast<std::size_t>(rng.range(2, 4));
      c.block_recurrence = rng.below(4) != 0;
      const std::size_t len = static_cast<std::size_t>(rng.range(1, 6));
      const std::size_t n = c.block.num_blocks(len);
      const std::size_t cap = c.block.max_per_block - 1;
      const std::size_t s_len = static_cast<std::size_t>(rng.range(0, std::min<std::size_t>(3, n * cap)));

      Model model(c, rng(), Real(0.5));
      const FeatureSequence x = random_input(rng, c.input_dim, len);
      const auto targets = random_targets(rng, s_len, c.vocab);
      const auto counts = random_counts(rng, n, cap, s_len);
      const Alignment a = Alignment::from_counts(targets, counts, c.vocab.eob);

      model.params().zero_grads();
      accumulate_gradient(model, x, a);
      const auto numeric = finite_diff_grad(
          [&](ParamStore&) { return -sequence_log_prob(model, x, a); }, model.params(), opt.epsilon);
      const GradReport r = compare_gradients(model.params(), numeric);
      checked += r.checked;
      if (r.max_rel_err > opt.tolerance) ++failures;
      if (r.max_rel_err >= worst) {
        worst = r.max_rel_err;
        std::ostringstream w;
        w << "instance " << inst << " " << r.worst_param << "[" << r.worst_index
          << "] analytic " << r.worst_analytic << " numeric " << r.worst_numeric;
        worst_where = w.str();
      }
    }
    std::ostringstream d;
    d << opt.instances_per_kind << " instances, " << checked << " entries, " << failures
      << " failures, max rel err " << worst << " (" << worst_where << ")";
    out.checks.push_back({"gradcheck_" + std::string(to_string(kind)),
                          failures == 0 && opt.instances_per_kind > 0, d.str()});
  }
  return out;
}

}  // namespace nt::verify
