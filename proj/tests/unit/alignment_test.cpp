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
#include <sstream>

#include "nt/alignment.hpp"
#include "nt/errors.hpp"
#include "test_util.hpp"

namespace nt {
namespace {

using testing::random_input;
using testing::tiny_config;
using testing::zero_params;

constexpr int kEob = 3;   // tiny_config(.., 3 symbols) puts <e> last

TEST(AlignmentTypeTest, CountsSegmentsAndTargets) {
  const Alignment a = Alignment::from_counts(std::vector<int>{0, 1, 2}, std::vector<std::size_t>{2, 0, 1}, kEob);
  EXPECT_EQ(a.tokens, (std::vector<int>{0, 1, 3, 3, 2, 3}));
  EXPECT_EQ(a.block_ends, (std::vector<std::size_t>{3, 4, 6}));
  EXPECT_EQ(a.counts(), (std::vector<std::size_t>{2, 0, 1}));
  EXPECT_EQ(a.targets(kEob), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(std::vector<int>(a.segment(1).begin(), a.segment(1).end()), std::vector<int>{3});
  const std::vector<int> t{0, 1, 2};
  EXPECT_NO_THROW(validate_alignment(a, kEob, 3, 3, &t));
  EXPECT_FALSE(is_valid_alignment(a, kEob, 3, 2));          // a block of 3 tokens
  EXPECT_FALSE(is_valid_alignment(a, kEob, 2, 3));          // wrong block count
  const std::vector<int> other{0, 2, 1};
  EXPECT_FALSE(is_valid_alignment(a, kEob, 3, 3, &other));  // does not strip to targets
  Alignment broken = a;
  broken.block_ends[0] = 2;
  EXPECT_FALSE(is_valid_alignment(broken, kEob, 3, 3));
  EXPECT_THROW(Alignment::from_counts(t, std::vector<std::size_t>{1, 1}, kEob), InvariantError);
}

TEST(AlignmentTypeTest, TextRoundTrip) {
  const Vocab v = testing::letters(3);
  const Alignment a{{0, 3, 3, 2, 1, 3}, {2, 3, 6}};
  EXPECT_EQ(format_alignment(a, v), "a <e> <e> c b <e>");
  EXPECT_EQ(parse_alignment("a <e> <e> c b <e>", v), a);
  EXPECT_THROW(parse_alignment("a <e> z <e>", v), InvariantError);
  EXPECT_THROW(parse_alignment("a <e> b", v), InvariantError);
  std::stringstream ss;
  write_alignments(ss, {{4, a}, {9, Alignment{{3}, {1}}}}, v);
  EXPECT_EQ(ss.str(), "4\ta <e> <e> c b <e>\n9\t<e>\n");
  const auto back = read_alignments(ss, v);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.at(4), a);
  EXPECT_EQ(back.at(9), (Alignment{{3}, {1}}));
}

TEST(CountAlignmentsTest, Compositions) {
  EXPECT_EQ(count_alignments(2, 2, 2), 3u);   // 0+2, 1+1, 2+0
  EXPECT_EQ(count_alignments(3, 2, 0), 1u);
  EXPECT_EQ(count_alignments(1, 2, 3), 0u);
  EXPECT_EQ(count_alignments(3, 2, 3), 7u);
  EXPECT_EQ(count_alignments(200, 20, 1000), std::numeric_limits<std::uint64_t>::max());
}

TEST(ExtendTest, AllConsumedGivesLoneEob) {
  Model m(tiny_config(AttentionKind::kMlp), 4, Real(0.5));
  Rng rng(1);
  Tape t;
  Graph g(m, t);
  const auto blocks = g.prepare_blocks(random_input(rng, 2, 4));
  const std::vector<int> targets{0, 1};
  Hypothesis h;
  h.emitted = 2;
  h.alignment = Alignment{{0, 1, 3}, {3}};
  h.state = g.initial_state();
  const auto ext = extend_hypothesis(g, h, blocks[1], targets);
  ASSERT_EQ(ext.size(), 1u);
  EXPECT_EQ(ext[0].alignment.tokens, (std::vector<int>{0, 1, 3, 3}));
}

TEST(ExtendTest, SingleSymbolBlocksOnlyEmitEob) {
  ModelConfig c = tiny_config(AttentionKind::kNone, 3, 1, 1);
  Model m(c, 4, Real(0.5));
  Rng rng(1);
  const FeatureSequence x = random_input(rng, 2, 3);
  const AlignmentResult r = dp_best_alignment(m, x, std::vector<int>{});
  EXPECT_EQ(r.alignment.tokens, (std::vector<int>{3, 3, 3}));
  EXPECT_THROW(dp_best_alignment(m, x, std::vector<int>{0}), InfeasibleAlignmentError);
}

TEST(ExtendTest, CandidateScoreIsParentPlusBlock) {
  Model m(tiny_config(AttentionKind::kLstm, 3, 2, 3), 4, Real(1));
  Rng rng(2);
  const FeatureSequence x = random_input(rng, 2, 4);
  const std::vector<int> targets{2, 0, 1};
  Tape t;
  Graph g(m, t);
  const auto blocks = g.prepare_blocks(x);
  Hypothesis root;
  root.alignment = Alignment{};
  root.state = g.initial_state();
  const auto first = extend_hypothesis(g, root, blocks[0], targets);
  ASSERT_EQ(first.size(), 3u);
  for (const auto& parent : first) {
    for (const auto& child : extend_hypothesis(g, parent, blocks[1], targets)) {
      const BlockScore bs = g.block_log_prob(parent.state, blocks[1],
                                             child.alignment.segment(1));
      EXPECT_NEAR(child.log_prob, parent.log_prob + t.scalar(bs.log_prob), 1e-12);
    }
  }
}

TEST(DpTest, NoTargetsGivesAllEob) {
  Model m(tiny_config(AttentionKind::kMlp, 3, 2, 3), 4, Real(0.5));
  Rng rng(1);
  const FeatureSequence x = random_input(rng, 2, 5);
  const AlignmentResult dp = dp_best_alignment(m, x, std::vector<int>{});
  EXPECT_EQ(dp.alignment.tokens, (std::vector<int>{3, 3, 3}));
  EXPECT_EQ(exact_best_alignment(m, x, std::vector<int>{}).alignment, dp.alignment);
  EXPECT_NEAR(dp.log_prob, sequence_log_prob(m, x, dp.alignment), 1e-12);
}

TEST(DpTest, SingleBlockIsForced) {
  Model m(tiny_config(AttentionKind::kDot, 3, 4, 4), 4, Real(0.5));
  Rng rng(1);
  const FeatureSequence x = random_input(rng, 2, 3);
  const std::vector<int> y{2, 2, 0};
  const AlignmentResult dp = dp_best_alignment(m, x, y);
  EXPECT_EQ(dp.alignment.tokens, (std::vector<int>{2, 2, 0, 3}));
  const AlignmentResult ex = exact_best_alignment(m, x, y);
  EXPECT_EQ(ex.alignment, dp.alignment);
  EXPECT_NEAR(ex.log_prob, sequence_log_prob(m, x, ex.alignment), 1e-12);
  EXPECT_NEAR(marginal_log_prob(m, x, y), ex.log_prob, 1e-12);
}

TEST(DpTest, ResultIsValidAndRecomputable) {
  for (AttentionKind kind : {AttentionKind::kNone, AttentionKind::kDot, AttentionKind::kMlp, AttentionKind::kLstm}) {
    Model m(tiny_config(kind, 3, 2, 3), 40, Real(1.5));
    Rng rng(9);
    const FeatureSequence x = random_input(rng, 2, 6);
    const std::vector<int> y{1, 0, 2, 2};
    const AlignmentResult dp = dp_best_alignment(m, x, y);
    EXPECT_TRUE(is_valid_alignment(dp.alignment, kEob, 3, 3, &y));
    EXPECT_NEAR(dp.log_prob, sequence_log_prob(m, x, dp.alignment), 1e-9);
  }
}

// N=3, M=3, S=3, widths 3: DP never beats the exhaustive optimum.
TEST(DpTest, NeverAboveExactOnRandomModels) {
  std::size_t equal = 0;
  const std::size_t models = 100;
  for (std::size_t i = 0; i < models; ++i) {
    Rng rng(1000 + i);
    const AttentionKind kinds[] = {AttentionKind::kNone, AttentionKind::kDot, AttentionKind::kMlp,
                                   AttentionKind::kLstm};
    Model m(tiny_config(kinds[i % 4], 3, 1, 3), rng(), Real(2));
    const FeatureSequence x = random_input(rng, 2, 3);
    std::vector<int> y;
    for (int k = 0; k < 3; ++k) y.push_back(static_cast<int>(rng.below(3)));
    const AlignmentResult dp = dp_best_alignment(m, x, y);
    const AlignmentResult ex = exact_best_alignment(m, x, y);
    EXPECT_LE(dp.log_prob, ex.log_prob);
    equal += dp.log_prob == ex.log_prob;
  }
  RecordProperty("dp_exact_agreement", std::to_string(equal) + "/" + std::to_string(models));
  EXPECT_GE(equal, models / 2);
}

TEST(ExactTest, EnumeratesThreeCompositions) {
  Model m(tiny_config(AttentionKind::kMlp, 3, 1, 3), 8, Real(1));
  Rng rng(1);
  const FeatureSequence x = random_input(rng, 2, 2);
  const std::vector<int> y{0, 1};
  std::vector<Alignment> seen;
  std::vector<double> scores;
  for_each_alignment(m, x, y, [&](const Alignment& a, double lp) {
    seen.push_back(a);
    scores.push_back(lp);
    EXPECT_NEAR(lp, sequence_log_prob(m, x, a), 1e-12);
  });
  ASSERT_EQ(seen.size(), 3u);
  EXPECT_EQ(seen[0].counts(), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(seen[1].counts(), (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(seen[2].counts(), (std::vector<std::size_t>{2, 0}));
  const AlignmentResult best = exact_best_alignment(m, x, y);
  EXPECT_EQ(best.log_prob, *std::max_element(scores.begin(), scores.end()));
  EXPECT_THROW(for_each_alignment(m, x, y, [](const Alignment&, double) {}, 2), RefusalError);
}

TEST(MarginalTest, ZeroWeightClosedForm) {
  Model m(tiny_config(AttentionKind::kMlp, 3, 1, 3), 8);
  zero_params(m);
  Rng rng(1);
  const FeatureSequence x = random_input(rng, 2, 2);
  EXPECT_NEAR(marginal_log_prob(m, x, std::vector<int>{0, 1}), std::log(3.0) + 4 * std::log(0.25), 1e-12);
}

TEST(MarginalTest, BoundedByBestAlignment) {
  Model m(tiny_config(AttentionKind::kLstm, 3, 1, 3), 12, Real(1.5));
  Rng rng(3);
  const FeatureSequence x = random_input(rng, 2, 3);
  const std::vector<int> y{2, 0, 1};
  const double marginal = marginal_log_prob(m, x, y);
  const double best = exact_best_alignment(m, x, y).log_prob;
  EXPECT_GE(marginal, best);
  EXPECT_LE(marginal, best + std::log(static_cast<double>(count_alignments(3, 2, 3))));
}

TEST(LogSumExpTest, StableAndExact) {
  EXPECT_NEAR(log_sum_exp(std::vector<double>{-1000, -1000}), -1000 + std::log(2.0), 1e-12);
  EXPECT_EQ(log_sum_exp(std::vector<double>{}), -std::numeric_limits<double>::infinity());
}

TEST(CacheTest, PutReplacesAndTracksVersion) {
  AlignmentCache cache;
  EXPECT_EQ(cache.find(3), nullptr);
  cache.put(3, Alignment{{3}, {1}}, 1);
  cache.put(3, Alignment{{0, 3}, {2}}, 7);
  ASSERT_NE(cache.find(3), nullptr);
  EXPECT_EQ(cache.find(3)->version, 7u);
  EXPECT_EQ(cache.find(3)->alignment.tokens, (std::vector<int>{0, 3}));
  EXPECT_EQ(cache.size(), 1u);
  cache.clear();
  EXPECT_EQ(cache.size(), 0u);
}

}  // namespace
}  // namespace nt
