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

#include "nt/errors.hpp"
#include "nt/gradcheck.hpp"
#include "nt/kv_config.hpp"
#include "nt/param_store.hpp"
#include "nt/rng.hpp"
#include "nt/tape.hpp"

namespace nt {
namespace {

std::vector<Real> values(const Tape& t, Var v) {
  const auto s = t.value(v);
  return {s.begin(), s.end()};
}

TEST(TensorTest, ShapeMatchesData) {
  Tensor t({2, 3}, Real(1.5));
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_TRUE(t.all_finite());
  EXPECT_THROW(Tensor({2, 2}, std::vector<Real>{1, 2, 3}), InvariantError);
  t[4] = std::numeric_limits<Real>::quiet_NaN();
  EXPECT_FALSE(t.all_finite());
}

TEST(ParamStoreTest, SortedIterationAndMatchingSlots) {
  ParamStore ps(3);
  ps.add("zeta", {2});
  ps.add("alpha", {3, 2});
  ps.add("mid", {1}, true);
  std::vector<std::string> names;
  for (const auto& [name, e] : ps) {
    names.push_back(name);
    EXPECT_EQ(e.value.dims(), e.grad.dims());
    EXPECT_EQ(e.value.dims(), e.velocity.dims());
  }
  EXPECT_EQ(names, (std::vector<std::string>{"alpha", "mid", "zeta"}));
  EXPECT_THROW(ps.add("mid", {1}), InvariantError);
  ps.init_uniform(Real(0.1));
  EXPECT_EQ(ps.at("mid").value[0], Real(0));
  for (std::size_t i = 0; i < 6; ++i) EXPECT_LE(std::abs(ps.at("alpha").value[i]), Real(0.1));
}

TEST(TapeTest, AffineIdentity) {
  Tape t;
  const Var w = t.input_matrix(std::vector<Real>{1, 0, 0, 1}, 2, 2);
  const Var b = t.input(std::vector<Real>{0, 0});
  const Var y = t.affine(w, t.input(std::vector<Real>{3, 4}), b);
  EXPECT_EQ(values(t, y), (std::vector<Real>{3, 4}));
}

TEST(TapeTest, AffineZeroWeight) {
  Tape t;
  const Var w = t.input_matrix(std::vector<Real>{0, 0, 0, 0, 0, 0}, 2, 3);
  const Var y = t.affine(w, t.input(std::vector<Real>{7, -2, 9}), t.input(std::vector<Real>{1, 2}));
  EXPECT_EQ(values(t, y), (std::vector<Real>{1, 2}));
}

TEST(TapeTest, AffineByHand) {
  Tape t;
  const Var w = t.input_matrix(std::vector<Real>{1, 2, 3, 4}, 2, 2);
  const Var y = t.affine(w, t.input(std::vector<Real>{1, 1}), t.input(std::vector<Real>{0, 0}));
  EXPECT_EQ(values(t, y), (std::vector<Real>{3, 7}));
}

TEST(TapeTest, SoftmaxUniform) {
  Tape t;
  const auto p = values(t, t.softmax(t.input(std::vector<Real>{0, 0, 0, 0})));
  for (Real v : p) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(TapeTest, SoftmaxLargeLogitsDoNotOverflow) {
  Tape t;
  const auto p = values(t, t.softmax(t.input(std::vector<Real>{1000, 0})));
  EXPECT_NEAR(p[0], 1.0, 1e-6);
  EXPECT_NEAR(p[1], 0.0, 1e-6);
  const auto lp = values(t, t.log_softmax(t.input(std::vector<Real>{1000, 0})));
  EXPECT_NEAR(lp[0], 0.0, 1e-12);
  EXPECT_NEAR(lp[1], -1000.0, 1e-9);
}

TEST(TapeTest, SoftmaxMatchesExtendedPrecision) {
  const long double z = std::exp(1.0L) + std::exp(2.0L) + std::exp(3.0L);
  const long double want[] = {std::exp(1.0L) / z, std::exp(2.0L) / z, std::exp(3.0L) / z};
  Tape t;
  const auto p = values(t, t.softmax(t.input(std::vector<Real>{1, 2, 3})));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p[i], static_cast<double>(want[i]), 1e-6);
}

TEST(TapeTest, BackwardOfLinearSumIsOnes) {
  Tensor p({3}, std::vector<Real>{0.5, -2, 7});
  Tensor g({3});
  Tape t;
  const Var v = t.parameter(p, &g);
  const Var loss = t.sum({t.pick(v, 0), t.pick(v, 1), t.pick(v, 2)});
  t.backward(loss);
  EXPECT_EQ(g, Tensor({3}, Real(1)));
}

TEST(TapeTest, BackwardOfSquare) {
  Tensor p({1}, std::vector<Real>{3});
  Tensor g({1});
  Tape t;
  const Var v = t.parameter(p, &g);
  t.backward(t.pick(t.mul(v, v), 0));
  EXPECT_DOUBLE_EQ(g[0], 6.0);
}

TEST(TapeTest, BackwardVisitsInReverseRecordingOrder) {
  Tensor p({2}, std::vector<Real>{0.3, -0.1});
  Tensor g({2});
  Tape t;
  const Var v = t.parameter(p, &g);
  const Var a = t.tanh(v);
  const Var b = t.mul(a, v);
  const Var c = t.sigmoid(b);
  const Var loss = t.sum({t.pick(c, 0), t.pick(c, 1)});
  std::vector<int> visited;
  t.backward(loss, [&](int id) { visited.push_back(id); });
  ASSERT_FALSE(visited.empty());
  EXPECT_EQ(visited.front(), loss.id);
  for (std::size_t i = 1; i < visited.size(); ++i) EXPECT_LT(visited[i], visited[i - 1]);
  EXPECT_EQ(visited.back(), v.id);
}

// Two-layer tanh net: backward vs central differences.
TEST(TapeTest, TwoLayerNetMatchesFiniteDifferences) {
  ParamStore ps(11);
  ps.add("w1", {4, 3});
  ps.add("b1", {4}, true);
  ps.add("w2", {2, 4});
  ps.add("b2", {2}, true);
  ps.init_uniform(Real(0.8));
  Rng rng(5);
  for (auto& [n, e] : ps) {
    for (std::size_t i = 0; i < e.value.size(); ++i) e.value[i] += static_cast<Real>(rng.uniform(-0.2, 0.2));
  }
  const std::vector<Real> x{0.4, -1.2, 0.7};
  auto forward = [&](Tape& t, ParamStore& p, bool grad) {
    auto bind = [&](const char* n) { return t.parameter(p.at(n).value, grad ? &p.at(n).grad : nullptr); };
    const Var h = t.tanh(t.affine(bind("w1"), t.input(x), bind("b1")));
    const Var y = t.log_softmax(t.affine(bind("w2"), h, bind("b2")));
    return t.scale(t.pick(y, 1), Real(-1));
  };
  ps.zero_grads();
  Tape t;
  t.backward(forward(t, ps, true));
  const auto numeric = finite_diff_grad(
      [&](ParamStore& p) {
        Tape u;
        return static_cast<double>(u.scalar(forward(u, p, false)));
      },
      ps, 1e-4);
  const GradReport r = compare_gradients(ps, numeric);
  EXPECT_EQ(r.checked, 4 * 3 + 4 + 2 * 4 + 2);
  EXPECT_LE(r.max_rel_err, 1e-4) << r.worst_param << "[" << r.worst_index << "]";
}

TEST(FiniteDiffTest, LinearFunctionGivesItsCoefficient) {
  ParamStore ps;
  ps.add("p", {3});
  ps.at("p").value = Tensor({3}, std::vector<Real>{1, -4, 0.25});
  const std::vector<double> c{2.5, -1, 8};
  const auto g = finite_diff_grad(
      [&](ParamStore& p) {
        double s = 0;
        for (std::size_t i = 0; i < 3; ++i) s += c[i] * p.at("p").value[i];
        return s;
      },
      ps, 1e-4);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g.at("p")[i], c[i], 1e-9);
  EXPECT_EQ(ps.at("p").value, Tensor({3}, std::vector<Real>{1, -4, 0.25}));
}

TEST(FiniteDiffTest, SquareAtOne) {
  ParamStore ps;
  ps.add("theta", {1});
  ps.at("theta").value[0] = 1;
  const auto g = finite_diff_grad(
      [](ParamStore& p) {
        const double v = p.at("theta").value[0];
        return v * v;
      },
      ps, 1e-4);
  EXPECT_NEAR(g.at("theta")[0], 2.0, 1e-7);
}

TEST(FiniteDiffTest, RelativeErrorFloor) {
  EXPECT_DOUBLE_EQ(relative_error(2.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(relative_error(1e-9, 0.0), 1e-6);
}

TEST(SgdTest, ZeroGradientLeavesParamsUnchanged) {
  ParamStore ps(2);
  ps.add("w", {5});
  ps.init_uniform(Real(1));
  const Tensor before = ps.at("w").value;
  sgd_momentum_step(ps, Real(0.05), Real(0.9));
  EXPECT_EQ(ps.at("w").value, before);
}

TEST(SgdTest, FirstStepMovesByLrTimesGrad) {
  ParamStore ps;
  ps.add("w", {2});
  ps.at("w").value = Tensor({2}, std::vector<Real>{1, -1});
  ps.at("w").grad = Tensor({2}, std::vector<Real>{2, -4});
  sgd_momentum_step(ps, Real(0.05), Real(0.9));
  EXPECT_DOUBLE_EQ(ps.at("w").value[0], 1 - 0.05 * 2);
  EXPECT_DOUBLE_EQ(ps.at("w").value[1], -1 + 0.05 * 4);
  EXPECT_EQ(ps.at("w").grad, Tensor({2}));
}

TEST(SgdTest, TwoStepsWithConstantGradient) {
  ParamStore ps;
  ps.add("w", {1});
  const double g = 3;
  for (int step = 0; step < 2; ++step) {
    ps.at("w").grad[0] = static_cast<Real>(g);
    sgd_momentum_step(ps, Real(0.05), Real(0.9));
  }
  EXPECT_NEAR(ps.at("w").value[0], -0.05 * g * (1 + 1.9), 1e-12);
}

TEST(SgdTest, NonFiniteGradientThrows) {
  ParamStore ps;
  ps.add("w", {1});
  ps.at("w").grad[0] = std::numeric_limits<Real>::infinity();
  EXPECT_THROW(sgd_momentum_step(ps, Real(0.1), Real(0)), NonFiniteError);
}

TEST(SgdTest, ClipScalesToMaxNorm) {
  ParamStore ps;
  ps.add("w", {2});
  ps.at("w").grad = Tensor({2}, std::vector<Real>{3, 4});
  EXPECT_DOUBLE_EQ(clip_grad_norm(ps, 1.0), 5.0);
  EXPECT_NEAR(global_grad_norm(ps), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(clip_grad_norm(ps, 10.0), 1.0);
}

TEST(CheckpointTest, RoundTripKeepsValuesVelocityAndHeader) {
  ParamStore ps(9);
  ps.add("a", {2, 3});
  ps.add("b", {3}, true);
  ps.init_uniform(Real(0.5));
  // Values representable in binary32 so the round trip is exact.
  for (auto& [n, e] : ps) {
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      e.value[i] = static_cast<Real>(static_cast<float>(e.value[i]));
      e.velocity[i] = static_cast<Real>(0.125 * static_cast<double>(i));
    }
  }
  KeyValues header;
  header.set("note", "hello world");
  ParamStore back;
  const KeyValues h = decode_checkpoint(encode_checkpoint(ps, header), back);
  EXPECT_EQ(h.get("note"), "hello world");
  ASSERT_EQ(back.size(), 2u);
  for (const auto& [n, e] : ps) {
    EXPECT_EQ(back.at(n).value, e.value) << n;
    EXPECT_EQ(back.at(n).velocity, e.velocity) << n;
  }
}

TEST(CheckpointTest, VersionMismatchIsReported) {
  ParamStore ps;
  ps.add("a", {1});
  std::string bytes = encode_checkpoint(ps, KeyValues{});
  bytes[4] = static_cast<char>(kCheckpointVersion + 1);
  ParamStore back;
  EXPECT_THROW(decode_checkpoint(bytes, back), CheckpointVersionError);
  EXPECT_THROW(decode_checkpoint("JUNK" + bytes.substr(4), back), CheckpointError);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, 10), back), CheckpointError);
}

TEST(RngTest, DeterministicAndInRange) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs = differs || x != c();
  }
  EXPECT_TRUE(differs);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(a.below(7), 7u);
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(mix_seed(1, 2), mix_seed(2, 1));
}

TEST(KeyValuesTest, ParseFormatAndErrors) {
  const KeyValues kv = KeyValues::parse("# comment\n b = 2 \na=x y # trailing\n\n");
  EXPECT_EQ(kv.get("a"), "x y");
  EXPECT_EQ(kv.get_int("b"), 2);
  EXPECT_EQ(kv.format(), "a = x y\nb = 2\n");
  EXPECT_THROW(KeyValues::parse("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(KeyValues::parse("novalue\n"), ConfigError);
  EXPECT_THROW(kv.get_int("a"), ConfigError);
  EXPECT_THROW(kv.get("missing"), ConfigError);
  EXPECT_THROW(kv.reject_unknown({"a"}), ConfigError);
  EXPECT_NO_THROW(kv.reject_unknown({"a", "b"}));
  EXPECT_EQ(KeyValues::parse("l = 1, 2,3").get_int_list("l"), (std::vector<int>{1, 2, 3}));
}

}  // namespace
}  // namespace nt
