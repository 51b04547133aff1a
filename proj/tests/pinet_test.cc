// Copyright 2026 The mpcnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mpcnet/pinet.h"

#include <cmath>

#include <gtest/gtest.h>

#include "mpcnet/environment.h"
#include "mpcnet/mppi.h"
#include "mpcnet/policies.h"

namespace mpcnet {
namespace {

using ad::Tensor;

PiNetConfig TinyConfig() {
  PiNetConfig c;
  c.hidden = 8;
  c.cost_hidden = 8;
  c.train_samples = 4;
  c.eval_samples = 4;
  return c;
}

ParamSet TinyParams(const PiNetConfig& cfg, std::size_t m, std::uint64_t seed) {
  ParamSet p;
  Rng rng(seed);
  AddPiNetParams(p, m, cfg, rng);
  return p;
}

Tensor RandomMatrix(std::size_t r, std::size_t c, Rng& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(r * c);
  for (double& x : v) x = u(rng);
  return Tensor::Matrix(r, c, v);
}

TEST(InitHiddenTest, ZeroAugments) {
  const Tensor h = InitHidden(std::vector<double>{1, 2, 3, 4}, 8);
  EXPECT_EQ(h.ToVector(), (std::vector<double>{1, 2, 3, 4, 0, 0, 0, 0}));
  const Tensor zero = InitHidden(std::vector<double>(4, 0.0), 8);
  for (double v : zero.data()) EXPECT_EQ(v, 0.0);
  EXPECT_FALSE(h.recorded());
  EXPECT_THROW(InitHidden(std::vector<double>(9, 1.0), 8), ConfigError);
}

TEST(RolloutTest, ZeroNoiseGivesIdenticalSamples) {
  const PiNetConfig cfg = TinyConfig();
  const ParamSet p = TinyParams(cfg, 2, 1);
  Rng rng(2);
  const auto r = SampleAbstractRollouts(InitHidden(std::vector<double>{0.5, -0.5}, 8),
                                        RandomMatrix(3, 2, rng, 2.0), Tensor::Zeros({5, 3, 2}),
                                        PiNetWeights::From(p.Constants()), 0.05, 10.0);
  ASSERT_EQ(r.hidden.size(), 3u);
  for (const Tensor& h : r.hidden) {
    for (std::size_t k = 1; k < 5; ++k) {
      for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(h[k * 8 + i], h[i]);
    }
  }
}

TEST(RolloutTest, ZeroWeightsSettleAtTanhOfBias) {
  PiNetConfig cfg = TinyConfig();
  ParamSet p = TinyParams(cfg, 1, 3);
  p.Set("dynamics.weight", Tensor::Zeros({8, 9}));
  const Tensor b = p.Get("dynamics.bias");
  Rng rng(4);
  const auto r = SampleAbstractRollouts(InitHidden(std::vector<double>{1, 2}, 8),
                                        RandomMatrix(4, 1, rng, 1.0),
                                        DrawPlannerNoise(1, 4, std::vector<double>{1.0}, 0.05, 7),
                                        PiNetWeights::From(p.Constants()), 0.05, 10.0);
  for (const Tensor& h : r.hidden) {
    for (std::size_t i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(h[i], std::tanh(b[i]));
  }
}

TEST(RolloutTest, TrajectoryGradientMatchesFiniteDifferences) {
  const PiNetConfig cfg = TinyConfig();
  const ParamSet p = TinyParams(cfg, 1, 5);
  Rng rng(6);
  const Tensor u = RandomMatrix(3, 1, rng, 3.0);
  const Tensor noise = DrawPlannerNoise(4, 3, std::vector<double>{4.0}, 0.05, 9);
  const Tensor h0 = InitHidden(std::vector<double>{0.2, -0.1, 0.7}, 8);
  auto f = [&](ad::Tape&, const Tensor& leaf) {
    const auto r = SampleAbstractRollouts(h0, u, noise, PiNetWeights::From(p.FromFlat(leaf)),
                                          0.05, 10.0);
    Tensor s = ad::ReduceSum(ad::Mul(r.hidden[2], r.hidden[1]));
    return ad::Add(s, ad::ReduceSum(r.hidden[0]));
  };
  EXPECT_LT(ad::GradCheck(f, Tensor::Vector(p.Flatten()), 1e-6), 1e-4);
}

TEST(CostTest, ZeroNetworkScoresHorizonTimesBias) {
  PiNetConfig cfg = TinyConfig();
  ParamSet p = TinyParams(cfg, 1, 7);
  p.Set("cost.hidden.weight", Tensor::Zeros({8, 9}));
  p.Set("cost.hidden.bias", Tensor::Zeros({8}));
  p.Set("cost.out.weight", Tensor::Zeros({1, 8}));
  p.Set("cost.out.bias", Tensor::Vector({0.75}));
  Rng rng(8);
  const PiNetWeights w = PiNetWeights::From(p.Constants());
  const auto r = SampleAbstractRollouts(InitHidden(std::vector<double>{1}, 8),
                                        RandomMatrix(5, 1, rng, 1.0),
                                        DrawPlannerNoise(3, 5, std::vector<double>{1.0}, 0.05, 1),
                                        w, 0.05, 10.0);
  const Tensor s = CostTrajectories(r, w, 10.0);
  ASSERT_EQ(s.shape(), (ad::Shape{3}));
  for (double v : s.data()) EXPECT_DOUBLE_EQ(v, 5 * 0.75);
}

TEST(CostTest, RecomputesFromSavedActivations) {
  const PiNetConfig cfg = TinyConfig();
  const ParamSet p = TinyParams(cfg, 2, 9);
  const PiNetWeights w = PiNetWeights::From(p.Constants());
  Rng rng(10);
  const auto r = SampleAbstractRollouts(InitHidden(std::vector<double>{1, 0, 2}, 8),
                                        RandomMatrix(4, 2, rng, 3.0),
                                        DrawPlannerNoise(6, 4, std::vector<double>{2.0, 1.0}, 0.05, 3),
                                        w, 0.05, 10.0);
  const Tensor s = CostTrajectories(r, w, 10.0);
  for (std::size_t k = 0; k < 6; ++k) {
    double total = 0.0;
    for (std::size_t t = 0; t < 4; ++t) {
      std::vector<double> in;
      for (std::size_t i = 0; i < 8; ++i) in.push_back(r.hidden[t][k * 8 + i]);
      for (std::size_t j = 0; j < 2; ++j) in.push_back(r.controls[t][k * 2 + j] / 10.0);
      double out = w.cost_b2[0];
      for (std::size_t a = 0; a < 8; ++a) {
        double z = w.cost_b1[a];
        for (std::size_t i = 0; i < 10; ++i) z += w.cost_w1[a * 10 + i] * in[i];
        out += w.cost_w2[a] * std::tanh(z);
      }
      total += out;
    }
    EXPECT_NEAR(s[k], total, 1e-12);
  }
}

TEST(CostTest, SamplePermutationPermutesCosts) {
  const PiNetConfig cfg = TinyConfig();
  const ParamSet p = TinyParams(cfg, 1, 11);
  const PiNetWeights w = PiNetWeights::From(p.Constants());
  const Tensor h0 = InitHidden(std::vector<double>{0.3}, 8);
  const Tensor u = Tensor::Matrix(3, 1, {1, -2, 0.5});
  const Tensor noise = DrawPlannerNoise(4, 3, std::vector<double>{3.0}, 0.05, 12);
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  std::vector<double> permuted;
  for (std::size_t k : perm) {
    permuted.insert(permuted.end(), noise.data().begin() + k * 3, noise.data().begin() + (k + 1) * 3);
  }
  const Tensor a = CostTrajectories(SampleAbstractRollouts(h0, u, noise, w, 0.05, 10.0), w, 10.0);
  const Tensor b = CostTrajectories(
      SampleAbstractRollouts(h0, u, Tensor({4, 3, 1}, permuted), w, 0.05, 10.0), w, 10.0);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(b[i], a[perm[i]]);
}

TEST(CostTest, AddingSamplesKeepsEarlierCosts) {
  const PiNetConfig cfg = TinyConfig();
  const ParamSet p = TinyParams(cfg, 1, 13);
  const PiNetWeights w = PiNetWeights::From(p.Constants());
  const Tensor h0 = InitHidden(std::vector<double>{0.3}, 8);
  const Tensor u = Tensor::Matrix(3, 1, {1, -2, 0.5});
  const std::vector<double> sigma = {3.0};
  const Tensor small = DrawPlannerNoise(4, 3, sigma, 0.05, 77);
  const Tensor large = DrawPlannerNoise(9, 3, sigma, 0.05, 77);
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small[i], large[i]);
  const Tensor a = CostTrajectories(SampleAbstractRollouts(h0, u, small, w, 0.05, 10.0), w, 10.0);
  const Tensor b = CostTrajectories(SampleAbstractRollouts(h0, u, large, w, 0.05, 10.0), w, 10.0);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(a[k], b[k]);
}

TEST(ControlUpdateTest, EqualCostsAverageNoise) {
  const Tensor u = Tensor::Matrix(2, 1, {0.5, -0.5});
  const Tensor noise({3, 2, 1}, {0.3, 0.6, -0.9, 0.0, 0.3, 0.3});
  const Tensor out = ControlUpdate(u, noise, Tensor::Vector({4, 4, 4}), 1.0, 0.25);
  EXPECT_NEAR(out[0], 0.5 + (-0.1) / 0.5, 1e-12);
  EXPECT_NEAR(out[1], -0.5 + 0.3 / 0.5, 1e-12);
}

TEST(ControlUpdateTest, MatchesExpertUpdateExactly) {
  Cartpole env;
  MppiConfig cfg = DefaultMppiConfig(TaskKind::kCartpole, env);
  cfg.num_samples = 7;
  cfg.horizon = 5;
  Rng rng(14);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 25; ++trial) {
    TrajectoryBatch b;
    b.num_samples = 7;
    b.horizon = 5;
    b.control_dim = 1;
    b.state_dim = 4;
    for (int i = 0; i < 35; ++i) b.noise.push_back(0.2 * n(rng));
    for (int i = 0; i < 7; ++i) b.costs.push_back(std::abs(n(rng)) * 5);
    ControlSeq u(5, 1);
    for (double& v : u.values()) v = n(rng);
    const auto expert = MppiUpdate(u, b, cfg, env);
    ad::Tape tape;
    const Tensor ul = tape.Leaf(Tensor::Matrix(5, 1, u.values()));
    const Tensor sl = tape.Leaf(Tensor::Vector(b.costs));
    const Tensor out = ControlUpdate(ul, Tensor({7, 5, 1}, b.noise), sl, cfg.lambda, cfg.dt);
    ASSERT_TRUE(out.recorded());
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_EQ(expert.controls.values()[i], std::clamp(out[i], -10.0, 10.0));
    }
  }
}

TEST(ControlUpdateTest, CostGradientOnThreeSamples) {
  const Tensor u = Tensor::Matrix(2, 1, {0.1, 0.2});
  const Tensor noise({3, 2, 1}, {0.3, -0.1, 0.2, 0.5, -0.4, 0.1});
  auto f = [&](ad::Tape&, const Tensor& s) {
    Tensor out = ControlUpdate(u, noise, s, 0.5, 0.05);
    return ad::ReduceSum(ad::Mul(out, Tensor::Matrix(2, 1, {1.0, -2.0})));
  };
  EXPECT_LT(ad::GradCheck(f, Tensor::Vector({0.4, 0.1, 0.9}), 1e-5), 1e-6);
}

TEST(ForwardTest, TwoIterationsComposeSinglePasses) {
  PiNetConfig cfg = TinyConfig();
  const ParamSet p = TinyParams(cfg, 1, 15);
  const PiNetWeights w = PiNetWeights::From(p.Constants());
  const Tensor h0 = InitHidden(std::vector<double>{0.1, 0.2}, 8);
  const Tensor warm = Tensor::Matrix(3, 1, {1, 2, 3});
  const std::vector<double> sigma = {4.0};
  const std::vector<Tensor> noise = {DrawPlannerNoise(4, 3, sigma, 0.05, 1),
                                     DrawPlannerNoise(4, 3, sigma, 0.05, 2)};
  const Tensor twice = PiNetForward(h0, warm, w, cfg, noise, 10.0);
  const Tensor once = PiNetForward(h0, warm, w, cfg, std::span(noise).first(1), 10.0);
  const Tensor again = PiNetForward(h0, once, w, cfg, std::span(noise).subspan(1), 10.0);
  EXPECT_EQ(twice.ToVector(), again.ToVector());
}

TEST(ForwardTest, SeededOutputIsDeterministicAndShaped) {
  PolicySpec spec;
  spec.kind = PolicyKind::kPiNet;
  spec.pinet = TinyConfig();
  PolicyDims dims{5, 1, 20, {-10}, {10}};
  Rng init(1);
  auto policy = MakePolicy(spec, dims, init);
  Rng a(5), b(5);
  const std::vector<double> x = {0.1, 0.2, 0.3, 0.4, 0.5};
  const auto ua = policy->Act(x, ControlSeq(20, 1), a);
  EXPECT_EQ(ua, policy->Act(x, ControlSeq(20, 1), b));
  EXPECT_EQ(ua.horizon(), 20u);
  for (double v : ua.values()) EXPECT_LE(std::abs(v), 10.0);
}

TEST(LossTest, Values) {
  const Tensor a = Tensor::Matrix(2, 2, {1, 2, 3, 4});
  EXPECT_EQ(PiNetLoss(a, a).item(), 0.0);
  const Tensor b = Tensor::Matrix(2, 2, {1.5, 2.5, 3.5, 4.5});
  EXPECT_DOUBLE_EQ(PiNetLoss(a, b).item(), 0.25);
  EXPECT_THROW(PiNetLoss(a, Tensor::Vector({1, 2, 3, 4})), ShapeError);
}

TEST(EndToEndTest, LossGradientMatchesFiniteDifferences) {
  const PiNetConfig cfg = TinyConfig();
  const ParamSet p = TinyParams(cfg, 1, 16);
  const Tensor h0 = InitHidden(std::vector<double>{0.2, -0.4, 0.9, 0.1, 0.0}, 8);
  const Tensor warm = Tensor::Matrix(3, 1, {1.0, -0.5, 2.0});
  const Tensor expert = Tensor::Matrix(3, 1, {3.0, 1.0, -1.0});
  const std::vector<Tensor> noise = {DrawPlannerNoise(4, 3, std::vector<double>{4.0}, 0.05, 3)};
  auto f = [&](ad::Tape&, const Tensor& leaf) {
    return PiNetLoss(
        PiNetForward(h0, warm, PiNetWeights::From(p.FromFlat(leaf)), cfg, noise, 10.0), expert);
  };
  EXPECT_LT(ad::GradCheck(f, Tensor::Vector(p.Flatten()), 1e-6), 1e-4);
}

TEST(EndToEndTest, NoiseIsNotALeaf) {
  const PiNetConfig cfg = TinyConfig();
  const ParamSet p = TinyParams(cfg, 1, 17);
  ad::Tape tape;
  const auto leaves = p.OnTape(tape);
  const Tensor noise = DrawPlannerNoise(4, 3, std::vector<double>{4.0}, 0.05, 3);
  const Tensor loss =
      PiNetLoss(PiNetForward(InitHidden(std::vector<double>{1}, 8), Tensor::Zeros({3, 1}),
                             PiNetWeights::From(leaves), cfg, std::vector<Tensor>{noise}, 10.0),
                Tensor::Zeros({3, 1}));
  const ad::GradMap g = ad::Backward(tape, loss);
  EXPECT_EQ(g.size(), leaves.size());
  EXPECT_FALSE(noise.recorded());
  EXPECT_FALSE(g.contains(noise.node()));
}

TEST(MemoryTest, TapeStorageTracksAnalyticCount) {
  PiNetConfig cfg;
  cfg.train_samples = 50;
  const std::size_t horizon = 10, m = 1;
  const ParamSet p = TinyParams(cfg, m, 18);
  ad::Tape tape;
  const auto leaves = p.OnTape(tape);
  const std::size_t param_values = tape.stored_values();
  Rng rng(0);
  PiNetLoss(PiNetForward(InitHidden(std::vector<double>{1, 2, 3, 4, 5}, 64),
                         Tensor::Zeros({horizon, m}), PiNetWeights::From(leaves), cfg, 50, 1,
                         10.0, rng),
            Tensor::Zeros({horizon, m}));
  const double measured = static_cast<double>(tape.stored_values() - param_values);
  const double analytic = static_cast<double>(PiNetActivationCount(50, horizon, m, 64, 64));
  EXPECT_LE(measured, 1.1 * analytic);
  EXPECT_GE(measured, 0.9 * analytic);
}

TEST(ConfigTest, ValidationAndMemoryBudget) {
  PiNetConfig cfg;
  EXPECT_NO_THROW(cfg.ValidateTraining(12, 4, 20, 64));
  cfg.train_iterations = 200;
  EXPECT_THROW(cfg.ValidateTraining(12, 4, 20, 64), ConfigError);
  cfg = PiNetConfig();
  EXPECT_THROW(cfg.Validate(65, 1), ConfigError);
  cfg.lambda = 0.0;
  EXPECT_THROW(cfg.Validate(4, 1), ConfigError);
  cfg = PiNetConfig();
  cfg.nu = 0.9;
  EXPECT_THROW(cfg.Validate(4, 1), ConfigError);
  cfg = PiNetConfig();
  cfg.sigma_sample = {1.0, 2.0};
  EXPECT_THROW(cfg.Validate(4, 1), ConfigError);
}

}  // namespace
}  // namespace mpcnet
