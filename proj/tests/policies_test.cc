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

#include "mpcnet/policies.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include <gtest/gtest.h>

namespace mpcnet {
namespace {

PolicyDims CartDims(std::size_t horizon = 20) {
  return {5, 1, horizon, {-10.0}, {10.0}};
}

PolicyDims QuadDims() { return {12, 4, 20, {0, 0, 0, 0}, {5, 5, 5, 5}}; }

void ZeroAllExcept(Policy& p, const std::string& keep, double value) {
  ParamSet& ps = p.mutable_params();
  for (const auto& e : ps.entries()) {
    const double v = e.name == keep ? value : 0.0;
    ps.Set(e.name, ad::Tensor::Filled(e.value.shape(), v));
  }
}

std::vector<double> RandomVector(std::size_t n, Rng& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double LossGradError(const Policy& policy, const std::vector<Example>& examples,
                     LossOptions options = {}) {
  std::vector<const Example*> batch;
  for (const auto& e : examples) batch.push_back(&e);
  const std::vector<double> flat = policy.params().Flatten();
  auto f = [&](ad::Tape&, const ad::Tensor& leaf) {
    Rng rng(99);
    return policy.Loss(policy.params().FromFlat(leaf), batch, options, rng);
  };
  return ad::GradCheck(f, ad::Tensor::Vector(flat), 1e-6);
}

Example SingleStep(Rng& rng, std::size_t obs, std::size_t warm, std::size_t target) {
  return {{Sample{RandomVector(obs, rng), RandomVector(warm, rng, 5.0),
                  RandomVector(target, rng, 5.0)}}};
}

TEST(FnnTest, ZeroWeightsEmitBias) {
  Rng rng(1);
  FnnPolicy p(CartDims(), 8, rng);
  ZeroAllExcept(p, "out.bias", 2.5);
  const auto u = p.Act(std::vector<double>{1, 2, 3, 4, 5}, ControlSeq(), rng);
  EXPECT_EQ(u.horizon(), 1u);
  EXPECT_EQ(u(0, 0), 2.5);
}

TEST(FnnTest, OutputsRespectLimits) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    FnnPolicy p(QuadDims(), 16, rng);
    ParamSet& ps = p.mutable_params();
    ps.Unflatten(RandomVector(ps.num_values(), rng, 20.0));
    const auto u = p.Act(RandomVector(12, rng, 10.0), ControlSeq(), rng);
    for (double v : u.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 5.0);
    }
  }
}

TEST(FnnTest, ShapeMismatchIsAnError) {
  Rng rng(3);
  FnnPolicy p(CartDims(), 4, rng);
  EXPECT_THROW(p.Act(std::vector<double>{1, 2}, ControlSeq(), rng), ShapeError);
}

TEST(FnnTest, LossGradientMatchesFiniteDifferences) {
  Rng rng(4);
  FnnPolicy p(CartDims(), 6, rng);
  std::vector<Example> data;
  for (int i = 0; i < 4; ++i) data.push_back(SingleStep(rng, 5, 0, 1));
  EXPECT_LT(LossGradError(p, data), 1e-5);
}

TEST(RnnTest, ZeroWeightsEmitBiasRegardlessOfHistory) {
  Rng rng(5);
  RnnPolicy p(CartDims(), 6, rng);
  ZeroAllExcept(p, "out.bias", -1.5);
  for (int t = 0; t < 4; ++t) {
    EXPECT_EQ(p.Act(RandomVector(5, rng), ControlSeq(), rng)(0, 0), -1.5);
  }
}

TEST(RnnTest, ZeroRecurrenceMakesItReactive) {
  Rng rng(6);
  RnnPolicy p(CartDims(), 6, rng);
  const ad::Tensor w = p.params().Get("cell.weight");  // [h x (h + n)]
  std::vector<double> v = w.ToVector();
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 6; ++c) v[r * 11 + c] = 0.0;
  }
  p.mutable_params().Set("cell.weight", ad::Tensor(w.shape(), v));
  const std::vector<double> x = {0.1, -0.2, 0.3, 0.4, 0.5};
  const auto a = p.Act(x, ControlSeq(), rng);
  const auto b = p.Act(x, ControlSeq(), rng);
  EXPECT_EQ(a, b);
}

TEST(RnnTest, ResetClearsHiddenState) {
  Rng rng(7);
  RnnPolicy p(CartDims(), 6, rng);
  const std::vector<double> x = {0.1, -0.2, 0.3, 0.4, 0.5};
  const auto first = p.Act(x, ControlSeq(), rng);
  p.Act(x, ControlSeq(), rng);
  p.Reset();
  for (double h : p.state()) EXPECT_EQ(h, 0.0);
  EXPECT_EQ(p.Act(x, ControlSeq(), rng), first);
}

TEST(RnnTest, BpttGradientOverFiveSteps) {
  Rng rng(8);
  RnnPolicy p(CartDims(), 5, rng);
  std::vector<Example> data(2);
  for (int t = 0; t < 5; ++t) data[0].steps.push_back(SingleStep(rng, 5, 0, 1).steps[0]);
  for (int t = 0; t < 3; ++t) data[1].steps.push_back(SingleStep(rng, 5, 0, 1).steps[0]);
  EXPECT_LT(LossGradError(p, data), 1e-5);
  EXPECT_LT(LossGradError(p, data, {5}), 1e-5);
  // Truncation cuts gradient paths on purpose.
  EXPECT_GT(LossGradError(p, data, {2}), 1e-3);
}

TEST(RnnTest, TrainingLossMatchesStepwiseInference) {
  Rng rng(9);
  RnnPolicy p(CartDims(), 5, rng);
  Example ex;
  for (int t = 0; t < 6; ++t) ex.steps.push_back(SingleStep(rng, 5, 0, 1).steps[0]);
  double sq = 0.0;
  p.Reset();
  for (const auto& s : ex.steps) {
    // Targets inside the limits and outputs unclamped at this scale.
    const double u = p.Act(s.obs, ControlSeq(), rng)(0, 0);
    sq += (u - s.target[0]) * (u - s.target[0]);
  }
  const Example* batch[] = {&ex};
  Rng unused(0);
  const double loss = p.Loss(p.params().Constants(), batch, {}, unused).item();
  EXPECT_NEAR(loss, sq / 6.0, 1e-12);
  // Truncation changes gradients, never the forward value.
  EXPECT_NEAR(p.Loss(p.params().Constants(), batch, {2}, unused).item(), loss, 1e-15);
}

TEST(MpcFnnTest, ZeroWeightsEmitReshapedBias) {
  Rng rng(10);
  MpcFnnPolicy p(QuadDims(), 8, rng);
  ZeroAllExcept(p, "out.bias", 1.25);
  const auto u = p.Act(RandomVector(12, rng), ControlSeq(20, 4, 2.0), rng);
  EXPECT_EQ(u.horizon(), 20u);
  EXPECT_EQ(u.dim(), 4u);
  for (double v : u.values()) EXPECT_EQ(v, 1.25);
  EXPECT_THROW(p.Act(RandomVector(12, rng), ControlSeq(19, 4), rng), ShapeError);
}

TEST(MpcFnnTest, SequenceLossGradient) {
  Rng rng(11);
  MpcFnnPolicy p(CartDims(4), 5, rng);
  std::vector<Example> data;
  for (int i = 0; i < 3; ++i) data.push_back(SingleStep(rng, 5, 4, 4));
  EXPECT_LT(LossGradError(p, data), 1e-5);
}

TEST(MpcRnnTest, SingleStepHorizonIsOneCell) {
  Rng rng(12);
  MpcRnnPolicy p(CartDims(1), 4, rng);
  const std::vector<double> x = {0.1, 0.2, -0.3, 0.4, 0.0};
  const ControlSeq warm(1, 1, 3.0);
  const auto& ps = p.params();
  auto we = ps.Get("embed.weight"), be = ps.Get("embed.bias");
  auto wc = ps.Get("cell.weight"), bc = ps.Get("cell.bias");
  auto wo = ps.Get("out.weight"), bo = ps.Get("out.bias");
  std::vector<double> h0(4), h1(4);
  for (int r = 0; r < 4; ++r) {
    h0[r] = be[r];
    for (int c = 0; c < 5; ++c) h0[r] += we[r * 5 + c] * x[c];
  }
  for (int r = 0; r < 4; ++r) {
    double a = bc[r] + wc[r * 5 + 4] * (3.0 / 10.0);
    for (int c = 0; c < 4; ++c) a += wc[r * 5 + c] * h0[c];
    h1[r] = std::tanh(a);
  }
  double u = bo[0];
  for (int c = 0; c < 4; ++c) u += wo[c] * h1[c];
  EXPECT_NEAR(p.Act(x, warm, rng)(0, 0), u, 1e-14);
}

TEST(MpcRnnTest, DeadInputPathIgnoresWarm) {
  Rng rng(13);
  MpcRnnPolicy p(CartDims(), 6, rng);
  const ad::Tensor w = p.params().Get("cell.weight");  // [h x (h + m)]
  std::vector<double> v = w.ToVector();
  for (std::size_t r = 0; r < 6; ++r) v[r * 7 + 6] = 0.0;
  p.mutable_params().Set("cell.weight", ad::Tensor(w.shape(), v));
  const std::vector<double> x = {0.3, 0.1, -0.2, 0.9, 0.0};
  ControlSeq warm(20, 1);
  for (std::size_t t = 0; t < 20; ++t) warm(t, 0) = std::sin(static_cast<double>(t));
  ControlSeq doubled = warm;
  for (double& d : doubled.values()) d *= 2.0;
  EXPECT_EQ(p.Act(x, warm, rng), p.Act(x, doubled, rng));
}

TEST(MpcRnnTest, BpttGradientOverFiveSteps) {
  Rng rng(14);
  MpcRnnPolicy p(CartDims(5), 5, rng);
  std::vector<Example> data;
  for (int i = 0; i < 3; ++i) data.push_back(SingleStep(rng, 5, 5, 5));
  EXPECT_LT(LossGradError(p, data), 1e-5);
}

TEST(ParityTest, AllKindsWithinTenPercent) {
  for (const PolicyDims& dims : {CartDims(), QuadDims()}) {
    PolicySpec spec;
    const auto report = ParityReport(spec, dims);
    ASSERT_EQ(report.size(), 5u);
    const double target = static_cast<double>(ParityTarget(spec, dims));
    for (const auto& e : report) {
      EXPECT_LE(std::abs(static_cast<double>(e.params) - target), 0.1 * target)
          << PolicyKindName(e.kind);
      if (e.kind != PolicyKind::kPiNet) {
        spec.kind = e.kind;
        Rng rng(0);
        EXPECT_EQ(MakePolicy(spec, dims, rng)->num_params(), e.params);
      }
    }
  }
}

TEST(ParityTest, CountsMatchBuiltNetworks) {
  Rng rng(15);
  const PiNetConfig pinet;
  for (PolicyKind k : {PolicyKind::kFnn, PolicyKind::kRnn, PolicyKind::kMpcFnn,
                       PolicyKind::kMpcRnn}) {
    PolicySpec spec;
    spec.kind = k;
    spec.hidden = 7;
    EXPECT_EQ(MakePolicy(spec, QuadDims(), rng)->num_params(),
              PolicyParamCount(k, QuadDims(), 7, pinet));
  }
  PolicySpec spec;
  spec.kind = PolicyKind::kPiNet;
  EXPECT_EQ(MakePolicy(spec, QuadDims(), rng)->num_params(),
            PolicyParamCount(PolicyKind::kPiNet, QuadDims(), 64, pinet));
}

TEST(CheckpointTest, RestoresPolicyExactly) {
  Rng rng(16);
  PolicySpec spec;
  spec.kind = PolicyKind::kMpcRnn;
  spec.hidden = 9;
  auto p = MakePolicy(spec, CartDims(), rng);
  const auto path = std::filesystem::temp_directory_path() / "mpcnet_ckpt_test.txt";
  SaveCheckpoint(*p, path.string());
  auto q = LoadCheckpoint(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(q->kind(), PolicyKind::kMpcRnn);
  EXPECT_EQ(q->params().Flatten(), p->params().Flatten());
  const std::vector<double> x = {0.1, 0.2, 0.3, 0.4, 0.5};
  EXPECT_EQ(q->Act(x, ControlSeq(20, 1, 1.0), rng), p->Act(x, ControlSeq(20, 1, 1.0), rng));
}

TEST(CheckpointTest, PlannerKeepsItsConfiguration) {
  Rng rng(17);
  PolicySpec spec;
  spec.kind = PolicyKind::kPiNet;
  spec.pinet.hidden = 8;
  spec.pinet.cost_hidden = 6;
  spec.pinet.eval_samples = 33;
  auto p = MakePolicy(spec, CartDims(), rng);
  auto q = CheckpointFromString(CheckpointToString(*p));
  const auto* planner = dynamic_cast<const PiNetPolicy*>(q.get());
  ASSERT_NE(planner, nullptr);
  EXPECT_EQ(planner->config().eval_samples, 33);
  EXPECT_EQ(planner->params().Flatten(), p->params().Flatten());
  EXPECT_EQ(planner->params().at(0).name, "dynamics.weight");
}

TEST(CheckpointTest, RejectsDamagedInput) {
  Rng rng(18);
  PolicySpec spec;
  spec.kind = PolicyKind::kFnn;
  spec.hidden = 3;
  const std::string text = CheckpointToString(*MakePolicy(spec, CartDims(), rng));
  EXPECT_THROW(CheckpointFromString(""), IoError);
  EXPECT_THROW(CheckpointFromString("{not json}\n"), IoError);
  std::string bumped = text;
  bumped.replace(bumped.find("\"version\":1"), 11, "\"version\":9");
  EXPECT_THROW(CheckpointFromString(bumped), IoError);
  const std::string truncated = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  EXPECT_THROW(CheckpointFromString(truncated), IoError);
  EXPECT_THROW(LoadCheckpoint("/nonexistent/dir/ckpt"), IoError);
}

TEST(KindTest, NamesRoundTrip) {
  for (PolicyKind k : {PolicyKind::kFnn, PolicyKind::kRnn, PolicyKind::kMpcFnn,
                       PolicyKind::kMpcRnn, PolicyKind::kPiNet}) {
    EXPECT_EQ(ParsePolicyKind(PolicyKindName(k)), k);
  }
  EXPECT_THROW(ParsePolicyKind("lstm"), ConfigError);
  EXPECT_FALSE(IsSequencePolicy(PolicyKind::kRnn));
  EXPECT_TRUE(IsSequencePolicy(PolicyKind::kPiNet));
}

}  // namespace
}  // namespace mpcnet
