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

#include "mpcnet/gradcheck.h"

#include <random>

#include "mpcnet/autodiff.h"
#include "mpcnet/pinet.h"
#include "mpcnet/policies.h"
#include "mpcnet/update_rule.h"

namespace mpcnet {
namespace {

using ad::Tensor;

Tensor Uniform(ad::Shape shape, double scale, Rng& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return Tensor(std::move(shape), std::move(v));
}

GradCheckCase PolicyCase(PolicyKind kind, std::uint64_t seed) {
  PolicySpec spec;
  spec.kind = kind;
  spec.hidden = 6;
  const std::size_t horizon = 4;
  const PolicyDims dims{3, 1, horizon, {-10}, {10}};
  Rng rng(seed);
  const auto policy = MakePolicy(spec, dims, rng);
  std::normal_distribution<double> n;
  Example episode;
  for (int t = 0; t < 5; ++t) {
    Sample s;
    s.obs = {n(rng), n(rng), n(rng)};
    const bool seq = IsSequencePolicy(kind);
    const std::size_t out = seq ? horizon : 1;
    if (seq) {
      for (std::size_t i = 0; i < horizon; ++i) s.warm.push_back(n(rng));
    }
    for (std::size_t i = 0; i < out; ++i) s.target.push_back(n(rng));
    episode.steps.push_back(std::move(s));
  }
  std::vector<Example> examples;
  if (kind == PolicyKind::kRnn) {
    examples.push_back(episode);
  } else {
    for (const Sample& s : episode.steps) examples.push_back(Example{{s}});
  }
  std::vector<const Example*> batch;
  for (const Example& e : examples) batch.push_back(&e);
  const ParamSet& params = policy->params();
  auto f = [&](ad::Tape&, const Tensor& leaf) {
    Rng loss_rng(0);
    return policy->Loss(params.FromFlat(leaf), batch, LossOptions{}, loss_rng);
  };
  return {PolicyKindName(kind) + " loss", ad::GradCheck(f, Tensor::Vector(params.Flatten()), 1e-6),
          1e-5};
}

}  // namespace

GradCheckCase PlannerGradCheck() {
  PiNetConfig cfg;
  cfg.hidden = 8;
  cfg.cost_hidden = 8;
  cfg.train_samples = 4;
  ParamSet params;
  Rng rng(16);
  AddPiNetParams(params, 1, cfg, rng);
  const Tensor h0 = InitHidden(std::vector<double>{0.2, -0.4, 0.9, 0.1, 0.0}, 8);
  const Tensor warm = Tensor::Matrix(3, 1, {1.0, -0.5, 2.0});
  const Tensor expert = Tensor::Matrix(3, 1, {3.0, 1.0, -1.0});
  const std::vector<Tensor> noise = {
      DrawPlannerNoise(4, 3, std::vector<double>{4.0}, cfg.dt, 3)};
  auto f = [&](ad::Tape&, const Tensor& leaf) {
    return PiNetLoss(
        PiNetForward(h0, warm, PiNetWeights::From(params.FromFlat(leaf)), cfg, noise, 10.0),
        expert);
  };
  return {"planner end-to-end loss", ad::GradCheck(f, Tensor::Vector(params.Flatten()), 1e-6),
          1e-4};
}

std::vector<GradCheckCase> RunGradCheckSuite() {
  std::vector<GradCheckCase> out;
  Rng rng(1);
  const Tensor a = Uniform({3, 4}, 1.0, rng);
  const Tensor b = Uniform({3}, 1.0, rng);
  out.push_back({"tanh affine",
                 ad::GradCheck(
                     [&](ad::Tape&, const Tensor& x) {
                       return ad::ReduceSum(ad::Tanh(ad::Affine(a, x, b)));
                     },
                     Uniform({2, 4}, 1.0, rng), 1e-6),
                 1e-6});
  out.push_back({"exp divide",
                 ad::GradCheck(
                     [&](ad::Tape&, const Tensor& x) {
                       const Tensor e = ad::Exp(ad::Negate(x));
                       return ad::ReduceSum(ad::Mul(ad::Divide(e, ad::ReduceSum(e)), x));
                     },
                     Uniform({5}, 1.0, rng), 1e-6),
                 1e-6});
  const Tensor u = Uniform({3, 1}, 1.0, rng);
  const Tensor noise = Uniform({4, 3, 1}, 0.3, rng);
  out.push_back({"path-integral update",
                 ad::GradCheck(
                     [&](ad::Tape&, const Tensor& s) {
                       return ad::ReduceSum(PathIntegralUpdate(u, noise, s, 0.5, 0.05));
                     },
                     Uniform({4}, 2.0, rng), 1e-6),
                 1e-6});
  std::uint64_t seed = 10;
  for (PolicyKind kind : {PolicyKind::kFnn, PolicyKind::kRnn, PolicyKind::kMpcFnn,
                          PolicyKind::kMpcRnn}) {
    out.push_back(PolicyCase(kind, seed++));
  }
  out.push_back(PlannerGradCheck());
  return out;
}

}  // namespace mpcnet
