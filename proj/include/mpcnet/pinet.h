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

#ifndef MPCNET_PINET_H_
#define MPCNET_PINET_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mpcnet/autodiff.h"
#include "mpcnet/network.h"
#include "mpcnet/types.h"
#include "mpcnet/update_rule.h"

namespace mpcnet {

// Differentiable planner: an abstract-dynamics RNN rolls K perturbed copies
// of the baseline controls, a cost network scores them, and the
// path-integral update mixes the perturbations.
struct PiNetConfig {
  std::size_t hidden = 64;       // abstract state width
  std::size_t cost_hidden = 64;  // cost network hidden layer
  int train_samples = 100;       // K while training
  int train_iterations = 1;      // U while training
  int eval_samples = 100;
  int eval_iterations = 1;
  double lambda = 1.0;
  double nu = 1.5;
  double dt = 0.05;
  // Per channel; empty means 1/sqrt(dt).
  std::vector<double> sigma_sample;
  // Bound on the estimated activation storage of one training minibatch.
  double memory_budget_bytes = 4.0 * 1024 * 1024 * 1024;

  std::vector<double> SigmaFor(std::size_t control_dim) const;
  void Validate(std::size_t obs_dim, std::size_t control_dim) const;
  // Also checks the storage estimate of a minibatch of `batch` examples.
  void ValidateTraining(std::size_t obs_dim, std::size_t control_dim,
                        std::size_t horizon, std::size_t batch) const;
};

// Parameters: dynamics.weight [h x (h+m)], dynamics.bias [h],
// cost.hidden.weight [c x (h+m)], cost.hidden.bias [c],
// cost.out.weight [1 x c], cost.out.bias [1].
void AddPiNetParams(ParamSet& params, std::size_t control_dim,
                    const PiNetConfig& cfg, Rng& rng);
std::size_t PiNetParamCount(std::size_t control_dim, std::size_t hidden,
                            std::size_t cost_hidden);

// Tensor views in AddPiNetParams order.
struct PiNetWeights {
  ad::Tensor dyn_w, dyn_b, cost_w1, cost_b1, cost_w2, cost_b2;
  static PiNetWeights From(std::span<const ad::Tensor> p);
};

// [x, 0, ..., 0] of width `hidden`.
ad::Tensor InitHidden(std::span<const double> x, std::size_t hidden);

struct AbstractRollouts {
  std::vector<ad::Tensor> hidden;    // h_1 .. h_H, each [K x h]
  std::vector<ad::Tensor> controls;  // perturbed u_0 .. u_{H-1}, each [K x m]
};

// h_{t+1,k} = tanh(W [h_{t,k}, (u_t + eps_{t,k}/sqrt(dt)) / scale] + b).
// `noise` is [K x H x m] and enters as a constant.
AbstractRollouts SampleAbstractRollouts(const ad::Tensor& h0, const ad::Tensor& u,
                                        const ad::Tensor& noise,
                                        const PiNetWeights& w, double dt,
                                        double control_scale);

// S_k = sum_t c([h_{t+1,k}, u_{t,k} / scale]); returns [K].
ad::Tensor CostTrajectories(const AbstractRollouts& rollouts, const PiNetWeights& w,
                            double control_scale);

// The planner's update step: the shared path-integral update, on the tape
// whenever u or costs are.
inline ad::Tensor ControlUpdate(const ad::Tensor& u, const ad::Tensor& noise,
                                const ad::Tensor& costs, double lambda, double dt) {
  return PathIntegralUpdate(u, noise, costs, lambda, dt);
}

// eps = sigma * sqrt(dt) * z; sample k uses its own stream keyed by `seed`.
ad::Tensor DrawPlannerNoise(std::size_t samples, std::size_t horizon,
                            std::span<const double> sigma, double dt,
                            std::uint64_t seed);

// U update passes, each with its own noise tensor; not clamped.
ad::Tensor PiNetForward(const ad::Tensor& h0, const ad::Tensor& warm,
                        const PiNetWeights& w, const PiNetConfig& cfg,
                        std::span<const ad::Tensor> noise, double control_scale);

// Draws `iterations` fresh noise tensors from rng and runs the planner.
ad::Tensor PiNetForward(const ad::Tensor& h0, const ad::Tensor& warm,
                        const PiNetWeights& w, const PiNetConfig& cfg,
                        int samples, int iterations, double control_scale,
                        Rng& rng);

ad::Tensor PiNetLoss(const ad::Tensor& predicted, const ad::Tensor& expert);

// Doubles held by the network activations of one example with U = 1.
std::size_t PiNetActivationCount(std::size_t samples, std::size_t horizon,
                                 std::size_t control_dim, std::size_t hidden,
                                 std::size_t cost_hidden);

// Storage estimate when every pass of every example stays on the tape.
double PiNetTrainingBytes(const PiNetConfig& cfg, std::size_t horizon,
                          std::size_t control_dim, std::size_t batch);

}  // namespace mpcnet

#endif  // MPCNET_PINET_H_
