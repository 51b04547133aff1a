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

#include "mpcnet/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mpcnet {

void TrainConfig::Validate() const {
  if (epochs < 0) throw ConfigError("training: epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("training: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("training: learning_rate must be positive");
  if (bptt_truncation < 0) throw ConfigError("training: bptt_truncation must be >= 0");
  if (max_failures < 1) throw ConfigError("training: max_failures must be >= 1");
}

TrainResult TrainPolicy(Policy& policy, std::span<const Example> examples,
                        const TrainConfig& cfg, Rng& rng) {
  cfg.Validate();
  TrainResult result;
  result.final_learning_rate = cfg.learning_rate;
  if (cfg.epochs == 0) return result;
  if (examples.empty()) throw Error("training: empty dataset");

  ParamSet& params = policy.mutable_params();
  Adam adam(params.num_values(), cfg.learning_rate);
  const LossOptions options{cfg.bptt_truncation};
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  int epoch = 0;
  while (epoch < cfg.epochs) {
    const std::vector<double> start = params.Flatten();
    const Adam adam_start = adam;
    std::shuffle(order.begin(), order.end(), rng);
    double weighted = 0.0;
    bool finite = true;
    std::string cause;
    for (std::size_t begin = 0; begin < order.size() && finite;
         begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      std::vector<const Example*> batch;
      for (std::size_t i = begin; i < end; ++i) batch.push_back(&examples[order[i]]);
      try {
        ad::Tape tape;
        std::vector<ad::Tensor> leaves = params.OnTape(tape);
        ad::Tensor loss = policy.Loss(leaves, batch, options, rng);
        ad::GradMap grads = ad::Backward(tape, loss);
        std::vector<double> flat_grad;
        flat_grad.reserve(params.num_values());
        for (const ad::Tensor& leaf : leaves) {
          auto g = grads.at(leaf).data();
          flat_grad.insert(flat_grad.end(), g.begin(), g.end());
        }
        if (!AllFinite(flat_grad)) throw NumericError("non-finite gradient");
        std::vector<double> flat = params.Flatten();
        adam.Step(flat, flat_grad);
        if (!AllFinite(flat)) throw NumericError("non-finite parameters after update");
        params.Unflatten(flat);
        weighted += loss.item() * static_cast<double>(batch.size());
      } catch (const NumericError& e) {
        finite = false;
        cause = e.what();
      }
    }
    if (!finite) {
      ++result.failures;
      params.Unflatten(start);
      adam = adam_start;
      if (result.failures >= cfg.max_failures) {
        throw NumericError("training aborted after " + std::to_string(result.failures) +
                           " non-finite epochs (epoch " + std::to_string(epoch) +
                           ", learning rate " + std::to_string(adam.lr()) +
                           ", last cause: " + cause + ")");
      }
      adam.set_lr(adam.lr() * 0.5);
      continue;
    }
    result.epoch_losses.push_back(weighted / static_cast<double>(examples.size()));
    ++epoch;
  }
  result.final_learning_rate = adam.lr();
  return result;
}

std::vector<double> SmoothLosses(std::span<const double> losses, int smoothing) {
  const std::size_t w = static_cast<std::size_t>(std::max(1, smoothing));
  std::vector<double> out;
  double sum = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    sum += losses[i];
    if (i >= w) sum -= losses[i - w];
    if (i + 1 >= w) out.push_back(sum / static_cast<double>(w));
  }
  return out;
}

bool SmoothedLossNonIncreasing(std::span<const double> losses, int window,
                               int smoothing) {
  const auto s = SmoothLosses(losses, smoothing);
  const std::size_t w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i + w < s.size(); ++i) {
    if (s[i + w] > s[i]) return false;
  }
  return true;
}

}  // namespace mpcnet
