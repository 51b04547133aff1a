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

#ifndef MPCNET_TRAINING_H_
#define MPCNET_TRAINING_H_

#include <span>
#include <vector>

#include "mpcnet/policies.h"
#include "mpcnet/types.h"

namespace mpcnet {

struct TrainConfig {
  int epochs = 500;
  int batch_size = 64;
  double learning_rate = 1e-3;
  int bptt_truncation = 0;  // vanilla RNN only; 0 = full episode
  int max_failures = 3;     // non-finite epochs tolerated before aborting

  void Validate() const;
};

struct TrainResult {
  std::vector<double> epoch_losses;  // sample-weighted mean per epoch
  double final_learning_rate = 0.0;
  int failures = 0;
};

// Minibatch Adam on the policy's loss, starting from its current
// parameters. A non-finite epoch restores the epoch's starting point,
// halves the learning rate and retries.
TrainResult TrainPolicy(Policy& policy, std::span<const Example> examples,
                        const TrainConfig& cfg, Rng& rng);

// Moving average of `losses` over `smoothing` epochs.
std::vector<double> SmoothLosses(std::span<const double> losses, int smoothing);

// True if the smoothed curve never ends a `window`-epoch span higher than
// it started.
bool SmoothedLossNonIncreasing(std::span<const double> losses, int window,
                               int smoothing);

}  // namespace mpcnet

#endif  // MPCNET_TRAINING_H_
