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

#ifndef MPCNET_EVALUATION_H_
#define MPCNET_EVALUATION_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mpcnet/environment.h"
#include "mpcnet/mppi.h"
#include "mpcnet/policies.h"

namespace mpcnet {

// Closed-loop learner episode: the policy alone drives the system, with
// sequence policies warm-started from their own shifted output.
EpisodeTrace RunPolicyEpisode(const Environment& env, const Task& task,
                              const InitialCondition& init, const Policy& policy,
                              std::uint64_t seed);

// Task cost of a finished episode; +inf if it diverged.
double EpisodeCost(const EpisodeTrace& trace, const Task& task, const Environment& env);

using EpisodeRunner = std::function<EpisodeTrace(
    const Environment&, const Task&, const InitialCondition&, std::uint64_t)>;

EpisodeRunner PolicyRunner(const Policy& policy);
EpisodeRunner ExpertRunner(const MppiConfig& cfg, const CostWeights& weights);

// Costs of `trials` episodes; trial i draws its initial state and episode
// seed from `seed` and i alone, so every controller sees the same starts.
std::vector<double> RunTrials(const Environment& env, const Task& task, int trials,
                              std::uint64_t seed, const EpisodeRunner& runner);

struct Metrics {
  int trials = 0;
  int successes = 0;
  double success_percent = 0.0;
  // Over successful trials only; absent when none succeeded.
  std::optional<double> mean_cost;
  std::optional<double> std_cost;  // population standard deviation
};

Metrics ComputeMetrics(std::span<const double> costs);

}  // namespace mpcnet

#endif  // MPCNET_EVALUATION_H_
