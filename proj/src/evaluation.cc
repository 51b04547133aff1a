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

#include "mpcnet/evaluation.h"

#include <cmath>
#include <limits>
#include <memory>

#include "mpcnet/parallel.h"

namespace mpcnet {

EpisodeTrace RunPolicyEpisode(const Environment& env, const Task& task,
                              const InitialCondition& init, const Policy& policy,
                              std::uint64_t seed) {
  Rng env_rng(DeriveSeed(seed, {2}));
  Rng policy_rng(DeriveSeed(seed, {4}));
  auto episode_env = EpisodeEnvironment(env, task, init.phase);
  auto learner = policy.Clone();
  learner->Reset();
  const std::size_t m = env.control_dim();
  ControlSeq warm = IsSequencePolicy(policy.kind()) ? ControlSeq(policy.dims().horizon, m, 0.0)
                                                    : ControlSeq();
  StateVec x = init.state;
  EpisodeTrace trace;
  for (int t = 0; t < task.episode_steps; ++t) {
    ControlSeq out = learner->Act(episode_env->Observe(x, t), warm, policy_rng);
    ControlVec u = out.first();
    auto next = env.Step(x, u, env_rng);
    trace.controls.push_back(u);
    if (!next) {
      trace.diverged = true;
      break;
    }
    x = *next;
    trace.states.push_back(x);
    if (IsSequencePolicy(policy.kind())) warm = ShiftWarmStart(out);
  }
  return trace;
}

double EpisodeCost(const EpisodeTrace& trace, const Task& task, const Environment& env) {
  if (trace.diverged || trace.states.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  return TaskCost(trace.states, task, env);
}

EpisodeRunner PolicyRunner(const Policy& policy) {
  std::shared_ptr<const Policy> snapshot = policy.Clone();
  return [snapshot](const Environment& env, const Task& task,
                    const InitialCondition& init, std::uint64_t seed) {
    return RunPolicyEpisode(env, task, init, *snapshot, seed);
  };
}

EpisodeRunner ExpertRunner(const MppiConfig& cfg, const CostWeights& weights) {
  return [cfg, weights](const Environment& env, const Task& task,
                        const InitialCondition& init, std::uint64_t seed) {
    return RunExpertEpisode(env, task, init, cfg, weights, seed);
  };
}

std::vector<double> RunTrials(const Environment& env, const Task& task, int trials,
                              std::uint64_t seed, const EpisodeRunner& runner) {
  if (trials < 1) throw ConfigError("at least one trial is required");
  std::vector<double> costs(static_cast<std::size_t>(trials));
  ParallelFor(costs.size(), [&](std::size_t i) {
    Rng init_rng(DeriveSeed(seed, {i, 0}));
    const InitialCondition init = SampleInitialState(task, init_rng);
    costs[i] = EpisodeCost(runner(env, task, init, DeriveSeed(seed, {i, 1})), task, env);
  });
  return costs;
}

Metrics ComputeMetrics(std::span<const double> costs) {
  if (costs.empty()) throw Error("metrics: no trials");
  Metrics m;
  m.trials = static_cast<int>(costs.size());
  double sum = 0.0;
  for (double c : costs) {
    if (IsSuccess(c)) {
      ++m.successes;
      sum += c;
    }
  }
  m.success_percent = 100.0 * m.successes / m.trials;
  if (m.successes > 0) {
    const double mean = sum / m.successes;
    double var = 0.0;
    for (double c : costs) {
      if (IsSuccess(c)) var += (c - mean) * (c - mean);
    }
    m.mean_cost = mean;
    m.std_cost = std::sqrt(var / m.successes);
  }
  return m;
}

}  // namespace mpcnet
