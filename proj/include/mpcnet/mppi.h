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

#ifndef MPCNET_MPPI_H_
#define MPCNET_MPPI_H_

#include <functional>
#include <span>
#include <vector>

#include "mpcnet/environment.h"
#include "mpcnet/types.h"

namespace mpcnet {

// Sampling MPC settings.
//
// Noise convention: the batch stores eps = sigma_sample * sqrt(dt) * z with
// z ~ N(0, I), i.e. a Brownian increment in control units. The control
// injected into rollout k at step t is u_t + eps_{t,k} / sqrt(dt), which is
// exactly the quantity the update rule averages. With sigma_sample equal to
// 1/sqrt(dt) the stored eps are standard normal.
struct MppiConfig {
  int num_samples = 100;  // K
  int horizon = 20;       // H
  double lambda = 1.0;    // temperature
  double nu = 1.5;        // exploration scale, >= 1
  double dt = 0.05;
  std::vector<double> sigma_sample;  // per control channel
  std::vector<double> control_cost;  // diagonal of R
  int iterations = 1;                // update passes per plan

  void Validate(std::size_t control_dim) const;
};

// Expert running cost q(x, step); `step` counts control periods from the
// start of the episode.
using RunningCost = std::function<double(std::span<const double> x, int step)>;

struct CostWeights {
  // Cartpole: position, angle-from-upright, cart velocity, angular velocity.
  // Quadcopter: position error, velocity error, attitude, body rate.
  std::vector<double> values;
};

CostWeights DefaultCostWeights(TaskKind kind);
MppiConfig DefaultMppiConfig(TaskKind kind, const Environment& env);

// Builds q for the task; `phase` is the episode's starting target waypoint.
RunningCost MakeRunningCost(const Task& task, const CostWeights& weights,
                            int phase);

struct TrajectoryBatch {
  std::size_t num_samples = 0;
  std::size_t horizon = 0;
  std::size_t state_dim = 0;
  std::size_t control_dim = 0;
  std::vector<double> noise;   // [K x H x m]
  std::vector<double> states;  // [K x (H+1) x n]; NaN past a divergence
  std::vector<double> costs;   // [K]; +inf for diverged rollouts

  std::span<const double> noise_row(std::size_t k, std::size_t t) const {
    return {noise.data() + (k * horizon + t) * control_dim, control_dim};
  }
  std::span<const double> state(std::size_t k, std::size_t t) const {
    return {states.data() + (k * (horizon + 1) + t) * state_dim, state_dim};
  }
};

// Rolls K perturbed copies of u through the noise-free dynamics from x and
// scores them with the control-cost adjusted running cost, dt-weighted.
// Rollout k draws from its own stream seeded by one draw of `rng` and k.
TrajectoryBatch SampleRollouts(const Environment& env, const StateVec& x,
                               const ControlSeq& u, const MppiConfig& cfg,
                               const RunningCost& q, int start_step, Rng& rng);

struct MppiUpdateResult {
  ControlSeq controls;
  std::vector<double> weights;  // per sample; zero for diverged rollouts
  bool all_diverged = false;    // controls == input u when set
};

MppiUpdateResult MppiUpdate(const ControlSeq& u, const TrajectoryBatch& batch,
                            const MppiConfig& cfg, const Environment& env);

// One or more sample+update passes starting from `warm`.
ControlSeq ExpertPlan(const Environment& env, const StateVec& x,
                      const ControlSeq& warm, const MppiConfig& cfg,
                      const RunningCost& q, int step, Rng& rng);

// [u_2 .. u_H, u_H].
ControlSeq ShiftWarmStart(const ControlSeq& u);

// Closed-loop expert episode with the environment's disturbance noise.
struct EpisodeTrace {
  std::vector<StateVec> states;  // x_1 .. x_T (truncated on divergence)
  std::vector<ControlVec> controls;
  bool diverged = false;
};

EpisodeTrace RunExpertEpisode(const Environment& env, const Task& task,
                              const InitialCondition& init, const MppiConfig& cfg,
                              const CostWeights& weights, std::uint64_t seed);

}  // namespace mpcnet

#endif  // MPCNET_MPPI_H_
