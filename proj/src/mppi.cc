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

#include "mpcnet/mppi.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mpcnet/autodiff.h"
#include "mpcnet/update_rule.h"

namespace mpcnet {

void MppiConfig::Validate(std::size_t control_dim) const {
  if (num_samples < 1) throw ConfigError("mppi: K must be >= 1");
  if (horizon < 1) throw ConfigError("mppi: H must be >= 1");
  if (!(lambda > 0.0)) throw ConfigError("mppi: lambda must be > 0");
  if (!(nu >= 1.0)) throw ConfigError("mppi: nu must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("mppi: dt must be > 0");
  if (iterations < 1) throw ConfigError("mppi: iterations must be >= 1");
  if (sigma_sample.size() != control_dim || control_cost.size() != control_dim) {
    throw ConfigError("mppi: sigma_sample and control_cost need " +
                      std::to_string(control_dim) + " entries");
  }
  for (std::size_t j = 0; j < control_dim; ++j) {
    if (!(sigma_sample[j] >= 0.0)) throw ConfigError("mppi: sigma_sample must be >= 0");
    if (!(control_cost[j] >= 0.0)) throw ConfigError("mppi: R entries must be >= 0");
  }
}

CostWeights DefaultCostWeights(TaskKind kind) {
  if (kind == TaskKind::kCartpole) return {{30.0, 10.0, 10.0, 0.5}};
  return {{20.0, 1.0, 1.0, 0.1}};
}

MppiConfig DefaultMppiConfig(TaskKind kind, const Environment& env) {
  MppiConfig cfg;
  cfg.dt = env.dt();
  const std::size_t m = env.control_dim();
  if (kind == TaskKind::kCartpole) {
    cfg.lambda = 1.0;
    cfg.sigma_sample.assign(m, 1.0 / std::sqrt(env.dt()));
    cfg.control_cost.assign(m, 0.01);
  } else {
    const auto& quad = dynamic_cast<const Quadcopter&>(env);
    cfg.lambda = 0.1;
    cfg.sigma_sample.assign(m, 0.1 * quad.hover_thrust());
    cfg.control_cost.assign(m, 0.0);
  }
  return cfg;
}

RunningCost MakeRunningCost(const Task& task, const CostWeights& weights,
                            int phase) {
  if (weights.values.size() != 4) throw ConfigError("cost weights need 4 entries");
  const auto w = weights.values;
  if (task.kind == TaskKind::kCartpole) {
    return [w](std::span<const double> x, int) {
      const double err = WrapAngle(x[2] - std::numbers::pi);
      return w[0] * x[0] * x[0] + w[1] * err * err + w[2] * x[1] * x[1] +
             w[3] * x[3] * x[3];
    };
  }
  auto target = std::make_shared<const TargetTrajectory>(task.target);
  const std::size_t loop = target->size() - 1;
  return [w, target, loop, phase](std::span<const double> x, int step) {
    const std::size_t j = static_cast<std::size_t>(phase + step) % loop;
    const auto& p = target->positions[j];
    const auto& v = target->velocities[j];
    double ep = 0.0, ev = 0.0;
    for (int i = 0; i < 3; ++i) {
      ep += (x[i] - p[i]) * (x[i] - p[i]);
      ev += (x[3 + i] - v[i]) * (x[3 + i] - v[i]);
    }
    const double att = x[6] * x[6] + x[7] * x[7];
    const double rate = x[9] * x[9] + x[10] * x[10] + x[11] * x[11];
    return w[0] * ep + w[1] * ev + w[2] * att + w[3] * rate;
  };
}

TrajectoryBatch SampleRollouts(const Environment& env, const StateVec& x,
                               const ControlSeq& u, const MppiConfig& cfg,
                               const RunningCost& q, int start_step, Rng& rng) {
  const std::size_t n = env.state_dim();
  const std::size_t m = env.control_dim();
  cfg.Validate(m);
  const auto horizon = static_cast<std::size_t>(cfg.horizon);
  const auto samples = static_cast<std::size_t>(cfg.num_samples);
  if (x.size() != n || !AllFinite(x)) throw NumericError("sample_rollouts: bad state");
  if (u.horizon() != horizon || u.dim() != m) {
    throw ShapeError("sample_rollouts: control sequence is " +
                     std::to_string(u.horizon()) + "x" + std::to_string(u.dim()) +
                     ", expected " + std::to_string(horizon) + "x" + std::to_string(m));
  }

  TrajectoryBatch batch;
  batch.num_samples = samples;
  batch.horizon = horizon;
  batch.state_dim = n;
  batch.control_dim = m;
  batch.noise.resize(samples * horizon * m);
  batch.states.assign(samples * (horizon + 1) * n,
                      std::numeric_limits<double>::quiet_NaN());
  batch.costs.resize(samples);

  const double sqrt_dt = std::sqrt(cfg.dt);
  const double noise_quad = cfg.lambda * (1.0 - 1.0 / cfg.nu) / 2.0;
  const std::uint64_t base = rng();
  std::vector<double> perturbed(m);
  std::vector<double> state(n);

  for (std::size_t k = 0; k < samples; ++k) {
    Rng stream(DeriveSeed(base, {k}));
    std::normal_distribution<double> normal(0.0, 1.0);
    double* eps = batch.noise.data() + k * horizon * m;
    for (std::size_t i = 0; i < horizon * m; ++i) {
      eps[i] = cfg.sigma_sample[i % m] * sqrt_dt * normal(stream);
    }
    state = x;
    std::copy(state.begin(), state.end(), batch.states.begin() + k * (horizon + 1) * n);
    double total = 0.0;
    bool diverged = false;
    for (std::size_t t = 0; t < horizon && !diverged; ++t) {
      auto ut = u.row(t);
      const double* et = eps + t * m;
      double control = 0.0, cross = 0.0, quad = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        perturbed[j] = ut[j] + et[j] / sqrt_dt;
        control += 0.5 * cfg.control_cost[j] * ut[j] * ut[j];
        cross += cfg.lambda * ut[j] * et[j] / sqrt_dt;
        quad += noise_quad * et[j] * et[j] / cfg.dt;
      }
      if (!env.Integrate(state, perturbed)) {
        diverged = true;
        break;
      }
      std::copy(state.begin(), state.end(),
                batch.states.begin() + (k * (horizon + 1) + t + 1) * n);
      const double running = q(state, start_step + static_cast<int>(t) + 1);
      total += (running + control + cross + quad) * cfg.dt;
    }
    batch.costs[k] = diverged || !std::isfinite(total)
                         ? std::numeric_limits<double>::infinity()
                         : total;
  }
  return batch;
}

MppiUpdateResult MppiUpdate(const ControlSeq& u, const TrajectoryBatch& batch,
                            const MppiConfig& cfg, const Environment& env) {
  const std::size_t h = u.horizon(), m = u.dim();
  if (batch.horizon != h || batch.control_dim != m ||
      batch.costs.size() != batch.num_samples ||
      batch.noise.size() != batch.num_samples * h * m) {
    throw ShapeError("mppi_update: batch does not match the control sequence");
  }
  MppiUpdateResult result;
  result.weights.assign(batch.num_samples, 0.0);

  // Diverged rollouts carry exp(-inf) = 0 weight; drop them up front.
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < batch.num_samples; ++k) {
    if (std::isfinite(batch.costs[k])) keep.push_back(k);
  }
  if (keep.empty()) {
    result.controls = u;
    result.all_diverged = true;
    return result;
  }
  std::vector<double> noise;
  std::vector<double> costs;
  noise.reserve(keep.size() * h * m);
  for (std::size_t k : keep) {
    auto first = batch.noise.begin() + k * h * m;
    noise.insert(noise.end(), first, first + h * m);
    costs.push_back(batch.costs[k]);
  }
  const ad::Tensor cost_t = ad::Tensor::Vector(costs);
  const ad::Tensor out = PathIntegralUpdate(
      ad::Tensor::Matrix(h, m, u.values()),
      ad::Tensor({keep.size(), h, m}, std::move(noise)), cost_t, cfg.lambda, cfg.dt);
  const ad::Tensor w = PathIntegralWeights(cost_t, cfg.lambda);
  for (std::size_t i = 0; i < keep.size(); ++i) result.weights[keep[i]] = w[i];
  result.controls = env.ClampSequence(ControlSeq(h, m, out.ToVector()));
  return result;
}

ControlSeq ExpertPlan(const Environment& env, const StateVec& x,
                      const ControlSeq& warm, const MppiConfig& cfg,
                      const RunningCost& q, int step, Rng& rng) {
  ControlSeq u = warm;
  for (int i = 0; i < cfg.iterations; ++i) {
    TrajectoryBatch batch = SampleRollouts(env, x, u, cfg, q, step, rng);
    u = MppiUpdate(u, batch, cfg, env).controls;
  }
  return u;
}

ControlSeq ShiftWarmStart(const ControlSeq& u) {
  ControlSeq out = u;
  const std::size_t h = u.horizon();
  for (std::size_t t = 0; t + 1 < h; ++t) {
    for (std::size_t j = 0; j < u.dim(); ++j) out(t, j) = u(t + 1, j);
  }
  return out;
}

EpisodeTrace RunExpertEpisode(const Environment& env, const Task& task,
                              const InitialCondition& init, const MppiConfig& cfg,
                              const CostWeights& weights, std::uint64_t seed) {
  Rng plan_rng(DeriveSeed(seed, {1}));
  Rng env_rng(DeriveSeed(seed, {2}));
  const RunningCost q = MakeRunningCost(task, weights, init.phase);
  ControlSeq warm(cfg.horizon, env.control_dim(), 0.0);
  StateVec x = init.state;
  EpisodeTrace trace;
  for (int t = 0; t < task.episode_steps; ++t) {
    ControlSeq plan = ExpertPlan(env, x, warm, cfg, q, t, plan_rng);
    ControlVec u = plan.first();
    auto next = env.Step(x, u, env_rng);
    trace.controls.push_back(u);
    if (!next) {
      trace.diverged = true;
      break;
    }
    x = *next;
    trace.states.push_back(x);
    warm = ShiftWarmStart(plan);
  }
  return trace;
}

}  // namespace mpcnet
