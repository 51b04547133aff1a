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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mpcnet/environment.h"

namespace mpcnet {
namespace {

constexpr double kAltitude = 1.0;

}  // namespace

TaskKind ParseTaskKind(std::string_view s) {
  if (s == "cartpole") return TaskKind::kCartpole;
  if (s == "quad-circle") return TaskKind::kQuadCircle;
  if (s == "quad-fig8") return TaskKind::kQuadFigure8;
  throw ConfigError("unknown task '" + std::string(s) +
                    "' (expected cartpole, quad-circle or quad-fig8)");
}

std::string TaskKindName(TaskKind kind) {
  switch (kind) {
    case TaskKind::kCartpole: return "cartpole";
    case TaskKind::kQuadCircle: return "quad-circle";
    case TaskKind::kQuadFigure8: return "quad-fig8";
  }
  return "?";
}

bool IsQuadTask(TaskKind kind) { return kind != TaskKind::kCartpole; }

TargetTrajectory MakeTargetTrajectory(CurveKind kind, double period, double dt) {
  if (!(period > 0 && dt > 0)) throw ConfigError("target: period and dt must be positive");
  const auto count = static_cast<std::size_t>(std::llround(period / dt));
  if (count < 2) throw ConfigError("target: period shorter than two steps");
  TargetTrajectory out;
  out.kind = kind;
  out.period = period;
  out.dt = dt;
  out.positions.resize(count);
  out.velocities.resize(count);
  const double omega = 2.0 * std::numbers::pi / period;
  // Endpoints both sit at phase 0 and 2 pi so the curve closes exactly.
  for (std::size_t i = 0; i < count; ++i) {
    const double s = period * static_cast<double>(i) / static_cast<double>(count - 1);
    const double a = omega * s;
    if (kind == CurveKind::kCircle) {
      out.positions[i] = {std::cos(a), std::sin(a), kAltitude};
      out.velocities[i] = {-omega * std::sin(a), omega * std::cos(a), 0.0};
    } else {
      // Gerono lemniscate: x = cos a, y = sin a cos a.
      out.positions[i] = {std::cos(a), std::sin(a) * std::cos(a), kAltitude};
      out.velocities[i] = {-omega * std::sin(a), omega * std::cos(2.0 * a), 0.0};
    }
  }
  return out;
}

Task MakeTask(TaskKind kind, int episode_steps) {
  if (episode_steps < 1) throw ConfigError("episode_steps must be >= 1");
  Task task;
  task.kind = kind;
  task.episode_steps = episode_steps;
  if (kind == TaskKind::kQuadCircle) {
    task.target = MakeTargetTrajectory(CurveKind::kCircle);
  } else if (kind == TaskKind::kQuadFigure8) {
    task.target = MakeTargetTrajectory(CurveKind::kFigure8);
  }
  return task;
}

std::unique_ptr<Environment> MakeEnvironment(TaskKind kind) {
  if (kind == TaskKind::kCartpole) return std::make_unique<Cartpole>();
  return std::make_unique<Quadcopter>();
}

InitialCondition SampleInitialState(const Task& task, Rng& rng) {
  InitialCondition ic;
  if (task.kind == TaskKind::kCartpole) {
    std::uniform_real_distribution<double> pos(-5.0, 5.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double x = pos(rng);
    const double th = angle(rng);
    ic.state = {x, 0.0, th, 0.0};
    return ic;
  }
  if (task.target.size() == 0) throw ConfigError("quadcopter task without target");
  // The last waypoint duplicates the first.
  std::uniform_int_distribution<std::size_t> pick(0, task.target.size() - 2);
  const std::size_t j = pick(rng);
  ic.phase = static_cast<int>(j);
  ic.state.assign(12, 0.0);
  for (int i = 0; i < 3; ++i) {
    ic.state[i] = task.target.positions[j][i];
    ic.state[3 + i] = task.target.velocities[j][i];
  }
  if (task.initial_offset > 0.0) {
    std::uniform_real_distribution<double> off(-task.initial_offset, task.initial_offset);
    for (int i = 0; i < 3; ++i) ic.state[i] += off(rng);
  }
  return ic;
}

std::unique_ptr<Environment> EpisodeEnvironment(const Environment& env,
                                                const Task& task, int phase) {
  auto copy = env.Clone();
  if (IsQuadTask(task.kind)) {
    auto* quad = dynamic_cast<Quadcopter*>(copy.get());
    if (quad == nullptr) throw ConfigError("quadcopter task needs a quadcopter environment");
    // Waypoints run 0..N-2 in a loop (N-1 duplicates 0).
    const std::size_t n = task.target.size() - 1;
    std::vector<std::array<double, 6>> ref(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = 0; k < 3; ++k) {
        ref[i][k] = task.target.positions[i][k];
        ref[i][3 + k] = task.target.velocities[i][k];
      }
    }
    quad->set_reference(std::move(ref), phase);
  }
  return copy;
}

double TaskCost(const std::vector<StateVec>& trajectory, const Task& task,
                const Environment& env) {
  if (trajectory.empty()) throw Error("task_cost: empty trajectory");
  double total = 0.0;
  if (task.kind == TaskKind::kCartpole) {
    const double l = env.GetParam("pole_length");
    for (std::size_t t = trajectory.size() / 2; t < trajectory.size(); ++t) {
      const auto& x = trajectory[t];
      const double d = std::abs(x[0]) + l * std::abs(WrapAngle(x[2] - std::numbers::pi));
      total += d * d;
    }
    return total;
  }
  const auto& pts = task.target.positions;
  for (const auto& x : trajectory) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
      const double dx = x[0] - p[0], dy = x[1] - p[1], dz = x[2] - p[2];
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    total += std::sqrt(best);
  }
  return total;
}

}  // namespace mpcnet
