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

#include "mpcnet/environment.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

namespace mpcnet {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> Deriv(const Environment& env, const StateVec& x, const ControlVec& u) {
  return env.Drift(x, u);
}

TEST(CartpoleTest, EquilibriaHaveZeroDerivative) {
  Cartpole env(CartpoleParams{.friction = 0.0});
  for (double d : Deriv(env, {0, 0, 0, 0}, {0})) EXPECT_EQ(d, 0.0);
  for (double d : Deriv(env, {0, 0, kPi, 0}, {0})) EXPECT_NEAR(d, 0.0, 1e-12);
}

TEST(CartpoleTest, ForcePushesCartAndFrictionOpposesMotion) {
  Cartpole env;
  EXPECT_GT(Deriv(env, {0, 0, 0, 0}, {1.0})[1], 0.0);
  EXPECT_LT(Deriv(env, {0, 1.0, 0, 0}, {0.0})[1], 0.0);
}

TEST(CartpoleTest, EnergyConservedWithoutFrictionOrForce) {
  CartpoleParams p;
  p.friction = 0.0;
  p.noise_sigma = 0.0;
  Cartpole env(p);
  Cartpole reference(p, Cartpole::kDefaultDt, 50);  // 1 ms internal step
  StateVec x = {0.3, -0.5, 2.0, 1.5};
  StateVec r = x;
  const double e0 = env.Energy(x);
  const std::vector<double> u = {0.0};
  for (int i = 0; i < 20; ++i) {
    ASSERT_TRUE(env.Integrate(x, u));
    ASSERT_TRUE(reference.Integrate(r, u));
  }
  EXPECT_LT(std::abs(env.Energy(x) - e0) / std::abs(e0), 1e-6);
  EXPECT_LT(std::abs(reference.Energy(r) - e0) / std::abs(e0), 1e-6);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(x[i], r[i], 1e-5);
}

TEST(CartpoleTest, Rk4IsFourthOrder) {
  CartpoleParams p;
  p.noise_sigma = 0.0;
  const StateVec x0 = {0.1, 0.4, 1.0, -2.0};
  const std::vector<double> u = {3.0};
  auto run = [&](int substeps) {
    Cartpole env(p, 0.2, substeps);
    StateVec x = x0;
    EXPECT_TRUE(env.Integrate(x, u));
    return x;
  };
  const StateVec exact = run(2000);
  auto err = [&](const StateVec& x) {
    double e = 0.0;
    for (int i = 0; i < 4; ++i) e = std::max(e, std::abs(x[i] - exact[i]));
    return e;
  };
  const double ratio = err(run(32)) / err(run(64));
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
}

TEST(CartpoleTest, StepIsDeterministicPerSeed) {
  Cartpole env;
  Rng a(42), b(42);
  auto xa = env.Step({0, 0, 1, 0}, {2.0}, a);
  auto xb = env.Step({0, 0, 1, 0}, {2.0}, b);
  ASSERT_TRUE(xa && xb);
  EXPECT_EQ(*xa, *xb);

  CartpoleParams quiet;
  quiet.noise_sigma = 0.0;
  Cartpole still(quiet);
  Rng c(1), d(2);
  EXPECT_EQ(*still.Step({0, 0, 1, 0}, {2.0}, c), *still.Step({0, 0, 1, 0}, {2.0}, d));
}

TEST(CartpoleTest, ControlsAreSaturated) {
  CartpoleParams quiet;
  quiet.noise_sigma = 0.0;
  Cartpole env(quiet);
  Rng rng(0);
  EXPECT_EQ(*env.Step({0, 0, 0, 0}, {1e6}, rng), *env.Step({0, 0, 0, 0}, {10.0}, rng));
}

TEST(CartpoleTest, NonFiniteInputIsAnError) {
  Cartpole env;
  Rng rng(0);
  EXPECT_THROW(env.Step({0, NAN, 0, 0}, {0.0}, rng), NumericError);
  EXPECT_THROW(env.Drift(std::vector<double>{0, 0, 0, 0}, std::vector<double>{INFINITY}),
               NumericError);
  EXPECT_THROW(env.Drift(std::vector<double>{0, 0, 0}, std::vector<double>{0.0}), ShapeError);
}

TEST(CartpoleTest, ParametersValidateAndRollBack) {
  Cartpole env;
  EXPECT_THROW(env.SetParam("pole_length", -1.0), ConfigError);
  EXPECT_DOUBLE_EQ(env.GetParam("pole_length"), 0.5);
  EXPECT_THROW(env.SetParam("noise_sigma", -0.1), ConfigError);
  EXPECT_THROW(env.GetParam("wingspan"), ConfigError);
  env.SetParam("pole_length", 0.7);
  EXPECT_DOUBLE_EQ(env.params().pole_length, 0.7);
}

TEST(QuadcopterTest, HoverBalancesGravity) {
  Quadcopter env;
  StateVec x(12, 0.0);
  x[2] = 1.0;
  const double h = env.hover_thrust();
  const auto d = Deriv(env, x, {h, h, h, h});
  for (int i = 3; i < 12; ++i) EXPECT_NEAR(d[i], 0.0, 1e-12) << i;
}

TEST(QuadcopterTest, HoverDriftBelowOneNanometrePerStep) {
  QuadcopterParams p;
  p.noise_sigma = 0.0;
  Quadcopter env(p);
  StateVec x(12, 0.0);
  x[0] = 0.5;
  x[2] = 1.0;
  const double h = env.hover_thrust();
  Rng rng(0);
  StateVec prev = x;
  for (int i = 0; i < 200; ++i) {
    x = *env.Step(x, {h, h, h, h}, rng);
    for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(x[k] - prev[k]), 1e-9);
    prev = x;
  }
}

TEST(QuadcopterTest, DifferentialThrustProducesTorque) {
  Quadcopter env;
  StateVec x(12, 0.0);
  const double h = env.hover_thrust();
  const auto roll = Deriv(env, x, {h, h + 0.1, h, h - 0.1});
  const auto pitch = Deriv(env, x, {h - 0.1, h, h + 0.1, h});
  EXPECT_NE(roll[9], 0.0);
  EXPECT_NE(pitch[10], 0.0);
  const auto yaw = Deriv(env, x, {h + 0.1, h - 0.1, h + 0.1, h - 0.1});
  EXPECT_NE(yaw[11], 0.0);
  EXPECT_NEAR(yaw[9], 0.0, 1e-12);
}

TEST(QuadcopterTest, ArmLengthScalesTorque) {
  Quadcopter a;
  Quadcopter b;
  b.SetParam("arm_length", a.GetParam("arm_length") / 2);
  StateVec x(12, 0.0);
  const double h = a.hover_thrust();
  const ControlVec u = {h, h + 0.1, h, h - 0.1};
  EXPECT_NEAR(Deriv(b, x, u)[9], Deriv(a, x, u)[9] / 2, 1e-12);
}

TEST(TargetTest, WaypointCountAndClosure) {
  for (CurveKind k : {CurveKind::kCircle, CurveKind::kFigure8}) {
    const auto t = MakeTargetTrajectory(k);
    EXPECT_EQ(t.size(), 750u);
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(t.positions.front()[i], t.positions.back()[i], 1e-9);
    }
    for (const auto& p : t.positions) EXPECT_DOUBLE_EQ(p[2], 1.0);
  }
  const auto circle = MakeTargetTrajectory(CurveKind::kCircle);
  for (const auto& p : circle.positions) EXPECT_NEAR(std::hypot(p[0], p[1]), 1.0, 1e-12);
}

TEST(TaskTest, CostIsZeroOnTargetBehavior) {
  Task cart = MakeTask(TaskKind::kCartpole, 100);
  Cartpole env;
  std::vector<StateVec> upright(100, StateVec{0, 0, kPi, 0});
  EXPECT_DOUBLE_EQ(TaskCost(upright, cart, env), 0.0);
  EXPECT_THROW(TaskCost({}, cart, env), Error);

  Task quad = MakeTask(TaskKind::kQuadFigure8, 50);
  Quadcopter q;
  std::vector<StateVec> on_curve;
  for (int i = 0; i < 50; ++i) {
    StateVec x(12, 0.0);
    for (int k = 0; k < 3; ++k) x[k] = quad.target.positions[static_cast<std::size_t>(i * 7)][k];
    on_curve.push_back(x);
  }
  EXPECT_DOUBLE_EQ(TaskCost(on_curve, quad, q), 0.0);
}

TEST(TaskTest, CartpoleCostCountsSecondHalfOnly) {
  Task task = MakeTask(TaskKind::kCartpole, 4);
  Cartpole env;
  std::vector<StateVec> traj = {{9, 0, 0, 0}, {9, 0, 0, 0}, {1, 0, kPi, 0}, {0, 0, kPi + 0.5, 0}};
  EXPECT_NEAR(TaskCost(traj, task, env), 1.0 + 0.25 * 0.25, 1e-12);
  EXPECT_FALSE(IsSuccess(100.5));
  EXPECT_TRUE(IsSuccess(100.0));
}

TEST(TaskTest, HangingPoleFailsEvenWhenCentered) {
  Task task = MakeTask(TaskKind::kCartpole, 100);
  Cartpole env;
  EXPECT_FALSE(IsSuccess(TaskCost(std::vector<StateVec>(100, StateVec{0, 0, 0, 0}), task, env)));
  EXPECT_TRUE(IsSuccess(TaskCost(std::vector<StateVec>(100, StateVec{0.5, 0, kPi, 0}), task, env)));
}

TEST(TaskTest, CostIsNonNegative) {
  Task task = MakeTask(TaskKind::kCartpole, 10);
  Cartpole env;
  Rng rng(3);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<StateVec> traj;
    for (int t = 0; t < 10; ++t) traj.push_back({n(rng), n(rng), n(rng), n(rng)});
    EXPECT_GE(TaskCost(traj, task, env), 0.0);
  }
}

TEST(InitialStateTest, CartpoleDrawStatistics) {
  Task task = MakeTask(TaskKind::kCartpole, 100);
  Rng rng(17);
  const int n = 10000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto ic = SampleInitialState(task, rng);
    ASSERT_GE(ic.state[0], -5.0);
    ASSERT_LE(ic.state[0], 5.0);
    ASSERT_GE(ic.state[2], 0.0);
    ASSERT_LE(ic.state[2], 2 * kPi);
    ASSERT_EQ(ic.state[1], 0.0);
    ASSERT_EQ(ic.state[3], 0.0);
    sum += ic.state[0];
  }
  const double stderr_mean = (10.0 / std::sqrt(12.0)) / std::sqrt(n);
  EXPECT_LT(std::abs(sum / n), 3 * stderr_mean);

  Rng a(5), b(5);
  EXPECT_EQ(SampleInitialState(task, a).state, SampleInitialState(task, b).state);
}

TEST(InitialStateTest, QuadStartsOnTheCurve) {
  Task task = MakeTask(TaskKind::kQuadCircle, 150);
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto ic = SampleInitialState(task, rng);
    const auto& p = task.target.positions[static_cast<std::size_t>(ic.phase)];
    const auto& v = task.target.velocities[static_cast<std::size_t>(ic.phase)];
    for (int k = 0; k < 3; ++k) {
      EXPECT_EQ(ic.state[k], p[k]);
      EXPECT_EQ(ic.state[3 + k], v[k]);
    }
  }
  task.initial_offset = 0.5;
  const auto ic = SampleInitialState(task, rng);
  const auto& p = task.target.positions[static_cast<std::size_t>(ic.phase)];
  for (int k = 0; k < 3; ++k) EXPECT_LE(std::abs(ic.state[k] - p[k]), 0.5);
}

TEST(ObservationTest, QuadObservesTrackingError) {
  Task task = MakeTask(TaskKind::kQuadCircle, 150);
  Quadcopter env;
  auto ep = EpisodeEnvironment(env, task, 10);
  StateVec x(12, 0.0);
  for (int k = 0; k < 3; ++k) {
    x[k] = task.target.positions[13][k];
    x[3 + k] = task.target.velocities[13][k];
  }
  const auto obs = ep->Observe(x, 3);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(obs[k], 0.0, 1e-12);
}

TEST(WrapAngleTest, Range) {
  EXPECT_NEAR(WrapAngle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(WrapAngle(-kPi), kPi, 1e-12);
  EXPECT_NEAR(WrapAngle(0.5 - 4 * kPi), 0.5, 1e-12);
}

}  // namespace
}  // namespace mpcnet
