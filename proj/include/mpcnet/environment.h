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

#ifndef MPCNET_ENVIRONMENT_H_
#define MPCNET_ENVIRONMENT_H_

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpcnet/types.h"

namespace mpcnet {

// Ground-truth simulator. Environments are values: Step maps a state to a
// new state and keeps no hidden mutable state, so many rollouts may share
// one instance.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::unique_ptr<Environment> Clone() const = 0;
  virtual std::string name() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t control_dim() const = 0;
  virtual std::size_t observation_dim() const = 0;

  // Deterministic drift f(x) + G(x) u, no saturation applied to u.
  virtual void Derivatives(std::span<const double> x, std::span<const double> u,
                           std::span<double> dxdt) const = 0;

  // Checked drift: throws NumericError on non-finite x or u.
  std::vector<double> Drift(std::span<const double> x, std::span<const double> u) const;

  // Policy input features for state x at episode step `step`.
  virtual std::vector<double> Observe(std::span<const double> x,
                                      int step) const = 0;

  virtual std::span<const double> control_lower() const = 0;
  virtual std::span<const double> control_upper() const = 0;

  // Named physical parameters for perturbation sweeps.
  virtual std::vector<std::string> ParamNames() const = 0;
  virtual double GetParam(std::string_view name) const = 0;
  virtual void SetParam(std::string_view name, double value) = 0;

  double dt() const { return dt_; }
  int substeps() const { return substeps_; }
  void set_substeps(int n);
  double noise_sigma() const { return GetParam("noise_sigma"); }

  void ClampControl(std::span<double> u) const;
  ControlSeq ClampSequence(ControlSeq u) const;

  // Saturates u and integrates the drift over dt with `substeps` RK4 steps.
  // Returns false (state contents unspecified) if the result is non-finite.
  bool Integrate(std::span<double> x, std::span<const double> u) const;

  // One noisy control period: u + sigma * eps * sqrt(dt), eps ~ N(0, I)
  // drawn once per call. nullopt signals a diverged trajectory.
  std::optional<StateVec> Step(const StateVec& x, const ControlVec& u,
                               Rng& rng) const;

  void CheckControl(std::span<const double> u) const;

 protected:
  Environment(double dt, int substeps) : dt_(dt), substeps_(substeps) {}

 private:
  double dt_;
  int substeps_;
};

struct CartpoleParams {
  double cart_mass = 1.0;    // M [kg]
  double pole_mass = 0.1;    // m_p [kg]
  double pole_length = 0.5;  // l [m]
  double friction = 0.1;     // b, viscous rail friction [N s/m]
  double gravity = 9.81;
  double noise_sigma = 1.0;
  double force_limit = 10.0;  // |u| <= force_limit [N]
};

// Cart on a rail with a point-mass pole; theta = 0 hangs down.
// State (x, xdot, theta, thetadot); control is the horizontal force.
class Cartpole final : public Environment {
 public:
  static constexpr double kDefaultDt = 0.05;
  static constexpr int kDefaultSubsteps = 5;

  explicit Cartpole(CartpoleParams params = {}, double dt = kDefaultDt,
                    int substeps = kDefaultSubsteps);

  std::unique_ptr<Environment> Clone() const override;
  std::string name() const override { return "cartpole"; }
  std::size_t state_dim() const override { return 4; }
  std::size_t control_dim() const override { return 1; }
  std::size_t observation_dim() const override { return 5; }
  void Derivatives(std::span<const double> x, std::span<const double> u,
                   std::span<double> dxdt) const override;
  std::vector<double> Observe(std::span<const double> x, int step) const override;
  std::span<const double> control_lower() const override { return lower_; }
  std::span<const double> control_upper() const override { return upper_; }
  std::vector<std::string> ParamNames() const override;
  double GetParam(std::string_view name) const override;
  void SetParam(std::string_view name, double value) override;

  const CartpoleParams& params() const { return params_; }
  // Kinetic plus potential energy (potential zero at the pivot height).
  double Energy(std::span<const double> x) const;

 private:
  void Validate() const;
  void UpdateLimits();

  CartpoleParams params_;
  std::array<double, 1> lower_{};
  std::array<double, 1> upper_{};
};

struct QuadcopterParams {
  double mass = 0.7;        // [kg]
  double arm_length = 0.35;  // rotor distance from the center [m]
  std::array<double, 3> inertia = {0.01, 0.01, 0.018};  // diagonal J [kg m^2]
  double gravity = 9.81;
  double thrust_gain = 1.0;    // net force per commanded rotor thrust
  double torque_coeff = 0.016;  // yaw torque per unit rotor thrust [m]
  double max_thrust = 5.0;      // per-rotor upper limit [N]
  double noise_sigma = 0.1;
};

// 12-state rigid body: position, velocity (world), roll/pitch/yaw,
// body rates. Four rotor thrusts in a plus configuration.
class Quadcopter final : public Environment {
 public:
  static constexpr double kDefaultDt = 0.02;
  static constexpr int kDefaultSubsteps = 2;

  explicit Quadcopter(QuadcopterParams params = {}, double dt = kDefaultDt,
                      int substeps = kDefaultSubsteps);

  std::unique_ptr<Environment> Clone() const override;
  std::string name() const override { return "quadcopter"; }
  std::size_t state_dim() const override { return 12; }
  std::size_t control_dim() const override { return 4; }
  std::size_t observation_dim() const override { return 12; }
  void Derivatives(std::span<const double> x, std::span<const double> u,
                   std::span<double> dxdt) const override;
  // Tracking features need the target; see TrackingObserver.
  std::vector<double> Observe(std::span<const double> x, int step) const override;
  std::span<const double> control_lower() const override { return lower_; }
  std::span<const double> control_upper() const override { return upper_; }
  std::vector<std::string> ParamNames() const override;
  double GetParam(std::string_view name) const override;
  void SetParam(std::string_view name, double value) override;

  const QuadcopterParams& params() const { return params_; }
  double hover_thrust() const;

  // Reference the observation is expressed against: position and velocity
  // per step. Unset means the raw state is observed.
  void set_reference(std::vector<std::array<double, 6>> reference, int phase);

 private:
  void Validate() const;
  void UpdateLimits();

  QuadcopterParams params_;
  std::array<double, 4> lower_{};
  std::array<double, 4> upper_{};
  std::shared_ptr<const std::vector<std::array<double, 6>>> reference_;
  int phase_ = 0;
};

// Wraps an angle into (-pi, pi].
double WrapAngle(double a);

// ---- tasks ----

enum class TaskKind { kCartpole, kQuadCircle, kQuadFigure8 };

TaskKind ParseTaskKind(std::string_view s);
std::string TaskKindName(TaskKind kind);
bool IsQuadTask(TaskKind kind);

enum class CurveKind { kCircle, kFigure8 };

// Closed reference curve at fixed altitude.
struct TargetTrajectory {
  CurveKind kind = CurveKind::kCircle;
  double period = 15.0;
  double dt = Quadcopter::kDefaultDt;
  std::vector<std::array<double, 3>> positions;
  std::vector<std::array<double, 3>> velocities;

  std::size_t size() const { return positions.size(); }
};

// Circle: radius 1 m. Figure-of-8: lemniscate of Gerono spanning 2 m.
// Both at 1 m altitude; waypoint count round(period / dt).
TargetTrajectory MakeTargetTrajectory(CurveKind kind, double period = 15.0,
                                      double dt = Quadcopter::kDefaultDt);

struct Task {
  TaskKind kind = TaskKind::kCartpole;
  int episode_steps = 100;
  // Quadcopter only.
  TargetTrajectory target;
  double initial_offset = 0.0;  // per-axis U[-a, a] position perturbation
};

Task MakeTask(TaskKind kind, int episode_steps);

// Fresh simulator with baseline parameters for the task.
std::unique_ptr<Environment> MakeEnvironment(TaskKind kind);

struct InitialCondition {
  StateVec state;
  int phase = 0;  // index of the starting target waypoint (quadcopter)
};

InitialCondition SampleInitialState(const Task& task, Rng& rng);

// Prepares a per-episode environment copy whose observations are relative
// to the episode's target (identity for the cartpole).
std::unique_ptr<Environment> EpisodeEnvironment(const Environment& env,
                                                const Task& task, int phase);

// Total tracking / balancing error. `trajectory` holds the states reached
// after each control period (x_1 .. x_T). Cartpole: squared distance from
// the upright centered pose summed over the second half; quadcopter:
// distance to the nearest waypoint summed over the episode.
double TaskCost(const std::vector<StateVec>& trajectory, const Task& task,
                const Environment& env);

inline constexpr double kFailureCost = 100.0;
inline bool IsSuccess(double cost) { return cost <= kFailureCost; }

}  // namespace mpcnet

#endif  // MPCNET_ENVIRONMENT_H_
