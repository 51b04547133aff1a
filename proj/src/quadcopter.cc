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

#include <cmath>
#include <string>
#include <utility>

#include "mpcnet/environment.h"

namespace mpcnet {

Quadcopter::Quadcopter(QuadcopterParams params, double dt, int substeps)
    : Environment(dt, substeps), params_(params) {
  Validate();
  UpdateLimits();
}

std::unique_ptr<Environment> Quadcopter::Clone() const {
  return std::make_unique<Quadcopter>(*this);
}

void Quadcopter::Validate() const {
  const auto& p = params_;
  if (!(p.mass > 0 && p.arm_length > 0 && p.inertia[0] > 0 &&
        p.inertia[1] > 0 && p.inertia[2] > 0 && p.gravity > 0 &&
        p.thrust_gain > 0 && p.max_thrust > 0)) {
    throw ConfigError("quadcopter: mass, arm length, inertia, gravity, thrust "
                      "gain and max thrust must be positive");
  }
  if (!(p.torque_coeff >= 0 && p.noise_sigma >= 0)) {
    throw ConfigError("quadcopter: torque_coeff and noise_sigma must be non-negative");
  }
}

void Quadcopter::UpdateLimits() {
  lower_.fill(0.0);
  upper_.fill(params_.max_thrust);
}

double Quadcopter::hover_thrust() const {
  return params_.mass * params_.gravity / (4.0 * params_.thrust_gain);
}

// Rotors 1..4 sit on +x, +y, -x, -y; 1 and 3 spin opposite to 2 and 4.
void Quadcopter::Derivatives(std::span<const double> x, std::span<const double> u,
                             std::span<double> dxdt) const {
  const auto& p = params_;
  const double phi = x[6], theta = x[7], psi = x[8];
  const double wx = x[9], wy = x[10], wz = x[11];
  const double thrust = p.thrust_gain * (u[0] + u[1] + u[2] + u[3]);
  const double tau_x = p.thrust_gain * p.arm_length * (u[1] - u[3]);
  const double tau_y = p.thrust_gain * p.arm_length * (u[2] - u[0]);
  const double tau_z = p.thrust_gain * p.torque_coeff * (u[0] - u[1] + u[2] - u[3]);

  const double cphi = std::cos(phi), sphi = std::sin(phi);
  const double cth = std::cos(theta), sth = std::sin(theta);
  const double cpsi = std::cos(psi), spsi = std::sin(psi);
  const double a = thrust / p.mass;

  dxdt[0] = x[3];
  dxdt[1] = x[4];
  dxdt[2] = x[5];
  // Third column of Rz(psi) Ry(theta) Rx(phi).
  dxdt[3] = a * (cphi * sth * cpsi + sphi * spsi);
  dxdt[4] = a * (cphi * sth * spsi - sphi * cpsi);
  dxdt[5] = a * (cphi * cth) - p.gravity;

  const double tth = sth / cth;
  dxdt[6] = wx + (wy * sphi + wz * cphi) * tth;
  dxdt[7] = wy * cphi - wz * sphi;
  dxdt[8] = (wy * sphi + wz * cphi) / cth;

  const auto& J = p.inertia;
  dxdt[9] = (tau_x - (wy * J[2] * wz - wz * J[1] * wy)) / J[0];
  dxdt[10] = (tau_y - (wz * J[0] * wx - wx * J[2] * wz)) / J[1];
  dxdt[11] = (tau_z - (wx * J[1] * wy - wy * J[0] * wx)) / J[2];
}

void Quadcopter::set_reference(std::vector<std::array<double, 6>> reference,
                               int phase) {
  reference_ = std::make_shared<const std::vector<std::array<double, 6>>>(
      std::move(reference));
  phase_ = phase;
}

std::vector<double> Quadcopter::Observe(std::span<const double> x, int step) const {
  std::vector<double> obs(x.begin(), x.end());
  if (reference_ && !reference_->empty()) {
    const auto& ref = (*reference_)[static_cast<std::size_t>(phase_ + step) %
                                    reference_->size()];
    for (int i = 0; i < 6; ++i) obs[i] -= ref[i];
  }
  return obs;
}

std::vector<std::string> Quadcopter::ParamNames() const {
  return {"mass",      "arm_length",   "inertia_x",   "inertia_y",
          "inertia_z", "gravity",      "thrust_gain", "torque_coeff",
          "max_thrust", "noise_sigma"};
}

double Quadcopter::GetParam(std::string_view name) const {
  const auto& p = params_;
  if (name == "mass") return p.mass;
  if (name == "arm_length") return p.arm_length;
  if (name == "inertia_x") return p.inertia[0];
  if (name == "inertia_y") return p.inertia[1];
  if (name == "inertia_z") return p.inertia[2];
  if (name == "gravity") return p.gravity;
  if (name == "thrust_gain") return p.thrust_gain;
  if (name == "torque_coeff") return p.torque_coeff;
  if (name == "max_thrust") return p.max_thrust;
  if (name == "noise_sigma") return p.noise_sigma;
  throw ConfigError("quadcopter: unknown parameter '" + std::string(name) + "'");
}

void Quadcopter::SetParam(std::string_view name, double value) {
  QuadcopterParams p = params_;
  if (name == "mass") p.mass = value;
  else if (name == "arm_length") p.arm_length = value;
  else if (name == "inertia_x") p.inertia[0] = value;
  else if (name == "inertia_y") p.inertia[1] = value;
  else if (name == "inertia_z") p.inertia[2] = value;
  else if (name == "gravity") p.gravity = value;
  else if (name == "thrust_gain") p.thrust_gain = value;
  else if (name == "torque_coeff") p.torque_coeff = value;
  else if (name == "max_thrust") p.max_thrust = value;
  else if (name == "noise_sigma") p.noise_sigma = value;
  else throw ConfigError("quadcopter: unknown parameter '" + std::string(name) + "'");
  std::swap(p, params_);
  try {
    Validate();
  } catch (...) {
    params_ = p;
    throw;
  }
  UpdateLimits();
}

}  // namespace mpcnet
