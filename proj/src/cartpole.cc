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

#include "mpcnet/environment.h"

namespace mpcnet {

Cartpole::Cartpole(CartpoleParams params, double dt, int substeps)
    : Environment(dt, substeps), params_(params) {
  Validate();
  UpdateLimits();
}

std::unique_ptr<Environment> Cartpole::Clone() const {
  return std::make_unique<Cartpole>(*this);
}

void Cartpole::Validate() const {
  const auto& p = params_;
  if (!(p.cart_mass > 0 && p.pole_mass > 0 && p.pole_length > 0 &&
        p.gravity > 0 && p.force_limit > 0)) {
    throw ConfigError("cartpole: masses, length, gravity and force limit must be positive");
  }
  if (!(p.friction >= 0 && p.noise_sigma >= 0)) {
    throw ConfigError("cartpole: friction and noise_sigma must be non-negative");
  }
}

void Cartpole::UpdateLimits() {
  lower_[0] = -params_.force_limit;
  upper_[0] = params_.force_limit;
}

// Lagrangian cart-pole with the pole mass at distance l from the pivot:
//   (M + m) xdd + m l cos(th) thdd - m l thd^2 sin(th) = u - b xd
//   l thdd + cos(th) xdd + g sin(th) = 0
void Cartpole::Derivatives(std::span<const double> x, std::span<const double> u,
                           std::span<double> dxdt) const {
  const auto& p = params_;
  const double xd = x[1], th = x[2], thd = x[3];
  const double s = std::sin(th), c = std::cos(th);
  const double force = u[0] - p.friction * xd;
  const double denom = p.cart_mass + p.pole_mass * s * s;
  const double xdd =
      (force + p.pole_mass * s * (p.pole_length * thd * thd + p.gravity * c)) / denom;
  const double thdd =
      (-force * c - p.pole_mass * p.pole_length * thd * thd * c * s -
       (p.cart_mass + p.pole_mass) * p.gravity * s) /
      (p.pole_length * denom);
  dxdt[0] = xd;
  dxdt[1] = xdd;
  dxdt[2] = thd;
  dxdt[3] = thdd;
}

double Cartpole::Energy(std::span<const double> x) const {
  const auto& p = params_;
  const double xd = x[1], th = x[2], thd = x[3];
  const double kinetic = 0.5 * (p.cart_mass + p.pole_mass) * xd * xd +
                         p.pole_mass * p.pole_length * xd * thd * std::cos(th) +
                         0.5 * p.pole_mass * p.pole_length * p.pole_length * thd * thd;
  const double potential = -p.pole_mass * p.gravity * p.pole_length * std::cos(th);
  return kinetic + potential;
}

std::vector<double> Cartpole::Observe(std::span<const double> x, int) const {
  return {x[0] / 5.0, x[1] / 5.0, std::sin(x[2]), std::cos(x[2]), x[3] / 10.0};
}

std::vector<std::string> Cartpole::ParamNames() const {
  return {"cart_mass", "pole_mass", "pole_length", "friction",
          "gravity",   "noise_sigma", "force_limit"};
}

double Cartpole::GetParam(std::string_view name) const {
  const auto& p = params_;
  if (name == "cart_mass") return p.cart_mass;
  if (name == "pole_mass") return p.pole_mass;
  if (name == "pole_length") return p.pole_length;
  if (name == "friction") return p.friction;
  if (name == "gravity") return p.gravity;
  if (name == "noise_sigma") return p.noise_sigma;
  if (name == "force_limit") return p.force_limit;
  throw ConfigError("cartpole: unknown parameter '" + std::string(name) + "'");
}

void Cartpole::SetParam(std::string_view name, double value) {
  CartpoleParams p = params_;
  if (name == "cart_mass") p.cart_mass = value;
  else if (name == "pole_mass") p.pole_mass = value;
  else if (name == "pole_length") p.pole_length = value;
  else if (name == "friction") p.friction = value;
  else if (name == "gravity") p.gravity = value;
  else if (name == "noise_sigma") p.noise_sigma = value;
  else if (name == "force_limit") p.force_limit = value;
  else throw ConfigError("cartpole: unknown parameter '" + std::string(name) + "'");
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
