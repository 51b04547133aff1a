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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mpcnet {

double WrapAngle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - std::numbers::pi;
}

void Environment::set_substeps(int n) {
  if (n < 1) throw ConfigError("substeps must be >= 1");
  substeps_ = n;
}

void Environment::CheckControl(std::span<const double> u) const {
  if (u.size() != control_dim()) {
    throw ShapeError(name() + ": control has " + std::to_string(u.size()) +
                     " entries, expected " + std::to_string(control_dim()));
  }
}

std::vector<double> Environment::Drift(std::span<const double> x,
                                       std::span<const double> u) const {
  if (x.size() != state_dim()) {
    throw ShapeError(name() + ": state has " + std::to_string(x.size()) +
                     " entries, expected " + std::to_string(state_dim()));
  }
  CheckControl(u);
  if (!AllFinite(x) || !AllFinite(u)) {
    throw NumericError(name() + ": non-finite state or control passed to derivatives");
  }
  std::vector<double> d(x.size());
  Derivatives(x, u, d);
  return d;
}

void Environment::ClampControl(std::span<double> u) const {
  auto lo = control_lower();
  auto hi = control_upper();
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = std::clamp(u[j], lo[j], hi[j]);
}

ControlSeq Environment::ClampSequence(ControlSeq u) const {
  for (std::size_t t = 0; t < u.horizon(); ++t) ClampControl(u.row(t));
  return u;
}

bool Environment::Integrate(std::span<double> x, std::span<const double> u) const {
  const std::size_t n = state_dim();
  const std::size_t m = control_dim();
  // Fixed-size scratch; the largest state here has 12 entries.
  double uc[8], k1[16], k2[16], k3[16], k4[16], tmp[16];
  for (std::size_t j = 0; j < m; ++j) uc[j] = u[j];
  ClampControl({uc, m});
  const std::span<const double> uspan(uc, m);
  const double h = dt_ / substeps_;
  for (int s = 0; s < substeps_; ++s) {
    Derivatives(x, uspan, {k1, n});
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    Derivatives({tmp, n}, uspan, {k2, n});
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    Derivatives({tmp, n}, uspan, {k3, n});
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    Derivatives({tmp, n}, uspan, {k4, n});
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
  return AllFinite(x);
}

std::optional<StateVec> Environment::Step(const StateVec& x, const ControlVec& u,
                                          Rng& rng) const {
  if (x.size() != state_dim()) {
    throw ShapeError(name() + ": state has " + std::to_string(x.size()) +
                     " entries, expected " + std::to_string(state_dim()));
  }
  CheckControl(u);
  if (!AllFinite(x) || !AllFinite(u)) {
    throw NumericError(name() + ": non-finite state or control passed to step");
  }
  ControlVec noisy = u;
  const double sigma = noise_sigma();
  if (sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = sigma * std::sqrt(dt_);
    for (double& v : noisy) v += scale * normal(rng);
  }
  StateVec next = x;
  if (!Integrate(next, noisy)) return std::nullopt;
  return next;
}

}  // namespace mpcnet
