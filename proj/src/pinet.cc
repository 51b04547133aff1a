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

#include "mpcnet/pinet.h"

#include <cmath>
#include <string>

namespace mpcnet {

std::vector<double> PiNetConfig::SigmaFor(std::size_t control_dim) const {
  if (sigma_sample.empty()) {
    return std::vector<double>(control_dim, 1.0 / std::sqrt(dt));
  }
  if (sigma_sample.size() != control_dim) {
    throw ConfigError("pinet: sigma_sample has " +
                      std::to_string(sigma_sample.size()) + " entries, control dim is " +
                      std::to_string(control_dim));
  }
  return sigma_sample;
}

void PiNetConfig::Validate(std::size_t obs_dim, std::size_t control_dim) const {
  if (hidden == 0 || cost_hidden == 0) throw ConfigError("pinet: hidden widths must be positive");
  if (obs_dim > hidden) {
    throw ConfigError("pinet: observation dim " + std::to_string(obs_dim) +
                      " exceeds abstract state width " + std::to_string(hidden));
  }
  if (train_samples < 1 || eval_samples < 1) throw ConfigError("pinet: K must be >= 1");
  if (train_iterations < 1 || eval_iterations < 1) throw ConfigError("pinet: U must be >= 1");
  if (!(lambda > 0.0)) throw ConfigError("pinet: lambda must be positive");
  if (!(nu >= 1.0)) throw ConfigError("pinet: nu must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("pinet: dt must be positive");
  for (double s : SigmaFor(control_dim)) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("pinet: sigma_sample must be >= 0");
  }
  if (!(memory_budget_bytes > 0.0)) throw ConfigError("pinet: memory budget must be positive");
}

void PiNetConfig::ValidateTraining(std::size_t obs_dim, std::size_t control_dim,
                                   std::size_t horizon, std::size_t batch) const {
  Validate(obs_dim, control_dim);
  const double bytes = PiNetTrainingBytes(*this, horizon, control_dim, batch);
  if (bytes > memory_budget_bytes) {
    throw ConfigError("pinet: U=" + std::to_string(train_iterations) +
                      ", K=" + std::to_string(train_samples) + ", H=" +
                      std::to_string(horizon) + ", batch " + std::to_string(batch) +
                      " needs about " + std::to_string(bytes / (1024.0 * 1024.0)) +
                      " MiB of activations, over the budget of " +
                      std::to_string(memory_budget_bytes / (1024.0 * 1024.0)) + " MiB");
  }
}

void AddPiNetParams(ParamSet& params, std::size_t control_dim,
                    const PiNetConfig& cfg, Rng& rng) {
  AddDenseLayer(params, "dynamics", cfg.hidden + control_dim, cfg.hidden, rng);
  AddDenseLayer(params, "cost.hidden", cfg.hidden + control_dim, cfg.cost_hidden, rng);
  AddDenseLayer(params, "cost.out", cfg.cost_hidden, 1, rng);
}

std::size_t PiNetParamCount(std::size_t control_dim, std::size_t hidden,
                            std::size_t cost_hidden) {
  return hidden * (hidden + control_dim) + hidden +
         cost_hidden * (hidden + control_dim) + cost_hidden + cost_hidden + 1;
}

PiNetWeights PiNetWeights::From(std::span<const ad::Tensor> p) {
  if (p.size() != 6) throw ShapeError("pinet: expected 6 parameter tensors");
  return {p[0], p[1], p[2], p[3], p[4], p[5]};
}

ad::Tensor InitHidden(std::span<const double> x, std::size_t hidden) {
  if (x.size() > hidden) {
    throw ConfigError("pinet: state dim " + std::to_string(x.size()) +
                      " exceeds abstract state width " + std::to_string(hidden));
  }
  std::vector<double> h(hidden, 0.0);
  std::copy(x.begin(), x.end(), h.begin());
  return ad::Tensor::Vector(std::move(h));
}

AbstractRollouts SampleAbstractRollouts(const ad::Tensor& h0, const ad::Tensor& u,
                                        const ad::Tensor& noise,
                                        const PiNetWeights& w, double dt,
                                        double control_scale) {
  if (u.rank() != 2 || noise.rank() != 3 || noise.dim(1) != u.dim(0) ||
      noise.dim(2) != u.dim(1)) {
    throw ShapeError("pinet rollouts: u " + ad::ShapeToString(u.shape()) +
                     ", noise " + ad::ShapeToString(noise.shape()));
  }
  if (h0.rank() != 1) throw ShapeError("pinet rollouts: h0 must be a vector");
  if (h0.recorded()) throw Error("pinet rollouts: h0 must be a constant");
  const std::size_t k_count = noise.dim(0), horizon = u.dim(0), m = u.dim(1);
  const std::size_t width = h0.size();
  const double inv_sqrt_dt = 1.0 / std::sqrt(dt);

  std::vector<double> ident(m * m, 0.0);
  for (std::size_t j = 0; j < m; ++j) ident[j * m + j] = 1.0;
  const ad::Tensor eye = ad::Tensor::Matrix(m, m, std::move(ident));

  std::vector<double> tiled(k_count * width);
  for (std::size_t k = 0; k < k_count; ++k) {
    std::copy(h0.data().begin(), h0.data().end(), tiled.begin() + k * width);
  }
  ad::Tensor h = ad::Tensor::Matrix(k_count, width, std::move(tiled));

  AbstractRollouts out;
  auto eps = noise.data();
  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<double> e(k_count * m);
    for (std::size_t k = 0; k < k_count; ++k) {
      for (std::size_t j = 0; j < m; ++j) {
        e[k * m + j] = eps[(k * horizon + t) * m + j] * inv_sqrt_dt;
      }
    }
    ad::Tensor perturbed =
        ad::Affine(eye, ad::Tensor::Matrix(k_count, m, std::move(e)), ad::Row(u, t));
    ad::Tensor input = ad::Scale(perturbed, 1.0 / control_scale);
    h = ad::Tanh(ad::Affine(w.dyn_w, ad::Concat(h, input), w.dyn_b));
    out.hidden.push_back(h);
    out.controls.push_back(perturbed);
  }
  return out;
}

ad::Tensor CostTrajectories(const AbstractRollouts& rollouts, const PiNetWeights& w,
                            double control_scale) {
  if (rollouts.hidden.empty() || rollouts.hidden.size() != rollouts.controls.size()) {
    throw ShapeError("pinet cost: empty or inconsistent rollouts");
  }
  ad::Tensor total;
  for (std::size_t t = 0; t < rollouts.hidden.size(); ++t) {
    ad::Tensor in = ad::Concat(rollouts.hidden[t],
                               ad::Scale(rollouts.controls[t], 1.0 / control_scale));
    ad::Tensor c = ad::Affine(w.cost_w2, ad::Tanh(ad::Affine(w.cost_w1, in, w.cost_b1)),
                              w.cost_b2);
    total = t == 0 ? c : ad::Add(total, c);
  }
  return ad::ReduceSumLast(total);
}

ad::Tensor DrawPlannerNoise(std::size_t samples, std::size_t horizon,
                            std::span<const double> sigma, double dt,
                            std::uint64_t seed) {
  const std::size_t m = sigma.size();
  std::vector<double> eps(samples * horizon * m);
  const double sqrt_dt = std::sqrt(dt);
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < samples; ++k) {
    Rng rng(DeriveSeed(seed, {k}));
    for (std::size_t t = 0; t < horizon; ++t) {
      for (std::size_t j = 0; j < m; ++j) {
        eps[(k * horizon + t) * m + j] = sigma[j] * sqrt_dt * normal(rng);
      }
    }
  }
  return ad::Tensor({samples, horizon, m}, std::move(eps));
}

ad::Tensor PiNetForward(const ad::Tensor& h0, const ad::Tensor& warm,
                        const PiNetWeights& w, const PiNetConfig& cfg,
                        std::span<const ad::Tensor> noise, double control_scale) {
  if (noise.empty()) throw ConfigError("pinet: at least one iteration is required");
  ad::Tensor u = warm;
  for (const ad::Tensor& eps : noise) {
    AbstractRollouts r = SampleAbstractRollouts(h0, u, eps, w, cfg.dt, control_scale);
    ad::Tensor costs = CostTrajectories(r, w, control_scale);
    u = ControlUpdate(u, eps, costs, cfg.lambda, cfg.dt);
  }
  return u;
}

ad::Tensor PiNetForward(const ad::Tensor& h0, const ad::Tensor& warm,
                        const PiNetWeights& w, const PiNetConfig& cfg,
                        int samples, int iterations, double control_scale,
                        Rng& rng) {
  if (warm.rank() != 2) throw ShapeError("pinet: warm start must be [H x m]");
  const std::vector<double> sigma = cfg.SigmaFor(warm.dim(1));
  std::vector<ad::Tensor> noise;
  for (int i = 0; i < iterations; ++i) {
    noise.push_back(DrawPlannerNoise(static_cast<std::size_t>(samples), warm.dim(0),
                                     sigma, cfg.dt, rng()));
  }
  return PiNetForward(h0, warm, w, cfg, noise, control_scale);
}

ad::Tensor PiNetLoss(const ad::Tensor& predicted, const ad::Tensor& expert) {
  if (predicted.shape() != expert.shape()) {
    throw ShapeError("pinet loss: predicted " + ad::ShapeToString(predicted.shape()) +
                     " vs expert " + ad::ShapeToString(expert.shape()));
  }
  return MeanSquaredError(predicted, expert);
}

std::size_t PiNetActivationCount(std::size_t samples, std::size_t horizon,
                                 std::size_t control_dim, std::size_t hidden,
                                 std::size_t cost_hidden) {
  // Per sample and step: dynamics input, pre-activation and state; cost
  // input, hidden pre-activation and activation, output, running sum.
  const std::size_t per_eval = (hidden + control_dim) + 2 * hidden +
                               (hidden + control_dim) + 2 * cost_hidden + 2;
  return samples * horizon * per_eval;
}

double PiNetTrainingBytes(const PiNetConfig& cfg, std::size_t horizon,
                          std::size_t control_dim, std::size_t batch) {
  return static_cast<double>(cfg.train_iterations) * static_cast<double>(batch) *
         static_cast<double>(PiNetActivationCount(
             static_cast<std::size_t>(cfg.train_samples), horizon, control_dim,
             cfg.hidden, cfg.cost_hidden)) *
         sizeof(double);
}

}  // namespace mpcnet
