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

#include "mpcnet/network.h"

#include <cmath>
#include <utility>

namespace mpcnet {

void ParamSet::Add(std::string name, ad::Tensor value) {
  for (const auto& e : entries_) {
    if (e.name == name) throw Error("parameter '" + name + "' added twice");
  }
  entries_.push_back({std::move(name), value.Detached()});
}

std::size_t ParamSet::IndexOf(const std::string& name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  throw Error("no parameter named '" + name + "'");
}

void ParamSet::Set(const std::string& name, ad::Tensor value) {
  auto& e = entries_[IndexOf(name)];
  if (e.value.shape() != value.shape()) {
    throw ShapeError("parameter '" + name + "' has shape " +
                     ad::ShapeToString(e.value.shape()) + ", got " +
                     ad::ShapeToString(value.shape()));
  }
  e.value = value.Detached();
}

std::size_t ParamSet::num_values() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

std::vector<ad::Tensor> ParamSet::OnTape(ad::Tape& tape) const {
  std::vector<ad::Tensor> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(tape.Leaf(e.value));
  return out;
}

std::vector<ad::Tensor> ParamSet::Constants() const {
  std::vector<ad::Tensor> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.value);
  return out;
}

std::vector<ad::Tensor> ParamSet::FromFlat(const ad::Tensor& flat) const {
  if (flat.rank() != 1 || flat.size() != num_values()) {
    throw ShapeError("flat parameter vector has shape " +
                     ad::ShapeToString(flat.shape()) + ", expected [" +
                     std::to_string(num_values()) + "]");
  }
  std::vector<ad::Tensor> out;
  std::size_t offset = 0;
  for (const auto& e : entries_) {
    const std::size_t n = e.value.size();
    out.push_back(ad::Reshape(ad::Slice(flat, offset, n), e.value.shape()));
    offset += n;
  }
  return out;
}

std::vector<double> ParamSet::Flatten() const {
  std::vector<double> out;
  out.reserve(num_values());
  for (const auto& e : entries_) {
    out.insert(out.end(), e.value.data().begin(), e.value.data().end());
  }
  return out;
}

void ParamSet::Unflatten(std::span<const double> values) {
  if (values.size() != num_values()) {
    throw ShapeError("unflatten: got " + std::to_string(values.size()) +
                     " values for " + std::to_string(num_values()) + " parameters");
  }
  std::size_t offset = 0;
  for (auto& e : entries_) {
    const std::size_t n = e.value.size();
    e.value = ad::Tensor(e.value.shape(),
                         std::vector<double>(values.begin() + offset,
                                             values.begin() + offset + n));
    offset += n;
  }
}

void AddDenseLayer(ParamSet& params, const std::string& prefix, std::size_t in,
                   std::size_t out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> init(-bound, bound);
  std::vector<double> w(out * in), b(out);
  for (double& v : w) v = init(rng);
  for (double& v : b) v = init(rng);
  params.Add(prefix + ".weight", ad::Tensor::Matrix(out, in, std::move(w)));
  params.Add(prefix + ".bias", ad::Tensor::Vector(std::move(b)));
}

ad::Tensor MeanSquaredError(const ad::Tensor& predicted, const ad::Tensor& target) {
  ad::Tensor diff = ad::Sub(predicted, target);
  return ad::Scale(ad::ReduceSum(ad::Mul(diff, diff)),
                   1.0 / static_cast<double>(diff.size()));
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::Step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ShapeError("adam: parameter count changed");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

}  // namespace mpcnet
