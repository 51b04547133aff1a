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

#ifndef MPCNET_NETWORK_H_
#define MPCNET_NETWORK_H_

#include <span>
#include <string>
#include <vector>

#include "mpcnet/autodiff.h"
#include "mpcnet/types.h"

namespace mpcnet {

// Ordered, named parameter tensors of one model.
class ParamSet {
 public:
  struct Entry {
    std::string name;
    ad::Tensor value;
  };

  void Add(std::string name, ad::Tensor value);
  std::size_t size() const { return entries_.size(); }
  const Entry& at(std::size_t i) const { return entries_.at(i); }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t IndexOf(const std::string& name) const;
  const ad::Tensor& Get(const std::string& name) const {
    return entries_[IndexOf(name)].value;
  }
  void Set(const std::string& name, ad::Tensor value);

  // Total number of scalar parameters.
  std::size_t num_values() const;

  // Registers each tensor as a leaf of `tape`.
  std::vector<ad::Tensor> OnTape(ad::Tape& tape) const;
  std::vector<ad::Tensor> Constants() const;
  // Views of a flat [num_values] tensor, in entry order, via slice/reshape.
  std::vector<ad::Tensor> FromFlat(const ad::Tensor& flat) const;

  std::vector<double> Flatten() const;
  void Unflatten(std::span<const double> values);

 private:
  std::vector<Entry> entries_;
};

// Weight [out x in] and bias [out], both U[-1/sqrt(in), 1/sqrt(in)].
void AddDenseLayer(ParamSet& params, const std::string& prefix, std::size_t in,
                   std::size_t out, Rng& rng);

// Mean of squared differences over all entries.
ad::Tensor MeanSquaredError(const ad::Tensor& predicted, const ad::Tensor& target);

// Adaptive-moment gradient descent over a flat parameter vector.
class Adam {
 public:
  explicit Adam(std::size_t n, double lr = 1e-3, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);
  void Step(std::span<double> params, std::span<const double> grads);
  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

}  // namespace mpcnet

#endif  // MPCNET_NETWORK_H_
