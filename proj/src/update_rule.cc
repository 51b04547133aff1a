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

#include "mpcnet/update_rule.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpcnet {

ad::Tensor PathIntegralWeights(const ad::Tensor& costs, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("update: lambda must be positive");
  if (costs.size() == 0) throw ShapeError("update: empty cost vector");
  const double lowest = *std::min_element(costs.data().begin(), costs.data().end());
  ad::Tensor shifted = ad::Add(costs, ad::Tensor::Filled(costs.shape(), -lowest));
  ad::Tensor e = ad::Exp(ad::Scale(shifted, -1.0 / lambda));
  return ad::Divide(e, ad::ReduceSum(e));
}

ad::Tensor PathIntegralUpdate(const ad::Tensor& u, const ad::Tensor& noise,
                              const ad::Tensor& costs, double lambda, double dt) {
  if (u.rank() != 2 || noise.rank() != 3 || noise.dim(1) != u.dim(0) ||
      noise.dim(2) != u.dim(1) || costs.size() != noise.dim(0)) {
    throw ShapeError("update: u " + ad::ShapeToString(u.shape()) + ", noise " +
                     ad::ShapeToString(noise.shape()) + ", costs " +
                     ad::ShapeToString(costs.shape()) +
                     " do not satisfy u[H x m], noise[K x H x m], costs[K]");
  }
  if (!(dt > 0.0)) throw ConfigError("update: dt must be positive");
  const std::size_t k_count = noise.dim(0);
  const std::size_t hm = u.size();
  ad::Tensor w = PathIntegralWeights(costs, lambda);
  if (w.rank() != 1) w = ad::Reshape(w, {k_count});

  // Column k of the [Hm x K] matrix is eps_k / sqrt(dt).
  const double inv_sqrt_dt = 1.0 / std::sqrt(dt);
  std::vector<double> mix(hm * k_count);
  auto eps = noise.data();
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t i = 0; i < hm; ++i) {
      mix[i * k_count + k] = eps[k * hm + i] * inv_sqrt_dt;
    }
  }
  ad::Tensor out = ad::Affine(ad::Tensor::Matrix(hm, k_count, std::move(mix)), w,
                              ad::Reshape(u, {hm}));
  return ad::Reshape(out, u.shape());
}

}  // namespace mpcnet
