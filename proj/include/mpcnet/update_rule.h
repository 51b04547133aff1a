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

#ifndef MPCNET_UPDATE_RULE_H_
#define MPCNET_UPDATE_RULE_H_

#include "mpcnet/autodiff.h"

// The path-integral control update, written once on the autodiff ops so the
// sampling expert (constants only) and the differentiable planner (recorded)
// execute the same arithmetic.
namespace mpcnet {

// w_k = exp(-(S_k - min S) / lambda) / sum_j exp(-(S_j - min S) / lambda).
// costs: [K] (or [K x 1]); the min shift is held constant.
ad::Tensor PathIntegralWeights(const ad::Tensor& costs, double lambda);

// u*_t = u_t + sum_k w_k eps_{t,k} / sqrt(dt).
// u: [H x m]; noise: [K x H x m], treated as a constant; costs: [K].
ad::Tensor PathIntegralUpdate(const ad::Tensor& u, const ad::Tensor& noise,
                              const ad::Tensor& costs, double lambda, double dt);

}  // namespace mpcnet

#endif  // MPCNET_UPDATE_RULE_H_
