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

#ifndef MPCNET_TYPES_H_
#define MPCNET_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "mpcnet/errors.h"

namespace mpcnet {

using StateVec = std::vector<double>;
using ControlVec = std::vector<double>;
using Rng = std::mt19937_64;

// Mixes a base seed with a list of keys (splitmix64 finalizer per key).
// Used to give every rollout, episode and trial its own stream so results
// do not depend on execution order or thread count.
std::uint64_t DeriveSeed(std::uint64_t base,
                         std::initializer_list<std::uint64_t> keys);

// Horizon-by-control-dimension matrix of controls, row t is u_t.
class ControlSeq {
 public:
  ControlSeq() = default;
  ControlSeq(std::size_t horizon, std::size_t dim, double fill = 0.0)
      : horizon_(horizon), dim_(dim), data_(horizon * dim, fill) {}
  ControlSeq(std::size_t horizon, std::size_t dim, std::vector<double> data);

  std::size_t horizon() const { return horizon_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t t, std::size_t j) { return data_[t * dim_ + j]; }
  double operator()(std::size_t t, std::size_t j) const {
    return data_[t * dim_ + j];
  }
  std::span<double> row(std::size_t t) { return {data_.data() + t * dim_, dim_}; }
  std::span<const double> row(std::size_t t) const {
    return {data_.data() + t * dim_, dim_};
  }
  ControlVec first() const { return ControlVec(row(0).begin(), row(0).end()); }

  const std::vector<double>& values() const { return data_; }
  std::vector<double>& values() { return data_; }

  bool operator==(const ControlSeq&) const = default;

 private:
  std::size_t horizon_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

bool AllFinite(std::span<const double> v);

}  // namespace mpcnet

#endif  // MPCNET_TYPES_H_
