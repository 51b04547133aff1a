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

#include "mpcnet/types.h"

#include <cmath>
#include <string>
#include <utility>

namespace mpcnet {

std::uint64_t DeriveSeed(std::uint64_t base,
                         std::initializer_list<std::uint64_t> keys) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(base);
  for (std::uint64_t k : keys) h = mix(h ^ mix(k + 0x632be59bd9b4e019ULL));
  return h;
}

ControlSeq::ControlSeq(std::size_t horizon, std::size_t dim,
                       std::vector<double> data)
    : horizon_(horizon), dim_(dim), data_(std::move(data)) {
  if (data_.size() != horizon_ * dim_) {
    throw ShapeError("control sequence: expected " + std::to_string(horizon_) +
                     "x" + std::to_string(dim_) + " values, got " +
                     std::to_string(data_.size()));
  }
}

bool AllFinite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace mpcnet
