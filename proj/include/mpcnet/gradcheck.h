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

#ifndef MPCNET_GRADCHECK_H_
#define MPCNET_GRADCHECK_H_

#include <string>
#include <vector>

namespace mpcnet {

struct GradCheckCase {
  std::string name;
  double error = 0.0;  // max relative error against central differences
  double tolerance = 0.0;

  bool passed() const { return error < tolerance; }
};

// Finite-difference checks of the differentiable pieces: elementary ops,
// the path-integral update, every policy loss and the end-to-end planner.
std::vector<GradCheckCase> RunGradCheckSuite();

// End-to-end planner loss with H=3, K=4, hidden=8 and fixed noise.
GradCheckCase PlannerGradCheck();

}  // namespace mpcnet

#endif  // MPCNET_GRADCHECK_H_
