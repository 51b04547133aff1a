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

#include "mpcnet/evaluation.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

namespace mpcnet {
namespace {

TEST(MetricsTest, SuccessAndFailureMix) {
  const Metrics m = ComputeMetrics(std::vector<double>{50, 150});
  EXPECT_EQ(m.trials, 2);
  EXPECT_EQ(m.successes, 1);
  EXPECT_DOUBLE_EQ(m.success_percent, 50.0);
  EXPECT_DOUBLE_EQ(*m.mean_cost, 50.0);
  EXPECT_DOUBLE_EQ(*m.std_cost, 0.0);
}

TEST(MetricsTest, PopulationDeviationOverSuccesses) {
  const double inf = std::numeric_limits<double>::infinity();
  const Metrics m = ComputeMetrics(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9, inf});
  EXPECT_EQ(m.successes, 8);
  EXPECT_DOUBLE_EQ(*m.mean_cost, 5.0);
  EXPECT_DOUBLE_EQ(*m.std_cost, 2.0);
  EXPECT_NEAR(m.success_percent, 800.0 / 9.0, 1e-12);
}

TEST(MetricsTest, AllFailuresLeaveCostAbsent) {
  const Metrics m = ComputeMetrics(std::vector<double>{101, 1e6});
  EXPECT_EQ(m.successes, 0);
  EXPECT_EQ(m.success_percent, 0.0);
  EXPECT_FALSE(m.mean_cost.has_value());
  EXPECT_FALSE(m.std_cost.has_value());
  EXPECT_THROW(ComputeMetrics(std::vector<double>{}), Error);
}

class EvaluationTest : public ::testing::Test {
 protected:
  EvaluationTest()
      : env_(MakeEnvironment(TaskKind::kCartpole)), task_(MakeTask(TaskKind::kCartpole, 100)) {
    PolicySpec spec;
    spec.kind = PolicyKind::kFnn;
    spec.hidden = 8;
    Rng rng(1);
    policy_ = MakePolicy(spec, PolicyDims{env_->observation_dim(), 1, 20, {-10}, {10}}, rng);
  }

  std::unique_ptr<Environment> env_;
  Task task_;
  std::unique_ptr<Policy> policy_;
};

TEST_F(EvaluationTest, IdlePolicyNeverSwingsUp) {
  policy_->mutable_params().Unflatten(std::vector<double>(policy_->num_params(), 0.0));
  std::vector<double> costs;
  for (int i = 0; i < 16; ++i) {
    const InitialCondition hanging{{-4.0 + 0.5 * i, 0.0, 0.0, 0.0}, 0};
    costs.push_back(EpisodeCost(RunPolicyEpisode(*env_, task_, hanging, *policy_, i), task_, *env_));
  }
  EXPECT_EQ(ComputeMetrics(costs).successes, 0);
}

TEST_F(EvaluationTest, TrialsAreReproducible) {
  const auto a = RunTrials(*env_, task_, 8, 4, PolicyRunner(*policy_));
  const auto b = RunTrials(*env_, task_, 8, 4, PolicyRunner(*policy_));
  EXPECT_EQ(a, b);
  const auto c = RunTrials(*env_, task_, 8, 5, PolicyRunner(*policy_));
  EXPECT_NE(a, c);
}

TEST_F(EvaluationTest, RunnerSnapshotsThePolicy) {
  const EpisodeRunner runner = PolicyRunner(*policy_);
  const auto before = RunTrials(*env_, task_, 2, 6, runner);
  policy_->mutable_params().Unflatten(std::vector<double>(policy_->num_params(), 0.0));
  EXPECT_EQ(RunTrials(*env_, task_, 2, 6, runner), before);
}

TEST_F(EvaluationTest, EpisodeCostMatchesTaskCost) {
  Rng rng(7);
  const InitialCondition init = SampleInitialState(task_, rng);
  const EpisodeTrace trace = RunPolicyEpisode(*env_, task_, init, *policy_, 8);
  ASSERT_EQ(trace.states.size(), 100u);
  EXPECT_EQ(EpisodeCost(trace, task_, *env_), TaskCost(trace.states, task_, *env_));
  EpisodeTrace broken = trace;
  broken.diverged = true;
  EXPECT_TRUE(std::isinf(EpisodeCost(broken, task_, *env_)));
}

}  // namespace
}  // namespace mpcnet
