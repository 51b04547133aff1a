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

#ifndef MPCNET_DAGGER_H_
#define MPCNET_DAGGER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mpcnet/environment.h"
#include "mpcnet/evaluation.h"
#include "mpcnet/mppi.h"
#include "mpcnet/policies.h"
#include "mpcnet/training.h"

namespace mpcnet {

// 1.0, 0.8, 0.7, ..., 0.02, 0.0, 0.0, 0.0 (23 iterations).
std::vector<double> DefaultBetaSchedule();

// Mixing probability for 1-based `iteration`; past the end the last entry
// repeats.
double BetaAt(const std::vector<double>& schedule, int iteration);
void ValidateBetaSchedule(const std::vector<double>& schedule);

struct Record {
  int iteration = 0;
  int episode = 0;
  int timestep = 0;
  int phase = 0;                       // target waypoint of the episode start
  bool expert_applied = false;
  StateVec state;                      // x_t
  std::vector<double> observation;     // policy features of x_t
  std::vector<double> learner_warm;    // [H*m]; empty for reactive learners
  std::vector<double> learner_output;  // learner emission at x_t
  std::vector<double> target;          // expert [H*m] or [m]

  bool operator==(const Record&) const = default;
};

// Append-only aggregate of all collected records.
class Dataset {
 public:
  void Append(std::vector<Record> records);
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<Record>& records() const { return records_; }
  std::size_t CountIteration(int iteration) const;

  // One record per line: space separated key=value fields, vectors as
  // comma separated %.17g values.
  std::string ToString() const;
  static Dataset FromString(const std::string& text);
  void Save(const std::string& path) const;
  static Dataset Load(const std::string& path);

 private:
  std::vector<Record> records_;
};

struct ExpertSetup {
  MppiConfig mppi;
  CostWeights weights;
};

struct CollectConfig {
  int episodes = 64;
  std::uint64_t seed = 1;
};

// Alg. 1: reactive learner (fnn, rnn); targets are the expert's first control.
void VanillaDaggerIteration(int iteration, double beta, const Policy& learner,
                            const Environment& env, const Task& task,
                            const ExpertSetup& expert, const CollectConfig& cfg,
                            Dataset& dataset);

// Alg. 2: sequence learner (mpc_fnn, mpc_rnn, pinet); expert and learner
// each keep their own shifted warm start; targets are whole sequences.
void MpcDaggerIteration(int iteration, double beta, const Policy& learner,
                        const Environment& env, const Task& task,
                        const ExpertSetup& expert, const CollectConfig& cfg,
                        Dataset& dataset);

// Training examples for `kind`: one per record, or one per episode for the
// vanilla RNN.
std::vector<Example> BuildExamples(const Dataset& dataset, PolicyKind kind);

struct ValidationScore {
  double success_percent = 0.0;
  double mean_cost = 0.0;  // over successes; +inf if none
};

ValidationScore ScorePolicy(const Policy& policy, const Environment& env,
                            const Task& task, int episodes, std::uint64_t seed);

// Highest success, then lower mean cost, then the later index.
std::size_t SelectBest(const std::vector<ValidationScore>& scores);

struct DaggerConfig {
  int iterations = 23;
  CollectConfig collect;
  std::vector<double> beta = DefaultBetaSchedule();
  TrainConfig train;
  int validation_episodes = 32;
  std::uint64_t validation_seed = 7;
};

struct IterationLog {
  int iteration = 0;
  double beta = 0.0;
  std::size_t dataset_size = 0;
  std::size_t expert_steps = 0;
  TrainResult training;
};

struct DaggerResult {
  Dataset dataset;
  // Learner used to collect iteration i (index i-1) plus the final one.
  std::vector<std::unique_ptr<Policy>> policies;
  std::vector<ValidationScore> scores;
  std::vector<IterationLog> log;
  std::size_t best = 0;

  const Policy& best_policy() const { return *policies.at(best); }
};

using IterationCallback = std::function<void(const IterationLog&, const Policy&)>;

// Runs the configured iterations from `initial` and selects the best policy.
DaggerResult RunDagger(const Policy& initial, const Environment& env, const Task& task,
                       const ExpertSetup& expert, const DaggerConfig& cfg,
                       const IterationCallback& on_iteration = nullptr);

}  // namespace mpcnet

#endif  // MPCNET_DAGGER_H_
