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

#ifndef MPCNET_EXPERIMENT_H_
#define MPCNET_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpcnet/dagger.h"
#include "mpcnet/environment.h"
#include "mpcnet/evaluation.h"
#include "mpcnet/mppi.h"
#include "mpcnet/policies.h"

namespace mpcnet {

// One swept parameter. `parameter` names an environment parameter, or
// "initial_offset" for the quadcopter start perturbation; values are
// absolute settings.
struct Perturbation {
  std::string parameter;
  std::vector<double> values;

  bool operator==(const Perturbation&) const = default;
};

// Optional overrides of the task's expert defaults.
struct MppiOverrides {
  std::optional<int> num_samples;
  std::optional<int> horizon;
  std::optional<double> lambda;
  std::optional<double> nu;
  std::optional<int> iterations;
  std::optional<std::vector<double>> sigma_sample;
  std::optional<std::vector<double>> control_cost;
  std::optional<std::vector<double>> cost_weights;
};

struct ExperimentConfig {
  TaskKind task = TaskKind::kCartpole;
  int episode_steps = 0;       // training episodes; 0: 100 cartpole, 150 quadcopter
  int eval_episode_steps = 0;  // test episodes; 0: 100 cartpole, 750 quadcopter
  std::map<std::string, double> environment;  // parameter overrides
  PolicySpec policy;
  MppiOverrides mppi;
  DaggerConfig dagger;
  std::uint64_t init_seed = 3;
  int trials = 128;
  std::uint64_t eval_seed = 99;
  std::vector<Perturbation> sweep;  // empty: DefaultSweep(task)
  std::string output_dir = "runs";

  // Parses a JSON object; unknown keys and bad values throw ConfigError.
  static ExperimentConfig FromJson(const std::string& text);
  static ExperimentConfig Load(const std::string& path);
  // Fully resolved configuration, defaults filled in.
  std::string ToJson() const;
  void Validate() const;
};

// Baseline plus the perturbation axes used for each task.
std::vector<Perturbation> DefaultSweep(TaskKind task);

// Resolved experiment objects.
struct ExperimentSetup {
  std::unique_ptr<Environment> env;
  Task task;       // training episodes
  Task eval_task;  // test episodes
  ExpertSetup expert;
  PolicyDims dims;
};

ExperimentSetup BuildSetup(const ExperimentConfig& cfg);

// Environment and task with one perturbation applied.
std::pair<std::unique_ptr<Environment>, Task> Perturbed(const ExperimentSetup& setup,
                                                        const std::string& parameter,
                                                        double value);

struct TrainingArtifacts {
  DaggerResult result;
  std::vector<std::string> checkpoints;  // one per candidate policy
  std::string best_checkpoint;
  std::string dataset;
  std::string manifest;
};

// Runs DAgger for the configured policy and writes checkpoints, the
// dataset and a manifest below `output_dir`.
TrainingArtifacts RunTraining(const ExperimentConfig& cfg,
                              const IterationCallback& on_iteration = nullptr);

struct SweepRow {
  std::string task;
  std::string parameter;
  double value = 0.0;
  std::string policy;
  Metrics metrics;

  bool operator==(const SweepRow&) const;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  bool operator==(const SweepResult&) const = default;
};

using NamedRunner = std::pair<std::string, EpisodeRunner>;

// Every runner on every grid value, `cfg.trials` trials each.
SweepResult RunSweep(const ExperimentConfig& cfg, const std::vector<NamedRunner>& runners);
// Same with the policy stored at `checkpoint`; a missing file throws IoError.
SweepResult RunSweep(const ExperimentConfig& cfg, const std::string& checkpoint);

// Table with columns task, params, policy, success %, mean cost, std cost
// (plus trial counts); costs are blank when no trial succeeded.
std::string ReportCsv(const SweepResult& result);
SweepResult ParseReportCsv(const std::string& text);
// Structured summary including the resolved config.
std::string ReportJson(const SweepResult& result, const ExperimentConfig& cfg);
// Writes report.csv and report.json into `dir`; returns their paths.
std::pair<std::string, std::string> EmitReport(const SweepResult& result,
                                               const ExperimentConfig& cfg,
                                               const std::string& dir);

}  // namespace mpcnet

#endif  // MPCNET_EXPERIMENT_H_
