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

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "mpcnet/experiment.h"
#include "mpcnet/gradcheck.h"

namespace {

using namespace mpcnet;

void PrintMetrics(const std::string& label, const Metrics& m) {
  if (m.mean_cost) {
    std::printf("%-24s success %5.1f%% (%d/%d)  cost %.3f +- %.3f\n", label.c_str(),
                m.success_percent, m.successes, m.trials, *m.mean_cost, *m.std_cost);
  } else {
    std::printf("%-24s success %5.1f%% (%d/%d)  cost -\n", label.c_str(), m.success_percent,
                m.successes, m.trials);
  }
}

ExperimentConfig LoadConfig(const std::string& path, const std::string& output_dir) {
  ExperimentConfig cfg = path.empty() ? ExperimentConfig() : ExperimentConfig::Load(path);
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  return cfg;
}

int Train(const ExperimentConfig& cfg) {
  std::printf("training %s on %s, %d iterations into %s\n", PolicyKindName(cfg.policy.kind).c_str(),
              TaskKindName(cfg.task).c_str(), cfg.dagger.iterations, cfg.output_dir.c_str());
  const TrainingArtifacts out = RunTraining(cfg, [](const IterationLog& log, const Policy&) {
    const auto& losses = log.training.epoch_losses;
    std::printf("iter %2d  beta %.2f  |D| %zu  expert steps %zu  loss %.4g -> %.4g\n",
                log.iteration, log.beta, log.dataset_size, log.expert_steps,
                losses.empty() ? 0.0 : losses.front(), losses.empty() ? 0.0 : losses.back());
    std::fflush(stdout);
  });
  for (std::size_t i = 0; i < out.result.scores.size(); ++i) {
    std::printf("candidate %2zu  validation success %5.1f%%  cost %.3f%s\n", i + 1,
                out.result.scores[i].success_percent, out.result.scores[i].mean_cost,
                i == out.result.best ? "  (best)" : "");
  }
  std::printf("best checkpoint %s\nmanifest %s\n", out.best_checkpoint.c_str(),
              out.manifest.c_str());
  return 0;
}

int Eval(const ExperimentConfig& cfg, const std::string& checkpoint) {
  const auto policy = LoadCheckpoint(checkpoint);
  const ExperimentSetup setup = BuildSetup(cfg);
  PrintMetrics(PolicyKindName(policy->kind()),
               ComputeMetrics(RunTrials(*setup.env, setup.eval_task, cfg.trials, cfg.eval_seed,
                                        PolicyRunner(*policy))));
  return 0;
}

int Sweep(const ExperimentConfig& cfg, const std::string& checkpoint, bool with_expert) {
  SweepResult result;
  if (with_expert) {
    const ExperimentSetup setup = BuildSetup(cfg);
    std::vector<NamedRunner> runners;
    std::unique_ptr<Policy> policy;
    if (!checkpoint.empty()) {
      if (!std::filesystem::exists(checkpoint)) {
        throw IoError("checkpoint '" + checkpoint + "' does not exist");
      }
      policy = LoadCheckpoint(checkpoint);
      runners.emplace_back(PolicyKindName(policy->kind()), PolicyRunner(*policy));
    }
    runners.emplace_back("expert", ExpertRunner(setup.expert.mppi, setup.expert.weights));
    result = RunSweep(cfg, runners);
  } else {
    result = RunSweep(cfg, checkpoint);
  }
  for (const SweepRow& r : result.rows) {
    PrintMetrics(r.policy + " " + r.parameter + "=" + std::to_string(r.value), r.metrics);
  }
  const auto [csv, summary] = EmitReport(result, cfg, cfg.output_dir);
  std::printf("wrote %s and %s\n", csv.c_str(), summary.c_str());
  return 0;
}

int ExpertDemo(const ExperimentConfig& cfg) {
  const ExperimentSetup setup = BuildSetup(cfg);
  PrintMetrics("expert", ComputeMetrics(RunTrials(
                             *setup.env, setup.eval_task, cfg.trials, cfg.eval_seed,
                             ExpertRunner(setup.expert.mppi, setup.expert.weights))));
  return 0;
}

int GradCheck() {
  bool ok = true;
  for (const GradCheckCase& c : RunGradCheckSuite()) {
    std::printf("%-26s max rel err %.3e  (tol %.0e)  %s\n", c.name.c_str(), c.error,
                c.tolerance, c.passed() ? "ok" : "FAILED");
    ok = ok && c.passed();
  }
  return ok ? 0 : 1;
}

int Parity(const ExperimentConfig& cfg) {
  const ExperimentSetup setup = BuildSetup(cfg);
  for (const ParityEntry& e : ParityReport(cfg.policy, setup.dims)) {
    std::printf("%-8s hidden %5zu  parameters %zu\n", PolicyKindName(e.kind).c_str(), e.hidden,
                e.params);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imitation learning of sampling-based MPC experts"};
  app.require_subcommand(1);
  std::string config, checkpoint, output_dir;
  bool with_expert = false;

  auto* train = app.add_subcommand("train", "Run DAgger and write checkpoints and dataset");
  train->add_option("--config", config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  train->add_option("--output-dir", output_dir, "Override the config's output directory");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the configured setting");
  eval->add_option("--config", config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  eval->add_option("--checkpoint", checkpoint, "Policy checkpoint")->required();

  auto* sweep = app.add_subcommand("sweep", "Evaluate over the perturbation grid");
  sweep->add_option("--config", config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  sweep->add_option("--checkpoint", checkpoint, "Policy checkpoint");
  sweep->add_option("--output-dir", output_dir, "Report directory");
  sweep->add_flag("--with-expert", with_expert, "Also sweep the MPPI expert");

  auto* demo = app.add_subcommand("expert-demo", "Expert-only rollouts");
  demo->add_option("--config", config, "Experiment config (JSON)")->check(CLI::ExistingFile);

  auto* grad = app.add_subcommand("grad-check", "Finite-difference gradient checks");

  auto* parity = app.add_subcommand("parity", "Hidden widths and parameter counts per kind");
  parity->add_option("--config", config, "Experiment config (JSON)")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*grad) return GradCheck();
    const ExperimentConfig cfg = LoadConfig(config, output_dir);
    if (*train) return Train(cfg);
    if (*eval) return Eval(cfg, checkpoint);
    if (*sweep) {
      if (checkpoint.empty() && !with_expert) {
        std::fprintf(stderr, "sweep: --checkpoint or --with-expert is required\n");
        return 2;
      }
      return Sweep(cfg, checkpoint, with_expert);
    }
    if (*demo) return ExpertDemo(cfg);
    if (*parity) return Parity(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
