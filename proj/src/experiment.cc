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

#include "mpcnet/experiment.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mpcnet {
namespace {

using nlohmann::json;

constexpr const char* kInitialOffset = "initial_offset";

void CheckKeys(const json& obj, const std::string& where,
               std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!keys.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void Read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    const json& v = obj.at(key);
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) {
          out = v.get<T>();
          return;
        }
        throw ConfigError("");
      }
    }
    out = v.get<T>();
  } catch (const std::exception&) {
    throw ConfigError(where + "." + key + ": bad value " + obj.at(key).dump());
  }
}

template <typename T>
void ReadOptional(const json& obj, const char* key, std::optional<T>& out,
                  const std::string& where) {
  if (!obj.contains(key)) return;
  T value{};
  Read(obj, key, value, where);
  out = value;
}

json PiNetJson(const PiNetConfig& c) {
  return {{"hidden", c.hidden},
          {"cost_hidden", c.cost_hidden},
          {"train_samples", c.train_samples},
          {"train_iterations", c.train_iterations},
          {"eval_samples", c.eval_samples},
          {"eval_iterations", c.eval_iterations},
          {"lambda", c.lambda},
          {"nu", c.nu},
          {"dt", c.dt},
          {"sigma_sample", c.sigma_sample},
          {"memory_budget_bytes", c.memory_budget_bytes}};
}

void ReadPiNet(const json& j, PiNetConfig& c) {
  const std::string w = "pinet";
  CheckKeys(j, w,
            {"hidden", "cost_hidden", "train_samples", "train_iterations", "eval_samples",
             "eval_iterations", "lambda", "nu", "dt", "sigma_sample", "memory_budget_bytes"});
  Read(j, "hidden", c.hidden, w);
  Read(j, "cost_hidden", c.cost_hidden, w);
  Read(j, "train_samples", c.train_samples, w);
  Read(j, "train_iterations", c.train_iterations, w);
  Read(j, "eval_samples", c.eval_samples, w);
  Read(j, "eval_iterations", c.eval_iterations, w);
  Read(j, "lambda", c.lambda, w);
  Read(j, "nu", c.nu, w);
  Read(j, "dt", c.dt, w);
  Read(j, "sigma_sample", c.sigma_sample, w);
  Read(j, "memory_budget_bytes", c.memory_budget_bytes, w);
}

std::vector<double> Range(double lo, double hi, double step) {
  std::vector<double> out;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) out.push_back(std::round((lo + i * step) * 1e9) / 1e9);
  return out;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseDouble(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("report line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::FromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const std::string w = "config";
  CheckKeys(j, w,
            {"task", "episode_steps", "environment", "policy", "pinet", "mppi", "dagger",
             "training", "evaluation", "sweep", "output_dir"});
  ExperimentConfig c;
  if (j.contains("task")) {
    std::string task;
    Read(j, "task", task, w);
    try {
      c.task = ParseTaskKind(task);
    } catch (const Error& e) {
      throw ConfigError(std::string("config.task: ") + e.what());
    }
  }
  Read(j, "episode_steps", c.episode_steps, w);
  Read(j, "output_dir", c.output_dir, w);
  if (j.contains("environment")) {
    const json& e = j.at("environment");
    if (!e.is_object()) throw ConfigError("environment: expected an object");
    for (const auto& [key, value] : e.items()) {
      double v = 0.0;
      Read(e, key.c_str(), v, "environment");
      c.environment[key] = v;
    }
  }
  if (j.contains("policy")) {
    const json& p = j.at("policy");
    CheckKeys(p, "policy", {"kind", "hidden", "parity_target", "init_seed"});
    if (p.contains("kind")) {
      std::string kind;
      Read(p, "kind", kind, "policy");
      try {
        c.policy.kind = ParsePolicyKind(kind);
      } catch (const Error& e) {
        throw ConfigError(std::string("policy.kind: ") + e.what());
      }
    }
    Read(p, "hidden", c.policy.hidden, "policy");
    Read(p, "parity_target", c.policy.parity_target, "policy");
    Read(p, "init_seed", c.init_seed, "policy");
  }
  if (j.contains("pinet")) ReadPiNet(j.at("pinet"), c.policy.pinet);
  if (j.contains("mppi")) {
    const json& m = j.at("mppi");
    const std::string mw = "mppi";
    CheckKeys(m, mw,
              {"num_samples", "horizon", "lambda", "nu", "iterations", "sigma_sample",
               "control_cost", "cost_weights"});
    ReadOptional(m, "num_samples", c.mppi.num_samples, mw);
    ReadOptional(m, "horizon", c.mppi.horizon, mw);
    ReadOptional(m, "lambda", c.mppi.lambda, mw);
    ReadOptional(m, "nu", c.mppi.nu, mw);
    ReadOptional(m, "iterations", c.mppi.iterations, mw);
    ReadOptional(m, "sigma_sample", c.mppi.sigma_sample, mw);
    ReadOptional(m, "control_cost", c.mppi.control_cost, mw);
    ReadOptional(m, "cost_weights", c.mppi.cost_weights, mw);
  }
  if (j.contains("dagger")) {
    const json& d = j.at("dagger");
    const std::string dw = "dagger";
    CheckKeys(d, dw,
              {"iterations", "episodes", "seed", "beta", "validation_episodes",
               "validation_seed"});
    Read(d, "iterations", c.dagger.iterations, dw);
    Read(d, "episodes", c.dagger.collect.episodes, dw);
    Read(d, "seed", c.dagger.collect.seed, dw);
    Read(d, "beta", c.dagger.beta, dw);
    Read(d, "validation_episodes", c.dagger.validation_episodes, dw);
    Read(d, "validation_seed", c.dagger.validation_seed, dw);
  }
  if (j.contains("training")) {
    const json& t = j.at("training");
    const std::string tw = "training";
    CheckKeys(t, tw,
              {"epochs", "batch_size", "learning_rate", "bptt_truncation", "max_failures"});
    Read(t, "epochs", c.dagger.train.epochs, tw);
    Read(t, "batch_size", c.dagger.train.batch_size, tw);
    Read(t, "learning_rate", c.dagger.train.learning_rate, tw);
    Read(t, "bptt_truncation", c.dagger.train.bptt_truncation, tw);
    Read(t, "max_failures", c.dagger.train.max_failures, tw);
  }
  if (j.contains("evaluation")) {
    const json& e = j.at("evaluation");
    CheckKeys(e, "evaluation", {"trials", "seed", "episode_steps"});
    Read(e, "trials", c.trials, "evaluation");
    Read(e, "episode_steps", c.eval_episode_steps, "evaluation");
    Read(e, "seed", c.eval_seed, "evaluation");
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (!s.is_array()) throw ConfigError("sweep: expected a list");
    for (const json& item : s) {
      CheckKeys(item, "sweep", {"parameter", "values"});
      Perturbation p;
      Read(item, "parameter", p.parameter, "sweep");
      Read(item, "values", p.values, "sweep");
      c.sweep.push_back(std::move(p));
    }
  }
  c.Validate();
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

std::string ExperimentConfig::ToJson() const {
  const ExperimentSetup setup = BuildSetup(*this);
  const MppiConfig& m = setup.expert.mppi;
  json sweep_json = json::array();
  for (const Perturbation& p : sweep.empty() ? DefaultSweep(task) : sweep) {
    sweep_json.push_back({{"parameter", p.parameter}, {"values", p.values}});
  }
  json env_json = json::object();
  for (const std::string& name : setup.env->ParamNames()) {
    env_json[name] = setup.env->GetParam(name);
  }
  json j = {
      {"task", TaskKindName(task)},
      {"episode_steps", setup.task.episode_steps},
      {"environment", env_json},
      {"policy",
       {{"kind", PolicyKindName(policy.kind)},
        {"hidden", policy.hidden},
        {"parity_target", policy.parity_target},
        {"init_seed", init_seed}}},
      {"pinet", PiNetJson(policy.pinet)},
      {"mppi",
       {{"num_samples", m.num_samples},
        {"horizon", m.horizon},
        {"lambda", m.lambda},
        {"nu", m.nu},
        {"iterations", m.iterations},
        {"sigma_sample", m.sigma_sample},
        {"control_cost", m.control_cost},
        {"cost_weights", setup.expert.weights.values}}},
      {"dagger",
       {{"iterations", dagger.iterations},
        {"episodes", dagger.collect.episodes},
        {"seed", dagger.collect.seed},
        {"beta", dagger.beta},
        {"validation_episodes", dagger.validation_episodes},
        {"validation_seed", dagger.validation_seed}}},
      {"training",
       {{"epochs", dagger.train.epochs},
        {"batch_size", dagger.train.batch_size},
        {"learning_rate", dagger.train.learning_rate},
        {"bptt_truncation", dagger.train.bptt_truncation},
        {"max_failures", dagger.train.max_failures}}},
      {"evaluation",
       {{"trials", trials},
        {"seed", eval_seed},
        {"episode_steps", setup.eval_task.episode_steps}}},
      {"sweep", sweep_json},
      {"output_dir", output_dir}};
  return j.dump(2) + "\n";
}

void ExperimentConfig::Validate() const {
  if (episode_steps < 0) throw ConfigError("episode_steps must be >= 0");
  if (eval_episode_steps < 0) throw ConfigError("evaluation.episode_steps must be >= 0");
  if (trials < 1) throw ConfigError("evaluation.trials must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  const ExperimentSetup setup = BuildSetup(*this);
  const auto names = setup.env->ParamNames();
  const std::set<std::string> known(names.begin(), names.end());
  for (const Perturbation& p : sweep) {
    const bool task_level = p.parameter == kInitialOffset && IsQuadTask(task);
    if (!task_level && !known.contains(p.parameter)) {
      throw ConfigError("sweep: unknown parameter '" + p.parameter + "' for " +
                        TaskKindName(task));
    }
    if (p.values.empty()) throw ConfigError("sweep: '" + p.parameter + "' has no values");
    for (double v : p.values) {
      if (!std::isfinite(v)) throw ConfigError("sweep: non-finite value for " + p.parameter);
    }
  }
  setup.expert.mppi.Validate(setup.env->control_dim());
  ValidateBetaSchedule(dagger.beta);
  dagger.train.Validate();
  if (dagger.iterations < 1) throw ConfigError("dagger.iterations must be >= 1");
  if (dagger.collect.episodes < 1) throw ConfigError("dagger.episodes must be >= 1");
  if (dagger.validation_episodes < 1) {
    throw ConfigError("dagger.validation_episodes must be >= 1");
  }
  if (IsSequencePolicy(policy.kind) &&
      setup.dims.horizon != static_cast<std::size_t>(setup.expert.mppi.horizon)) {
    throw ConfigError("policy horizon differs from the expert horizon");
  }
  if (policy.kind == PolicyKind::kPiNet) {
    policy.pinet.Validate(setup.dims.obs_dim, setup.dims.control_dim);
    policy.pinet.ValidateTraining(setup.dims.obs_dim, setup.dims.control_dim,
                                  setup.dims.horizon,
                                  static_cast<std::size_t>(dagger.train.batch_size));
  }
}

std::vector<Perturbation> DefaultSweep(TaskKind task) {
  if (task == TaskKind::kCartpole) {
    const CartpoleParams base;
    return {{"pole_length", Range(0.3, 0.8, 0.05)},
            {"cart_mass", {base.cart_mass, base.cart_mass + 0.2}}};
  }
  const QuadcopterParams base;
  std::vector<double> mass = {base.mass};
  for (double v : Range(1.0, 1.5, 0.05)) {
    if (v != base.mass) mass.push_back(v);
  }
  return {{"mass", mass},
          {"arm_length", {base.arm_length, base.arm_length / 2.0}},
          {"noise_sigma", {base.noise_sigma, base.noise_sigma + 0.9}},
          {kInitialOffset, {0.0, 0.5}}};
}

ExperimentSetup BuildSetup(const ExperimentConfig& cfg) {
  ExperimentSetup s;
  s.env = MakeEnvironment(cfg.task);
  for (const auto& [name, value] : cfg.environment) {
    try {
      s.env->SetParam(name, value);
    } catch (const Error& e) {
      throw ConfigError(std::string("environment: ") + e.what());
    }
  }
  const bool cart = cfg.task == TaskKind::kCartpole;
  s.task = MakeTask(cfg.task, cfg.episode_steps > 0 ? cfg.episode_steps : (cart ? 100 : 150));
  s.eval_task = MakeTask(cfg.task, cfg.eval_episode_steps > 0 ? cfg.eval_episode_steps
                                                             : (cart ? 100 : 750));
  MppiConfig m = DefaultMppiConfig(cfg.task, *s.env);
  const MppiOverrides& o = cfg.mppi;
  if (o.num_samples) m.num_samples = *o.num_samples;
  if (o.horizon) m.horizon = *o.horizon;
  if (o.lambda) m.lambda = *o.lambda;
  if (o.nu) m.nu = *o.nu;
  if (o.iterations) m.iterations = *o.iterations;
  if (o.sigma_sample) m.sigma_sample = *o.sigma_sample;
  if (o.control_cost) m.control_cost = *o.control_cost;
  s.expert.mppi = m;
  s.expert.weights = DefaultCostWeights(cfg.task);
  if (o.cost_weights) {
    if (o.cost_weights->size() != s.expert.weights.values.size()) {
      throw ConfigError("mppi.cost_weights: expected " +
                        std::to_string(s.expert.weights.values.size()) + " entries");
    }
    s.expert.weights.values = *o.cost_weights;
  }
  s.dims.obs_dim = s.env->observation_dim();
  s.dims.control_dim = s.env->control_dim();
  s.dims.horizon = static_cast<std::size_t>(std::max(1, m.horizon));
  s.dims.control_lower.assign(s.env->control_lower().begin(), s.env->control_lower().end());
  s.dims.control_upper.assign(s.env->control_upper().begin(), s.env->control_upper().end());
  return s;
}

std::pair<std::unique_ptr<Environment>, Task> Perturbed(const ExperimentSetup& setup,
                                                        const std::string& parameter,
                                                        double value) {
  auto env = setup.env->Clone();
  Task task = setup.eval_task;
  if (parameter == kInitialOffset) {
    if (!IsQuadTask(task.kind)) throw ConfigError("initial_offset applies to quadcopter tasks");
    task.initial_offset = value;
  } else {
    env->SetParam(parameter, value);
  }
  return {std::move(env), std::move(task)};
}

TrainingArtifacts RunTraining(const ExperimentConfig& cfg,
                              const IterationCallback& on_iteration) {
  cfg.Validate();
  namespace fs = std::filesystem;
  const ExperimentSetup setup = BuildSetup(cfg);
  Rng init_rng(cfg.init_seed);
  const auto initial = MakePolicy(cfg.policy, setup.dims, init_rng);
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + cfg.output_dir + "': " + ec.message());

  TrainingArtifacts out;
  auto checkpoint_path = [&](std::size_t index) {
    char name[32];
    std::snprintf(name, sizeof(name), "policy_%02zu.ckpt", index);
    return (dir / name).string();
  };
  out.checkpoints.push_back(checkpoint_path(1));
  SaveCheckpoint(*initial, out.checkpoints.back());
  out.result = RunDagger(*initial, *setup.env, setup.task, setup.expert, cfg.dagger,
                         [&](const IterationLog& log, const Policy& trained) {
                           out.checkpoints.push_back(checkpoint_path(out.checkpoints.size() + 1));
                           SaveCheckpoint(trained, out.checkpoints.back());
                           if (on_iteration) on_iteration(log, trained);
                         });
  out.best_checkpoint = (dir / "best.ckpt").string();
  SaveCheckpoint(out.result.best_policy(), out.best_checkpoint);
  out.dataset = (dir / "dataset.txt").string();
  out.result.dataset.Save(out.dataset);

  json iterations = json::array();
  for (const IterationLog& l : out.result.log) {
    iterations.push_back({{"iteration", l.iteration},
                          {"beta", l.beta},
                          {"dataset_size", l.dataset_size},
                          {"expert_steps", l.expert_steps},
                          {"epoch_losses", l.training.epoch_losses},
                          {"final_learning_rate", l.training.final_learning_rate},
                          {"failures", l.training.failures}});
  }
  json candidates = json::array();
  for (std::size_t i = 0; i < out.result.scores.size(); ++i) {
    const ValidationScore& s = out.result.scores[i];
    candidates.push_back({{"checkpoint", fs::path(out.checkpoints[i]).filename().string()},
                          {"success_percent", s.success_percent},
                          {"mean_cost", std::isfinite(s.mean_cost) ? json(s.mean_cost)
                                                                   : json(nullptr)}});
  }
  const json manifest = {{"config", json::parse(cfg.ToJson())},
                         {"policy_parameters", initial->num_params()},
                         {"policy_hidden", initial->hidden()},
                         {"iterations", iterations},
                         {"candidates", candidates},
                         {"best", out.result.best},
                         {"dataset_records", out.result.dataset.size()}};
  out.manifest = (dir / "manifest.json").string();
  WriteFile(out.manifest, manifest.dump(2) + "\n");
  return out;
}

bool SweepRow::operator==(const SweepRow& o) const {
  return task == o.task && parameter == o.parameter && value == o.value &&
         policy == o.policy && metrics.trials == o.metrics.trials &&
         metrics.successes == o.metrics.successes &&
         metrics.success_percent == o.metrics.success_percent &&
         metrics.mean_cost == o.metrics.mean_cost && metrics.std_cost == o.metrics.std_cost;
}

SweepResult RunSweep(const ExperimentConfig& cfg, const std::vector<NamedRunner>& runners) {
  cfg.Validate();
  const ExperimentSetup setup = BuildSetup(cfg);
  const auto grid = cfg.sweep.empty() ? DefaultSweep(cfg.task) : cfg.sweep;
  SweepResult result;
  for (const Perturbation& p : grid) {
    for (double value : p.values) {
      const auto [env, task] = Perturbed(setup, p.parameter, value);
      for (const auto& [name, runner] : runners) {
        SweepRow row;
        row.task = TaskKindName(cfg.task);
        row.parameter = p.parameter;
        row.value = value;
        row.policy = name;
        row.metrics = ComputeMetrics(RunTrials(*env, task, cfg.trials, cfg.eval_seed, runner));
        result.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

SweepResult RunSweep(const ExperimentConfig& cfg, const std::string& checkpoint) {
  if (!std::filesystem::exists(checkpoint)) {
    throw IoError("checkpoint '" + checkpoint + "' does not exist");
  }
  const auto policy = LoadCheckpoint(checkpoint);
  return RunSweep(cfg, {{PolicyKindName(policy->kind()), PolicyRunner(*policy)}});
}

std::string ReportCsv(const SweepResult& result) {
  std::string out =
      "task,params,policy,trials,successes,success_percent,mean_cost,std_cost\n";
  for (const SweepRow& r : result.rows) {
    out += r.task + "," + r.parameter + "=" + FormatDouble(r.value) + "," + r.policy + "," +
           std::to_string(r.metrics.trials) + "," + std::to_string(r.metrics.successes) + "," +
           FormatDouble(r.metrics.success_percent) + "," +
           (r.metrics.mean_cost ? FormatDouble(*r.metrics.mean_cost) : "") + "," +
           (r.metrics.std_cost ? FormatDouble(*r.metrics.std_cost) : "") + "\n";
  }
  return out;
}

SweepResult ParseReportCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int number = 1;
  if (!std::getline(in, line) ||
      line != "task,params,policy,trials,successes,success_percent,mean_cost,std_cost") {
    throw IoError("report: missing header");
  }
  SweepResult result;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 8) throw IoError("report line " + std::to_string(number) + ": 8 fields expected");
    SweepRow r;
    r.task = f[0];
    const std::size_t eq = f[1].find('=');
    if (eq == std::string::npos) {
      throw IoError("report line " + std::to_string(number) + ": bad params '" + f[1] + "'");
    }
    r.parameter = f[1].substr(0, eq);
    r.value = ParseDouble(f[1].substr(eq + 1), number);
    r.policy = f[2];
    r.metrics.trials = static_cast<int>(ParseDouble(f[3], number));
    r.metrics.successes = static_cast<int>(ParseDouble(f[4], number));
    r.metrics.success_percent = ParseDouble(f[5], number);
    if (!f[6].empty()) r.metrics.mean_cost = ParseDouble(f[6], number);
    if (!f[7].empty()) r.metrics.std_cost = ParseDouble(f[7], number);
    result.rows.push_back(std::move(r));
  }
  return result;
}

std::string ReportJson(const SweepResult& result, const ExperimentConfig& cfg) {
  json rows = json::array();
  for (const SweepRow& r : result.rows) {
    rows.push_back({{"task", r.task},
                    {"parameter", r.parameter},
                    {"value", r.value},
                    {"policy", r.policy},
                    {"trials", r.metrics.trials},
                    {"successes", r.metrics.successes},
                    {"success_percent", r.metrics.success_percent},
                    {"mean_cost", r.metrics.mean_cost ? json(*r.metrics.mean_cost) : json(nullptr)},
                    {"std_cost", r.metrics.std_cost ? json(*r.metrics.std_cost) : json(nullptr)}});
  }
  const json j = {{"config", json::parse(cfg.ToJson())},
                  {"success_threshold", kFailureCost},
                  {"rows", rows}};
  return j.dump(2) + "\n";
}

std::pair<std::string, std::string> EmitReport(const SweepResult& result,
                                               const ExperimentConfig& cfg,
                                               const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  const std::string csv = (fs::path(dir) / "report.csv").string();
  const std::string summary = (fs::path(dir) / "report.json").string();
  WriteFile(csv, ReportCsv(result));
  WriteFile(summary, ReportJson(result, cfg));
  return {csv, summary};
}

}  // namespace mpcnet
