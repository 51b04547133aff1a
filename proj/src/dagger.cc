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

#include "mpcnet/dagger.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "mpcnet/parallel.h"

namespace mpcnet {

std::vector<double> DefaultBetaSchedule() {
  return {1.0,  0.8,  0.7,  0.6,  0.5,  0.45, 0.4,  0.35, 0.30, 0.25, 0.2, 0.18,
          0.16, 0.14, 0.12, 0.10, 0.08, 0.06, 0.04, 0.02, 0.0,  0.0,  0.0};
}

double BetaAt(const std::vector<double>& schedule, int iteration) {
  if (schedule.empty()) throw ConfigError("beta schedule is empty");
  if (iteration < 1) throw ConfigError("iterations are numbered from 1");
  const std::size_t i = std::min(static_cast<std::size_t>(iteration), schedule.size());
  return schedule[i - 1];
}

void ValidateBetaSchedule(const std::vector<double>& schedule) {
  if (schedule.empty()) throw ConfigError("beta schedule is empty");
  for (double b : schedule) {
    if (!(b >= 0.0 && b <= 1.0)) {
      throw ConfigError("beta schedule entries must lie in [0, 1], got " + std::to_string(b));
    }
  }
}

// ---- dataset ----

void Dataset::Append(std::vector<Record> records) {
  records_.insert(records_.end(), std::make_move_iterator(records.begin()),
                  std::make_move_iterator(records.end()));
}

std::size_t Dataset::CountIteration(int iteration) const {
  return static_cast<std::size_t>(std::count_if(
      records_.begin(), records_.end(),
      [iteration](const Record& r) { return r.iteration == iteration; }));
}

namespace {

void AppendValues(std::string& out, const char* key, const std::vector<double>& v) {
  out += ' ';
  out += key;
  out += '=';
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), i == 0 ? "%.17g" : ",%.17g", v[i]);
    out += buf;
  }
}

std::vector<double> ParseValues(const std::string& s, int line) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    const std::string item = s.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') {
      throw IoError("dataset line " + std::to_string(line) + ": bad number '" + item + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

int ParseInt(const std::string& s, int line) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') {
    throw IoError("dataset line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

std::string Dataset::ToString() const {
  std::string out;
  for (const Record& r : records_) {
    out += "iteration=" + std::to_string(r.iteration) +
           " episode=" + std::to_string(r.episode) +
           " timestep=" + std::to_string(r.timestep) +
           " phase=" + std::to_string(r.phase) +
           " applied=" + (r.expert_applied ? "expert" : "learner");
    AppendValues(out, "state", r.state);
    AppendValues(out, "obs", r.observation);
    AppendValues(out, "warm", r.learner_warm);
    AppendValues(out, "output", r.learner_output);
    AppendValues(out, "target", r.target);
    out += '\n';
  }
  return out;
}

Dataset Dataset::FromString(const std::string& text) {
  Dataset d;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::map<std::string, std::string> fields;
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        throw IoError("dataset line " + std::to_string(number) + ": field '" + tok +
                      "' has no '='");
      }
      fields[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto get = [&](const char* key) -> const std::string& {
      auto it = fields.find(key);
      if (it == fields.end()) {
        throw IoError("dataset line " + std::to_string(number) + ": missing '" + key + "'");
      }
      return it->second;
    };
    Record r;
    r.iteration = ParseInt(get("iteration"), number);
    r.episode = ParseInt(get("episode"), number);
    r.timestep = ParseInt(get("timestep"), number);
    r.phase = ParseInt(get("phase"), number);
    const std::string& applied = get("applied");
    if (applied != "expert" && applied != "learner") {
      throw IoError("dataset line " + std::to_string(number) + ": bad applied '" + applied + "'");
    }
    r.expert_applied = applied == "expert";
    r.state = ParseValues(get("state"), number);
    r.observation = ParseValues(get("obs"), number);
    r.learner_warm = ParseValues(get("warm"), number);
    r.learner_output = ParseValues(get("output"), number);
    r.target = ParseValues(get("target"), number);
    if (fields.size() != 10) {
      throw IoError("dataset line " + std::to_string(number) + ": unexpected fields");
    }
    d.records_.push_back(std::move(r));
  }
  return d;
}

void Dataset::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset '" + path + "'");
  out << ToString();
  if (!out) throw IoError("failed writing dataset '" + path + "'");
}

Dataset Dataset::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read dataset '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return FromString(ss.str());
}

// ---- collection ----

namespace {

std::vector<Record> CollectEpisode(int iteration, int episode, double beta,
                                   bool sequence_mode, const Policy& learner,
                                   const Environment& env, const Task& task,
                                   const ExpertSetup& expert, std::uint64_t base_seed) {
  const std::uint64_t seed =
      DeriveSeed(base_seed, {static_cast<std::uint64_t>(iteration),
                             static_cast<std::uint64_t>(episode)});
  Rng init_rng(DeriveSeed(seed, {0}));
  Rng plan_rng(DeriveSeed(seed, {1}));
  Rng env_rng(DeriveSeed(seed, {2}));
  Rng mix_rng(DeriveSeed(seed, {3}));
  Rng learner_rng(DeriveSeed(seed, {4}));
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const InitialCondition init = SampleInitialState(task, init_rng);
  auto episode_env = EpisodeEnvironment(env, task, init.phase);
  const RunningCost q = MakeRunningCost(task, expert.weights, init.phase);
  auto policy = learner.Clone();
  policy->Reset();

  const std::size_t m = env.control_dim();
  ControlSeq expert_warm(static_cast<std::size_t>(expert.mppi.horizon), m, 0.0);
  ControlSeq learner_warm =
      sequence_mode ? ControlSeq(learner.dims().horizon, m, 0.0) : ControlSeq();
  StateVec x = init.state;
  std::vector<Record> records;
  for (int t = 0; t < task.episode_steps; ++t) {
    ControlSeq plan = ExpertPlan(env, x, expert_warm, expert.mppi, q, t, plan_rng);
    Record r;
    r.iteration = iteration;
    r.episode = episode;
    r.timestep = t;
    r.phase = init.phase;
    r.state = x;
    r.observation = episode_env->Observe(x, t);
    ControlSeq out = policy->Act(r.observation, learner_warm, learner_rng);
    r.expert_applied = coin(mix_rng) < beta;
    r.learner_warm = learner_warm.values();
    r.learner_output = out.values();
    r.target = sequence_mode ? plan.values() : plan.first();
    const ControlVec u = r.expert_applied ? plan.first() : out.first();
    records.push_back(std::move(r));

    auto next = env.Step(x, u, env_rng);
    if (!next) break;
    x = *next;
    expert_warm = ShiftWarmStart(plan);
    if (sequence_mode) learner_warm = ShiftWarmStart(out);
  }
  return records;
}

void CollectIteration(int iteration, double beta, bool sequence_mode,
                      const Policy& learner, const Environment& env, const Task& task,
                      const ExpertSetup& expert, const CollectConfig& cfg,
                      Dataset& dataset) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
  if (cfg.episodes < 1) throw ConfigError("at least one episode per iteration is required");
  if (learner.dims().control_dim != env.control_dim()) {
    throw ConfigError("learner and environment control dims differ");
  }
  if (sequence_mode && learner.dims().horizon != static_cast<std::size_t>(expert.mppi.horizon)) {
    throw ConfigError("learner horizon " + std::to_string(learner.dims().horizon) +
                      " differs from expert horizon " + std::to_string(expert.mppi.horizon));
  }
  std::vector<std::vector<Record>> episodes(static_cast<std::size_t>(cfg.episodes));
  ParallelFor(episodes.size(), [&](std::size_t e) {
    episodes[e] = CollectEpisode(iteration, static_cast<int>(e), beta, sequence_mode,
                                 learner, env, task, expert, cfg.seed);
  });
  for (auto& records : episodes) dataset.Append(std::move(records));
}

}  // namespace

void VanillaDaggerIteration(int iteration, double beta, const Policy& learner,
                            const Environment& env, const Task& task,
                            const ExpertSetup& expert, const CollectConfig& cfg,
                            Dataset& dataset) {
  if (IsSequencePolicy(learner.kind())) {
    throw ConfigError("vanilla DAgger needs a reactive learner, got " +
                      PolicyKindName(learner.kind()));
  }
  CollectIteration(iteration, beta, false, learner, env, task, expert, cfg, dataset);
}

void MpcDaggerIteration(int iteration, double beta, const Policy& learner,
                        const Environment& env, const Task& task,
                        const ExpertSetup& expert, const CollectConfig& cfg,
                        Dataset& dataset) {
  if (!IsSequencePolicy(learner.kind())) {
    throw ConfigError("MPC-DAgger needs a sequence learner, got " +
                      PolicyKindName(learner.kind()));
  }
  CollectIteration(iteration, beta, true, learner, env, task, expert, cfg, dataset);
}

std::vector<Example> BuildExamples(const Dataset& dataset, PolicyKind kind) {
  std::vector<Example> out;
  if (kind != PolicyKind::kRnn) {
    out.reserve(dataset.size());
    for (const Record& r : dataset.records()) {
      out.push_back({{Sample{r.observation, r.learner_warm, r.target}}});
    }
    return out;
  }
  std::map<std::pair<int, int>, std::vector<const Record*>> episodes;
  for (const Record& r : dataset.records()) {
    episodes[{r.iteration, r.episode}].push_back(&r);
  }
  for (auto& [key, records] : episodes) {
    std::sort(records.begin(), records.end(),
              [](const Record* a, const Record* b) { return a->timestep < b->timestep; });
    Example ex;
    for (const Record* r : records) ex.steps.push_back({r->observation, {}, r->target});
    out.push_back(std::move(ex));
  }
  return out;
}

// ---- selection ----

ValidationScore ScorePolicy(const Policy& policy, const Environment& env,
                            const Task& task, int episodes, std::uint64_t seed) {
  const auto costs = RunTrials(env, task, episodes, seed, PolicyRunner(policy));
  const Metrics m = ComputeMetrics(costs);
  return {m.success_percent, m.mean_cost.value_or(std::numeric_limits<double>::infinity())};
}

std::size_t SelectBest(const std::vector<ValidationScore>& scores) {
  if (scores.empty()) throw Error("select_best: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const auto& a = scores[i];
    const auto& b = scores[best];
    if (a.success_percent > b.success_percent ||
        (a.success_percent == b.success_percent && a.mean_cost <= b.mean_cost)) {
      best = i;
    }
  }
  return best;
}

DaggerResult RunDagger(const Policy& initial, const Environment& env, const Task& task,
                       const ExpertSetup& expert, const DaggerConfig& cfg,
                       const IterationCallback& on_iteration) {
  if (cfg.iterations < 1) throw ConfigError("at least one DAgger iteration is required");
  ValidateBetaSchedule(cfg.beta);
  cfg.train.Validate();
  const bool sequence_mode = IsSequencePolicy(initial.kind());
  DaggerResult result;
  result.policies.push_back(initial.Clone());
  for (int i = 1; i <= cfg.iterations; ++i) {
    const double beta = BetaAt(cfg.beta, i);
    const Policy& learner = *result.policies.back();
    const std::size_t before = result.dataset.size();
    if (sequence_mode) {
      MpcDaggerIteration(i, beta, learner, env, task, expert, cfg.collect, result.dataset);
    } else {
      VanillaDaggerIteration(i, beta, learner, env, task, expert, cfg.collect, result.dataset);
    }
    IterationLog log;
    log.iteration = i;
    log.beta = beta;
    log.dataset_size = result.dataset.size();
    for (std::size_t r = before; r < result.dataset.size(); ++r) {
      if (result.dataset.records()[r].expert_applied) ++log.expert_steps;
    }
    auto next = learner.Clone();
    const auto examples = BuildExamples(result.dataset, initial.kind());
    Rng train_rng(DeriveSeed(cfg.collect.seed, {static_cast<std::uint64_t>(i), 0x7a11}));
    log.training = TrainPolicy(*next, examples, cfg.train, train_rng);
    result.policies.push_back(std::move(next));
    result.log.push_back(log);
    if (on_iteration) on_iteration(log, *result.policies.back());
  }
  for (const auto& p : result.policies) {
    result.scores.push_back(
        ScorePolicy(*p, env, task, cfg.validation_episodes, cfg.validation_seed));
  }
  result.best = SelectBest(result.scores);
  return result;
}

}  // namespace mpcnet
