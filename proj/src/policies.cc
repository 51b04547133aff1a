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

#include "mpcnet/policies.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace mpcnet {
namespace {

using ad::Tensor;

Tensor StackRows(std::size_t rows, std::size_t cols, std::vector<double> data) {
  return Tensor::Matrix(rows, cols, std::move(data));
}

// Accumulates sum of squared differences and the entry count.
struct SquaredError {
  Tensor total;
  std::size_t count = 0;

  void Add(const Tensor& predicted, const Tensor& target) {
    Tensor d = ad::Sub(predicted, target);
    Tensor s = ad::ReduceSum(ad::Mul(d, d));
    total = count == 0 ? s : ad::Add(total, s);
    count += d.size();
  }
  Tensor Mean() const {
    if (count == 0) throw Error("loss over an empty batch");
    return ad::Scale(total, 1.0 / static_cast<double>(count));
  }
};

void CheckSample(const Sample& s, std::size_t obs, std::size_t warm,
                 std::size_t target) {
  if (s.obs.size() != obs || s.warm.size() != warm || s.target.size() != target) {
    throw ShapeError("training sample: obs " + std::to_string(s.obs.size()) +
                     ", warm " + std::to_string(s.warm.size()) + ", target " +
                     std::to_string(s.target.size()) + "; expected " +
                     std::to_string(obs) + ", " + std::to_string(warm) + ", " +
                     std::to_string(target));
  }
}

void CheckSingleStep(std::span<const Example* const> batch) {
  if (batch.empty()) throw Error("loss over an empty batch");
  for (const Example* ex : batch) {
    if (ex->steps.size() != 1) {
      throw ShapeError("this policy trains on single-step examples, got " +
                       std::to_string(ex->steps.size()) + " steps");
    }
  }
}

std::vector<double> ToVector(const Tensor& t) {
  return std::vector<double>(t.data().begin(), t.data().end());
}

}  // namespace

std::string PolicyKindName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kFnn: return "fnn";
    case PolicyKind::kRnn: return "rnn";
    case PolicyKind::kMpcFnn: return "mpc_fnn";
    case PolicyKind::kMpcRnn: return "mpc_rnn";
    case PolicyKind::kPiNet: return "pinet";
  }
  return "?";
}

PolicyKind ParsePolicyKind(std::string_view name) {
  for (PolicyKind k : {PolicyKind::kFnn, PolicyKind::kRnn, PolicyKind::kMpcFnn,
                       PolicyKind::kMpcRnn, PolicyKind::kPiNet}) {
    if (PolicyKindName(k) == name) return k;
  }
  throw ConfigError("unknown policy kind '" + std::string(name) +
                    "' (expected fnn, rnn, mpc_fnn, mpc_rnn or pinet)");
}

bool IsSequencePolicy(PolicyKind kind) {
  return kind == PolicyKind::kMpcFnn || kind == PolicyKind::kMpcRnn ||
         kind == PolicyKind::kPiNet;
}

double PolicyDims::control_scale() const {
  double s = 0.0;
  for (double v : control_lower) s = std::max(s, std::abs(v));
  for (double v : control_upper) s = std::max(s, std::abs(v));
  return s > 0.0 ? s : 1.0;
}

void PolicyDims::Validate() const {
  if (obs_dim == 0 || control_dim == 0 || horizon == 0) {
    throw ConfigError("policy dims must be positive");
  }
  if (control_lower.size() != control_dim || control_upper.size() != control_dim) {
    throw ConfigError("policy control limits must have one entry per channel");
  }
  for (std::size_t j = 0; j < control_dim; ++j) {
    if (!(control_lower[j] <= control_upper[j])) {
      throw ConfigError("policy control limits are inverted");
    }
  }
}

ControlSeq Policy::Act(std::span<const double> obs, const ControlSeq& warm, Rng& rng) {
  CheckObs(obs);
  const std::size_t m = dims_.control_dim;
  if (IsSequencePolicy(kind_) && (warm.horizon() != dims_.horizon || warm.dim() != m)) {
    throw ShapeError("warm start is " + std::to_string(warm.horizon()) + "x" +
                     std::to_string(warm.dim()) + ", policy expects " +
                     std::to_string(dims_.horizon) + "x" + std::to_string(m));
  }
  std::vector<double> out = Forward(obs, warm.values(), rng);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t j = i % m;
    out[i] = std::clamp(out[i], dims_.control_lower[j], dims_.control_upper[j]);
  }
  return ControlSeq(output_horizon(), m, std::move(out));
}

void Policy::CheckObs(std::span<const double> obs) const {
  if (obs.size() != dims_.obs_dim) {
    throw ShapeError(PolicyKindName(kind_) + ": observation has " +
                     std::to_string(obs.size()) + " entries, expected " +
                     std::to_string(dims_.obs_dim));
  }
}

// ---- FNN ----

FnnPolicy::FnnPolicy(PolicyDims dims, std::size_t hidden, Rng& rng)
    : Policy(PolicyKind::kFnn, std::move(dims), hidden) {
  dims_.Validate();
  AddDenseLayer(params_, "hidden", dims_.obs_dim, hidden, rng);
  AddDenseLayer(params_, "out", hidden, dims_.control_dim, rng);
}

std::unique_ptr<Policy> FnnPolicy::Clone() const {
  return std::make_unique<FnnPolicy>(*this);
}

std::vector<double> FnnPolicy::Forward(std::span<const double> obs,
                                       std::span<const double>, Rng&) {
  auto p = params_.Constants();
  Tensor x = Tensor::Vector({obs.begin(), obs.end()});
  return ToVector(ad::Affine(p[2], ad::Tanh(ad::Affine(p[0], x, p[1])), p[3]));
}

ad::Tensor FnnPolicy::Loss(std::span<const Tensor> p,
                           std::span<const Example* const> batch,
                           const LossOptions&, Rng&) const {
  CheckSingleStep(batch);
  const std::size_t n = dims_.obs_dim, m = dims_.control_dim, b = batch.size();
  std::vector<double> x, y;
  for (const Example* ex : batch) {
    const Sample& s = ex->steps[0];
    CheckSample(s, n, 0, m);
    x.insert(x.end(), s.obs.begin(), s.obs.end());
    y.insert(y.end(), s.target.begin(), s.target.end());
  }
  Tensor out = ad::Affine(p[2], ad::Tanh(ad::Affine(p[0], StackRows(b, n, x), p[1])), p[3]);
  return MeanSquaredError(out, StackRows(b, m, y));
}

// ---- vanilla RNN ----

RnnPolicy::RnnPolicy(PolicyDims dims, std::size_t hidden, Rng& rng)
    : Policy(PolicyKind::kRnn, std::move(dims), hidden), h_(hidden, 0.0) {
  dims_.Validate();
  AddDenseLayer(params_, "cell", hidden + dims_.obs_dim, hidden, rng);
  AddDenseLayer(params_, "out", hidden, dims_.control_dim, rng);
}

std::unique_ptr<Policy> RnnPolicy::Clone() const {
  return std::make_unique<RnnPolicy>(*this);
}

void RnnPolicy::Reset() { std::fill(h_.begin(), h_.end(), 0.0); }

std::vector<double> RnnPolicy::Forward(std::span<const double> obs,
                                       std::span<const double>, Rng&) {
  auto p = params_.Constants();
  Tensor in = ad::Concat(Tensor::Vector(h_), Tensor::Vector({obs.begin(), obs.end()}));
  Tensor h = ad::Tanh(ad::Affine(p[0], in, p[1]));
  h_ = ToVector(h);
  return ToVector(ad::Affine(p[2], h, p[3]));
}

ad::Tensor RnnPolicy::Loss(std::span<const Tensor> p,
                           std::span<const Example* const> batch,
                           const LossOptions& options, Rng&) const {
  if (batch.empty()) throw Error("loss over an empty batch");
  const std::size_t n = dims_.obs_dim, m = dims_.control_dim;
  // Longest first, so the rows still running at step t are a prefix.
  std::vector<const Example*> order(batch.begin(), batch.end());
  std::stable_sort(order.begin(), order.end(), [](const Example* a, const Example* b) {
    return a->steps.size() > b->steps.size();
  });
  const std::size_t longest = order.front()->steps.size();
  if (order.back()->steps.empty()) throw ShapeError("rnn: empty episode in batch");

  std::size_t rows = order.size();
  Tensor h = Tensor::Zeros({rows, hidden_});
  SquaredError err;
  for (std::size_t t = 0; t < longest; ++t) {
    std::size_t active = 0;
    while (active < order.size() && order[active]->steps.size() > t) ++active;
    if (active < rows) {
      h = ad::Slice(h, 0, active);
      rows = active;
    }
    if (options.bptt_truncation > 0 && t > 0 &&
        t % static_cast<std::size_t>(options.bptt_truncation) == 0) {
      h = h.Detached();
    }
    std::vector<double> x, y;
    for (std::size_t r = 0; r < rows; ++r) {
      const Sample& s = order[r]->steps[t];
      CheckSample(s, n, 0, m);
      x.insert(x.end(), s.obs.begin(), s.obs.end());
      y.insert(y.end(), s.target.begin(), s.target.end());
    }
    h = ad::Tanh(ad::Affine(p[0], ad::Concat(h, StackRows(rows, n, x)), p[1]));
    err.Add(ad::Affine(p[2], h, p[3]), StackRows(rows, m, y));
  }
  return err.Mean();
}

// ---- MPC-FNN ----

MpcFnnPolicy::MpcFnnPolicy(PolicyDims dims, std::size_t hidden, Rng& rng)
    : Policy(PolicyKind::kMpcFnn, std::move(dims), hidden) {
  dims_.Validate();
  const std::size_t hm = dims_.horizon * dims_.control_dim;
  AddDenseLayer(params_, "hidden", dims_.obs_dim + hm, hidden, rng);
  AddDenseLayer(params_, "out", hidden, hm, rng);
}

std::unique_ptr<Policy> MpcFnnPolicy::Clone() const {
  return std::make_unique<MpcFnnPolicy>(*this);
}

std::vector<double> MpcFnnPolicy::Forward(std::span<const double> obs,
                                          std::span<const double> warm, Rng&) {
  auto p = params_.Constants();
  std::vector<double> x(obs.begin(), obs.end());
  const double inv = 1.0 / dims_.control_scale();
  for (double w : warm) x.push_back(w * inv);
  return ToVector(ad::Affine(p[2], ad::Tanh(ad::Affine(p[0], Tensor::Vector(x), p[1])), p[3]));
}

ad::Tensor MpcFnnPolicy::Loss(std::span<const Tensor> p,
                              std::span<const Example* const> batch,
                              const LossOptions&, Rng&) const {
  CheckSingleStep(batch);
  const std::size_t n = dims_.obs_dim, hm = dims_.horizon * dims_.control_dim;
  const double inv = 1.0 / dims_.control_scale();
  std::vector<double> x, y;
  for (const Example* ex : batch) {
    const Sample& s = ex->steps[0];
    CheckSample(s, n, hm, hm);
    x.insert(x.end(), s.obs.begin(), s.obs.end());
    for (double w : s.warm) x.push_back(w * inv);
    y.insert(y.end(), s.target.begin(), s.target.end());
  }
  const std::size_t b = batch.size();
  Tensor out =
      ad::Affine(p[2], ad::Tanh(ad::Affine(p[0], StackRows(b, n + hm, x), p[1])), p[3]);
  return MeanSquaredError(out, StackRows(b, hm, y));
}

// ---- MPC-RNN ----

MpcRnnPolicy::MpcRnnPolicy(PolicyDims dims, std::size_t hidden, Rng& rng)
    : Policy(PolicyKind::kMpcRnn, std::move(dims), hidden) {
  dims_.Validate();
  AddDenseLayer(params_, "embed", dims_.obs_dim, hidden, rng);
  AddDenseLayer(params_, "cell", hidden + dims_.control_dim, hidden, rng);
  AddDenseLayer(params_, "out", hidden, dims_.control_dim, rng);
}

std::unique_ptr<Policy> MpcRnnPolicy::Clone() const {
  return std::make_unique<MpcRnnPolicy>(*this);
}

namespace {

// Unrolls the sequence network over rows of x [B x n] and warm [B x H*m].
std::vector<Tensor> UnrollMpcRnn(std::span<const Tensor> p, const Tensor& x,
                                 std::span<const double> warm, std::size_t rows,
                                 std::size_t horizon, std::size_t m, double scale) {
  Tensor h = ad::Affine(p[0], x, p[1]);
  std::vector<Tensor> outputs;
  const double inv = 1.0 / scale;
  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<double> w(rows * m);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < m; ++j) {
        w[r * m + j] = warm[r * horizon * m + t * m + j] * inv;
      }
    }
    Tensor in = x.rank() == 1 ? Tensor::Vector(std::move(w))
                              : Tensor::Matrix(rows, m, std::move(w));
    h = ad::Tanh(ad::Affine(p[2], ad::Concat(h, in), p[3]));
    outputs.push_back(ad::Affine(p[4], h, p[5]));
  }
  return outputs;
}

}  // namespace

std::vector<double> MpcRnnPolicy::Forward(std::span<const double> obs,
                                          std::span<const double> warm, Rng&) {
  auto p = params_.Constants();
  auto outs = UnrollMpcRnn(p, Tensor::Vector({obs.begin(), obs.end()}), warm, 1,
                           dims_.horizon, dims_.control_dim, dims_.control_scale());
  std::vector<double> u;
  for (const Tensor& o : outs) u.insert(u.end(), o.data().begin(), o.data().end());
  return u;
}

ad::Tensor MpcRnnPolicy::Loss(std::span<const Tensor> p,
                              std::span<const Example* const> batch,
                              const LossOptions&, Rng&) const {
  CheckSingleStep(batch);
  const std::size_t n = dims_.obs_dim, m = dims_.control_dim, horizon = dims_.horizon;
  const std::size_t b = batch.size();
  std::vector<double> x, warm;
  for (const Example* ex : batch) {
    const Sample& s = ex->steps[0];
    CheckSample(s, n, horizon * m, horizon * m);
    x.insert(x.end(), s.obs.begin(), s.obs.end());
    warm.insert(warm.end(), s.warm.begin(), s.warm.end());
  }
  auto outs = UnrollMpcRnn(p, StackRows(b, n, std::move(x)), warm, b, horizon, m,
                           dims_.control_scale());
  SquaredError err;
  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<double> y(b * m);
    for (std::size_t r = 0; r < b; ++r) {
      const auto& target = batch[r]->steps[0].target;
      std::copy(target.begin() + t * m, target.begin() + (t + 1) * m, y.begin() + r * m);
    }
    err.Add(outs[t], StackRows(b, m, std::move(y)));
  }
  return err.Mean();
}

// ---- PI-Net ----

PiNetPolicy::PiNetPolicy(PolicyDims dims, PiNetConfig cfg, Rng& rng)
    : Policy(PolicyKind::kPiNet, std::move(dims), cfg.hidden), cfg_(std::move(cfg)) {
  dims_.Validate();
  cfg_.Validate(dims_.obs_dim, dims_.control_dim);
  AddPiNetParams(params_, dims_.control_dim, cfg_, rng);
}

std::unique_ptr<Policy> PiNetPolicy::Clone() const {
  return std::make_unique<PiNetPolicy>(*this);
}

std::vector<double> PiNetPolicy::Forward(std::span<const double> obs,
                                         std::span<const double> warm, Rng& rng) {
  auto p = params_.Constants();
  Tensor u = PiNetForward(InitHidden(obs, cfg_.hidden),
                          Tensor::Matrix(dims_.horizon, dims_.control_dim,
                                         {warm.begin(), warm.end()}),
                          PiNetWeights::From(p), cfg_, cfg_.eval_samples,
                          cfg_.eval_iterations, dims_.control_scale(), rng);
  return ToVector(u);
}

ad::Tensor PiNetPolicy::Loss(std::span<const Tensor> p,
                             std::span<const Example* const> batch,
                             const LossOptions&, Rng& rng) const {
  CheckSingleStep(batch);
  const std::size_t n = dims_.obs_dim, m = dims_.control_dim, horizon = dims_.horizon;
  const PiNetWeights w = PiNetWeights::From(p);
  SquaredError err;
  for (const Example* ex : batch) {
    const Sample& s = ex->steps[0];
    CheckSample(s, n, horizon * m, horizon * m);
    Tensor pred = PiNetForward(InitHidden(s.obs, cfg_.hidden),
                               Tensor::Matrix(horizon, m, s.warm), w, cfg_,
                               cfg_.train_samples, cfg_.train_iterations,
                               dims_.control_scale(), rng);
    err.Add(pred, Tensor::Matrix(horizon, m, s.target));
  }
  return err.Mean();
}

// ---- sizing ----

std::size_t PolicyParamCount(PolicyKind kind, const PolicyDims& dims,
                             std::size_t hidden, const PiNetConfig& pinet) {
  const std::size_t n = dims.obs_dim, m = dims.control_dim, h = hidden;
  const std::size_t hm = dims.horizon * m;
  switch (kind) {
    case PolicyKind::kFnn: return h * (n + 1) + m * (h + 1);
    case PolicyKind::kRnn: return h * (h + n + 1) + m * (h + 1);
    case PolicyKind::kMpcFnn: return h * (n + hm + 1) + hm * (h + 1);
    case PolicyKind::kMpcRnn: return h * (n + 1) + h * (h + m + 1) + m * (h + 1);
    case PolicyKind::kPiNet: return PiNetParamCount(m, pinet.hidden, pinet.cost_hidden);
  }
  return 0;
}

std::size_t ParityHiddenWidth(PolicyKind kind, const PolicyDims& dims,
                              std::size_t target) {
  if (kind == PolicyKind::kPiNet) throw ConfigError("planner width is configured directly");
  const PiNetConfig unused;
  std::size_t best = 1;
  double best_gap = INFINITY;
  for (std::size_t h = 1;; ++h) {
    const std::size_t count = PolicyParamCount(kind, dims, h, unused);
    const double gap = std::abs(static_cast<double>(count) - static_cast<double>(target));
    if (gap < best_gap) {
      best = h;
      best_gap = gap;
    }
    if (count > target) break;
  }
  return best;
}

std::size_t ParityTarget(const PolicySpec& spec, const PolicyDims& dims) {
  if (spec.parity_target > 0) return spec.parity_target;
  return PiNetParamCount(dims.control_dim, spec.pinet.hidden, spec.pinet.cost_hidden);
}

std::unique_ptr<Policy> MakePolicy(const PolicySpec& spec, const PolicyDims& dims,
                                   Rng& rng) {
  if (spec.kind == PolicyKind::kPiNet) {
    return std::make_unique<PiNetPolicy>(dims, spec.pinet, rng);
  }
  const std::size_t h =
      spec.hidden > 0 ? spec.hidden : ParityHiddenWidth(spec.kind, dims, ParityTarget(spec, dims));
  switch (spec.kind) {
    case PolicyKind::kFnn: return std::make_unique<FnnPolicy>(dims, h, rng);
    case PolicyKind::kRnn: return std::make_unique<RnnPolicy>(dims, h, rng);
    case PolicyKind::kMpcFnn: return std::make_unique<MpcFnnPolicy>(dims, h, rng);
    case PolicyKind::kMpcRnn: return std::make_unique<MpcRnnPolicy>(dims, h, rng);
    case PolicyKind::kPiNet: break;
  }
  throw ConfigError("unhandled policy kind");
}

std::vector<ParityEntry> ParityReport(const PolicySpec& spec, const PolicyDims& dims) {
  const std::size_t target = ParityTarget(spec, dims);
  std::vector<ParityEntry> out;
  for (PolicyKind k : {PolicyKind::kFnn, PolicyKind::kRnn, PolicyKind::kMpcFnn,
                       PolicyKind::kMpcRnn, PolicyKind::kPiNet}) {
    const std::size_t h = k == PolicyKind::kPiNet ? spec.pinet.hidden
                                                  : ParityHiddenWidth(k, dims, target);
    out.push_back({k, h, PolicyParamCount(k, dims, h, spec.pinet)});
  }
  for (const auto& e : out) {
    const double rel = std::abs(static_cast<double>(e.params) - static_cast<double>(target)) /
                       static_cast<double>(target);
    if (rel > 0.10) {
      throw ConfigError("parameter parity: " + PolicyKindName(e.kind) + " has " +
                        std::to_string(e.params) + " parameters, target " +
                        std::to_string(target));
    }
  }
  return out;
}

// ---- checkpoints ----

namespace {

constexpr int kCheckpointVersion = 1;
constexpr const char* kCheckpointFormat = "mpcnet-checkpoint";

nlohmann::json PiNetToJson(const PiNetConfig& c) {
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

PiNetConfig PiNetFromJson(const nlohmann::json& j) {
  PiNetConfig c;
  c.hidden = j.at("hidden").get<std::size_t>();
  c.cost_hidden = j.at("cost_hidden").get<std::size_t>();
  c.train_samples = j.at("train_samples").get<int>();
  c.train_iterations = j.at("train_iterations").get<int>();
  c.eval_samples = j.at("eval_samples").get<int>();
  c.eval_iterations = j.at("eval_iterations").get<int>();
  c.lambda = j.at("lambda").get<double>();
  c.nu = j.at("nu").get<double>();
  c.dt = j.at("dt").get<double>();
  c.sigma_sample = j.at("sigma_sample").get<std::vector<double>>();
  c.memory_budget_bytes = j.at("memory_budget_bytes").get<double>();
  return c;
}

}  // namespace

std::string CheckpointToString(const Policy& policy) {
  const PolicyDims& d = policy.dims();
  nlohmann::json header = {{"format", kCheckpointFormat},
                           {"version", kCheckpointVersion},
                           {"kind", PolicyKindName(policy.kind())},
                           {"obs_dim", d.obs_dim},
                           {"control_dim", d.control_dim},
                           {"horizon", d.horizon},
                           {"control_lower", d.control_lower},
                           {"control_upper", d.control_upper},
                           {"hidden", policy.hidden()}};
  if (const auto* pinet = dynamic_cast<const PiNetPolicy*>(&policy)) {
    header["pinet"] = PiNetToJson(pinet->config());
  }
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& e : policy.params().entries()) {
    layers.push_back({{"name", e.name}, {"shape", e.value.shape()}});
  }
  header["layers"] = layers;
  const std::vector<double> values = policy.params().Flatten();
  header["count"] = values.size();

  std::string out = header.dump() + "\n";
  char buf[40];
  for (double v : values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out += buf;
  }
  return out;
}

std::unique_ptr<Policy> CheckpointFromString(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("checkpoint: empty input");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("checkpoint: bad header: ") + e.what());
  }
  try {
    if (header.at("format") != kCheckpointFormat) throw IoError("checkpoint: wrong format tag");
    if (header.at("version") != kCheckpointVersion) {
      throw IoError("checkpoint: unsupported version " + header.at("version").dump());
    }
    PolicyDims dims;
    dims.obs_dim = header.at("obs_dim").get<std::size_t>();
    dims.control_dim = header.at("control_dim").get<std::size_t>();
    dims.horizon = header.at("horizon").get<std::size_t>();
    dims.control_lower = header.at("control_lower").get<std::vector<double>>();
    dims.control_upper = header.at("control_upper").get<std::vector<double>>();
    PolicySpec spec;
    spec.kind = ParsePolicyKind(header.at("kind").get<std::string>());
    spec.hidden = header.at("hidden").get<std::size_t>();
    if (spec.kind == PolicyKind::kPiNet) spec.pinet = PiNetFromJson(header.at("pinet"));
    Rng unused(0);
    auto policy = MakePolicy(spec, dims, unused);

    const auto& layers = header.at("layers");
    const auto& entries = policy->params().entries();
    if (layers.size() != entries.size()) throw IoError("checkpoint: layer count mismatch");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (layers[i].at("name") != entries[i].name ||
          layers[i].at("shape").get<ad::Shape>() != entries[i].value.shape()) {
        throw IoError("checkpoint: layer " + std::to_string(i) + " does not match " +
                      entries[i].name + " " + ad::ShapeToString(entries[i].value.shape()));
      }
    }
    const std::size_t count = header.at("count").get<std::size_t>();
    if (count != policy->num_params()) throw IoError("checkpoint: value count mismatch");
    std::vector<double> values;
    values.reserve(count);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      char* end = nullptr;
      const double v = std::strtod(line.c_str(), &end);
      if (end == line.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw IoError("checkpoint: bad value '" + line + "'");
      }
      values.push_back(v);
    }
    if (values.size() != count) {
      throw IoError("checkpoint: expected " + std::to_string(count) + " values, found " +
                    std::to_string(values.size()));
    }
    policy->mutable_params().Unflatten(values);
    return policy;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const Policy& policy, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  out << CheckpointToString(policy);
  if (!out) throw IoError("failed writing checkpoint '" + path + "'");
}

std::unique_ptr<Policy> LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return CheckpointFromString(ss.str());
}

}  // namespace mpcnet
