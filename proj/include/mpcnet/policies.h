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

#ifndef MPCNET_POLICIES_H_
#define MPCNET_POLICIES_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpcnet/autodiff.h"
#include "mpcnet/network.h"
#include "mpcnet/pinet.h"
#include "mpcnet/types.h"

namespace mpcnet {

enum class PolicyKind { kFnn, kRnn, kMpcFnn, kMpcRnn, kPiNet };

std::string PolicyKindName(PolicyKind kind);  // fnn, rnn, mpc_fnn, mpc_rnn, pinet
PolicyKind ParsePolicyKind(std::string_view name);
// Kinds that take a warm start and emit a whole control sequence.
bool IsSequencePolicy(PolicyKind kind);

struct PolicyDims {
  std::size_t obs_dim = 0;
  std::size_t control_dim = 0;
  std::size_t horizon = 1;  // output rows of sequence policies
  std::vector<double> control_lower;
  std::vector<double> control_upper;

  // Largest control magnitude; normalizes control-valued network inputs.
  double control_scale() const;
  void Validate() const;
};

// One supervised step: observation, learner warm start (sequence kinds,
// [H*m]) and the expert target ([m] or [H*m]).
struct Sample {
  std::vector<double> obs;
  std::vector<double> warm;
  std::vector<double> target;
};

// Training unit: a single sample, or a whole episode for the vanilla RNN.
struct Example {
  std::vector<Sample> steps;
};

struct LossOptions {
  int bptt_truncation = 0;  // 0 = full episode
};

class Policy {
 public:
  virtual ~Policy() = default;

  PolicyKind kind() const { return kind_; }
  const PolicyDims& dims() const { return dims_; }
  std::size_t hidden() const { return hidden_; }
  const ParamSet& params() const { return params_; }
  ParamSet& mutable_params() { return params_; }
  std::size_t num_params() const { return params_.num_values(); }
  // Rows of the emitted control sequence.
  std::size_t output_horizon() const {
    return IsSequencePolicy(kind_) ? dims_.horizon : 1;
  }

  virtual std::unique_ptr<Policy> Clone() const = 0;
  // Clears recurrent state at the start of an episode.
  virtual void Reset() {}

  // Clamped controls for the current observation. Reactive kinds ignore
  // `warm` and return one row.
  ControlSeq Act(std::span<const double> obs, const ControlSeq& warm, Rng& rng);

  // Mean squared error over every target entry of the batch, built from the
  // given parameter tensors (tape leaves or constants).
  virtual ad::Tensor Loss(std::span<const ad::Tensor> p,
                          std::span<const Example* const> batch,
                          const LossOptions& options, Rng& rng) const = 0;

 protected:
  Policy(PolicyKind kind, PolicyDims dims, std::size_t hidden)
      : kind_(kind), dims_(std::move(dims)), hidden_(hidden) {}

  // Unclamped output, [output_horizon x m] flattened.
  virtual std::vector<double> Forward(std::span<const double> obs,
                                      std::span<const double> warm, Rng& rng) = 0;

  void CheckObs(std::span<const double> obs) const;

  PolicyKind kind_;
  PolicyDims dims_;
  std::size_t hidden_;
  ParamSet params_;
};

// u = W2 tanh(W1 x + b1) + b2.
class FnnPolicy final : public Policy {
 public:
  FnnPolicy(PolicyDims dims, std::size_t hidden, Rng& rng);
  std::unique_ptr<Policy> Clone() const override;
  ad::Tensor Loss(std::span<const ad::Tensor> p, std::span<const Example* const> batch,
                  const LossOptions& options, Rng& rng) const override;

 protected:
  std::vector<double> Forward(std::span<const double> obs, std::span<const double> warm,
                              Rng& rng) override;
};

// h' = tanh(W [h, x] + b); u = W_o h' + b_o. Consumes one observation per
// call and carries h across the episode.
class RnnPolicy final : public Policy {
 public:
  RnnPolicy(PolicyDims dims, std::size_t hidden, Rng& rng);
  std::unique_ptr<Policy> Clone() const override;
  void Reset() override;
  const std::vector<double>& state() const { return h_; }
  ad::Tensor Loss(std::span<const ad::Tensor> p, std::span<const Example* const> batch,
                  const LossOptions& options, Rng& rng) const override;

 protected:
  std::vector<double> Forward(std::span<const double> obs, std::span<const double> warm,
                              Rng& rng) override;

 private:
  std::vector<double> h_;
};

// [x, warm / scale] -> tanh hidden -> H*m outputs.
class MpcFnnPolicy final : public Policy {
 public:
  MpcFnnPolicy(PolicyDims dims, std::size_t hidden, Rng& rng);
  std::unique_ptr<Policy> Clone() const override;
  ad::Tensor Loss(std::span<const ad::Tensor> p, std::span<const Example* const> batch,
                  const LossOptions& options, Rng& rng) const override;

 protected:
  std::vector<double> Forward(std::span<const double> obs, std::span<const double> warm,
                              Rng& rng) override;
};

// h_0 = W_e x + b_e; h_{t+1} = tanh(W [h_t, warm_t / scale] + b);
// u_t = W_o h_{t+1} + b_o.
class MpcRnnPolicy final : public Policy {
 public:
  MpcRnnPolicy(PolicyDims dims, std::size_t hidden, Rng& rng);
  std::unique_ptr<Policy> Clone() const override;
  ad::Tensor Loss(std::span<const ad::Tensor> p, std::span<const Example* const> batch,
                  const LossOptions& options, Rng& rng) const override;

 protected:
  std::vector<double> Forward(std::span<const double> obs, std::span<const double> warm,
                              Rng& rng) override;
};

// The differentiable planner as a policy. Evaluation uses eval_samples and
// eval_iterations; training uses the train_ counterparts.
class PiNetPolicy final : public Policy {
 public:
  PiNetPolicy(PolicyDims dims, PiNetConfig cfg, Rng& rng);
  std::unique_ptr<Policy> Clone() const override;
  const PiNetConfig& config() const { return cfg_; }
  PiNetConfig& mutable_config() { return cfg_; }
  ad::Tensor Loss(std::span<const ad::Tensor> p, std::span<const Example* const> batch,
                  const LossOptions& options, Rng& rng) const override;

 protected:
  std::vector<double> Forward(std::span<const double> obs, std::span<const double> warm,
                              Rng& rng) override;

 private:
  PiNetConfig cfg_;
};

// Trainable parameter count of `kind` at hidden width `hidden`.
std::size_t PolicyParamCount(PolicyKind kind, const PolicyDims& dims,
                             std::size_t hidden, const PiNetConfig& pinet);

// Hidden width whose parameter count is closest to `target`.
std::size_t ParityHiddenWidth(PolicyKind kind, const PolicyDims& dims,
                              std::size_t target);

struct PolicySpec {
  PolicyKind kind = PolicyKind::kMpcRnn;
  // 0 sizes the network to match `parity_target` parameters.
  std::size_t hidden = 0;
  // 0 means the parameter count of the configured planner.
  std::size_t parity_target = 0;
  PiNetConfig pinet;
};

std::size_t ParityTarget(const PolicySpec& spec, const PolicyDims& dims);
std::unique_ptr<Policy> MakePolicy(const PolicySpec& spec, const PolicyDims& dims,
                                   Rng& rng);

struct ParityEntry {
  PolicyKind kind;
  std::size_t hidden;
  std::size_t params;
};

// Hidden widths and parameter counts for all five kinds under `spec`'s
// sizing rule; throws if any count is outside 10% of the target.
std::vector<ParityEntry> ParityReport(const PolicySpec& spec, const PolicyDims& dims);

// Header line (JSON) followed by one value per line.
void SaveCheckpoint(const Policy& policy, const std::string& path);
std::unique_ptr<Policy> LoadCheckpoint(const std::string& path);
std::string CheckpointToString(const Policy& policy);
std::unique_ptr<Policy> CheckpointFromString(const std::string& text);

}  // namespace mpcnet

#endif  // MPCNET_POLICIES_H_
