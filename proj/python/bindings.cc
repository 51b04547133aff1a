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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mpcnet/experiment.h"
#include "mpcnet/gradcheck.h"
#include "mpcnet/update_rule.h"

namespace py = pybind11;
using namespace mpcnet;

namespace {

py::dict MetricsDict(const Metrics& m) {
  py::dict d;
  d["trials"] = m.trials;
  d["successes"] = m.successes;
  d["success_percent"] = m.success_percent;
  d["mean_cost"] = m.mean_cost ? py::cast(*m.mean_cost) : py::none();
  d["std_cost"] = m.std_cost ? py::cast(*m.std_cost) : py::none();
  return d;
}

py::list RowsList(const SweepResult& r) {
  py::list rows;
  for (const SweepRow& row : r.rows) {
    py::dict d = MetricsDict(row.metrics);
    d["task"] = row.task;
    d["parameter"] = row.parameter;
    d["value"] = row.value;
    d["policy"] = row.policy;
    rows.append(d);
  }
  return rows;
}

// Policy handle that owns its recurrent state and sampling stream.
class PolicyHandle {
 public:
  explicit PolicyHandle(std::unique_ptr<Policy> p) : policy_(std::move(p)) {}

  std::vector<double> Act(const std::vector<double>& obs, const std::vector<double>& warm) {
    const PolicyDims& d = policy_->dims();
    ControlSeq w;
    if (IsSequencePolicy(policy_->kind())) {
      w = warm.empty() ? ControlSeq(d.horizon, d.control_dim)
                       : ControlSeq(d.horizon, d.control_dim, warm);
    }
    return policy_->Act(obs, w, rng_).values();
  }

  void Reset() { policy_->Reset(); }
  void Seed(std::uint64_t s) { rng_.seed(s); }
  const Policy& policy() const { return *policy_; }

 private:
  std::unique_ptr<Policy> policy_;
  Rng rng_{0};
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sampling-MPC imitation learning core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("resolve_config", [](const std::string& text) {
    return ExperimentConfig::FromJson(text).ToJson();
  }, py::arg("config_json"), "Validated config with all defaults filled in (JSON text).");

  m.def("compute_metrics", [](const std::vector<double>& costs) {
    return MetricsDict(ComputeMetrics(costs));
  }, py::arg("costs"));

  m.def("expert_metrics", [](const std::string& text) {
    const ExperimentConfig cfg = ExperimentConfig::FromJson(text);
    const ExperimentSetup s = BuildSetup(cfg);
    py::gil_scoped_release release;
    const Metrics metrics = ComputeMetrics(RunTrials(
        *s.env, s.eval_task, cfg.trials, cfg.eval_seed, ExpertRunner(s.expert.mppi, s.expert.weights)));
    py::gil_scoped_acquire acquire;
    return MetricsDict(metrics);
  }, py::arg("config_json"));

  m.def("train", [](const std::string& text) {
    const ExperimentConfig cfg = ExperimentConfig::FromJson(text);
    TrainingArtifacts out;
    {
      py::gil_scoped_release release;
      out = RunTraining(cfg);
    }
    py::dict d;
    d["checkpoints"] = out.checkpoints;
    d["best_checkpoint"] = out.best_checkpoint;
    d["dataset"] = out.dataset;
    d["manifest"] = out.manifest;
    d["best"] = out.result.best;
    d["dataset_size"] = out.result.dataset.size();
    return d;
  }, py::arg("config_json"));

  m.def("sweep", [](const std::string& text, const std::string& checkpoint) {
    const ExperimentConfig cfg = ExperimentConfig::FromJson(text);
    SweepResult r;
    {
      py::gil_scoped_release release;
      r = RunSweep(cfg, checkpoint);
    }
    return py::make_tuple(RowsList(r), ReportCsv(r));
  }, py::arg("config_json"), py::arg("checkpoint"),
     "Returns (rows, csv_text) for the configured grid.");

  m.def("grad_check", [] {
    py::list out;
    for (const GradCheckCase& c : RunGradCheckSuite()) {
      out.append(py::make_tuple(c.name, c.error, c.tolerance));
    }
    return out;
  });

  m.def("path_integral_update",
        [](const std::vector<double>& u, const std::vector<double>& noise,
           const std::vector<double>& costs, double lambda, double dt) {
          const std::size_t k = costs.size(), h = u.size();
          if (k == 0 || noise.size() != k * h) throw ShapeError("noise must hold K*H values");
          return PathIntegralUpdate(ad::Tensor::Matrix(h, 1, u),
                                    ad::Tensor({k, h, 1}, noise), ad::Tensor::Vector(costs),
                                    lambda, dt)
              .ToVector();
        },
        py::arg("u"), py::arg("noise"), py::arg("costs"), py::arg("lam"), py::arg("dt"),
        "Single-channel update; noise is laid out [K][H].");

  py::class_<PolicyHandle>(m, "Policy")
      .def_static("load", [](const std::string& path) {
        return PolicyHandle(LoadCheckpoint(path));
      })
      .def("act", &PolicyHandle::Act, py::arg("obs"), py::arg("warm") = std::vector<double>{})
      .def("reset", &PolicyHandle::Reset)
      .def("seed", &PolicyHandle::Seed)
      .def_property_readonly("kind", [](const PolicyHandle& p) {
        return PolicyKindName(p.policy().kind());
      })
      .def_property_readonly("num_params", [](const PolicyHandle& p) {
        return p.policy().num_params();
      })
      .def_property_readonly("horizon", [](const PolicyHandle& p) {
        return p.policy().dims().horizon;
      });
}
