# Copyright 2026 The mpcnet Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
import math

import pytest

import mpcnet


def test_metrics_over_successes_only():
    m = mpcnet.compute_metrics([50.0, 150.0])
    assert m["success_percent"] == 50.0
    assert m["mean_cost"] == 50.0
    assert m["std_cost"] == 0.0
    assert mpcnet.compute_metrics([101.0])["mean_cost"] is None


def test_resolved_config_and_unknown_keys():
    cfg = mpcnet.resolve_config({"task": "quad-circle"})
    assert cfg["episode_steps"] == 150
    assert cfg["evaluation"]["episode_steps"] == 750
    assert cfg["mppi"]["horizon"] == 20
    with pytest.raises(mpcnet.ConfigError):
        mpcnet.resolve_config({"policy": {"knid": "fnn"}})


def test_update_with_equal_costs_averages_noise():
    u = [0.0, 1.0]
    noise = [0.1, 0.2, 0.3, 0.4]  # K=2, H=2
    out = mpcnet.path_integral_update(u, noise, [3.0, 3.0], 1.0, 0.04)
    assert out == pytest.approx([0.2 / 0.2, 1.0 + 0.3 / 0.2])


def test_grad_check_suite_passes():
    for name, err, tol in mpcnet.grad_check():
        assert err < tol, name


def test_train_then_sweep(tmp_path):
    cfg = {
        "episode_steps": 10,
        "policy": {"kind": "mpc_rnn", "hidden": 8},
        "mppi": {"num_samples": 20},
        "dagger": {"iterations": 1, "episodes": 2, "validation_episodes": 2},
        "training": {"epochs": 2},
        "evaluation": {"trials": 4, "episode_steps": 20},
        "sweep": [{"parameter": "pole_length", "values": [0.5, 0.7]}],
        "output_dir": str(tmp_path),
    }
    out = mpcnet.train(cfg)
    assert out["dataset_size"] == 20
    policy = mpcnet.Policy.load(out["best_checkpoint"])
    assert policy.kind == "mpc_rnn"
    u = policy.act([0.0, 1.0, 0.0, 0.0, 0.0])
    assert len(u) == policy.horizon
    assert all(math.isfinite(v) and abs(v) <= 10.0 for v in u)
    rows, csv = mpcnet.sweep(cfg, out["best_checkpoint"])
    assert [r["value"] for r in rows] == [0.5, 0.7]
    assert csv.count("\n") == 3
    assert rows == mpcnet.sweep(cfg, out["best_checkpoint"])[0]
    with pytest.raises(mpcnet.IoError):
        mpcnet.sweep(cfg, str(tmp_path / "missing.ckpt"))
