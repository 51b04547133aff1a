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
"""Imitation learning of sampling-based MPC experts."""

import json

from mpcnet._core import (
    ConfigError,
    IoError,
    NumericError,
    Policy,
    ShapeError,
    compute_metrics,
    grad_check,
    path_integral_update,
)
from mpcnet import _core


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def resolve_config(config):
    """Returns the fully resolved config as a dict."""
    return json.loads(_core.resolve_config(_text(config)))


def expert_metrics(config):
    return _core.expert_metrics(_text(config))


def train(config):
    return _core.train(_text(config))


def sweep(config, checkpoint):
    return _core.sweep(_text(config), checkpoint)


__all__ = [
    "ConfigError", "IoError", "NumericError", "Policy", "ShapeError",
    "compute_metrics", "expert_metrics", "grad_check", "path_integral_update",
    "resolve_config", "sweep", "train",
]
