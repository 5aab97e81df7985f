# Copyright 2026 The Scenic Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Scenario analysis by maximum-entropy reweighting.

Scenarios are plain dicts (or JSON strings) of the form
``{"constraints": [{"feature": ..., "statistic": ..., "relation": ...,
"target": {"mode": ..., "value": ...}}]}``. Every call returns the same JSON
document the command-line tool writes, decoded into Python objects.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

from . import _scenic
from ._scenic import (
    DataError,
    Dataset,
    InfeasibleScenario,
    ScenarioError,
    ScenicError,
    UsageError,
)

__all__ = [
    "Dataset",
    "DataError",
    "InfeasibleScenario",
    "ScenarioError",
    "ScenicError",
    "UsageError",
    "bootstrap",
    "criteo_like",
    "criteo_repro",
    "diagnose",
    "infeasibility_report",
    "load_criteo",
    "load_csv",
    "match",
    "planted_tilt",
    "solve",
    "sweep",
    "validate_scenario",
]

__version__ = "0.1.0"

ScenarioLike = Union[None, str, Mapping[str, Any]]

load_csv = _scenic.load_csv
load_criteo = _scenic.load_criteo
criteo_like = _scenic.criteo_like


def _text(scenario: ScenarioLike) -> str:
    if scenario is None:
        return ""
    if isinstance(scenario, str):
        return scenario
    return json.dumps(scenario)


def _metrics(ds: Dataset, metrics: Optional[Iterable[str]]) -> list:
    if metrics is None:
        return [n for n in ds.names if ds.kind(n) == "metric"]
    if isinstance(metrics, str):
        return [metrics]
    return list(metrics)


def infeasibility_report(exc: InfeasibleScenario) -> dict:
    """Decoded report carried by an InfeasibleScenario exception."""
    return json.loads(exc.args[1])


def validate_scenario(scenario: ScenarioLike) -> dict:
    """Parse strictly and return the normalized scenario."""
    return json.loads(_scenic.validate_scenario(_text(scenario)))


def solve(ds: Dataset, scenario: ScenarioLike = None, metrics=None,
          threshold: float = 10.0):
    """Solve for scenario weights.

    Returns ``(document, weights)``; weights is a numpy array summing to 1.
    Raises InfeasibleScenario when no weights can satisfy the scenario.
    """
    doc, weights = _scenic.solve(ds, _text(scenario), _metrics(ds, metrics), threshold)
    return json.loads(doc), weights


def bootstrap(ds: Dataset, scenario: ScenarioLike = None, metrics=None, *,
              B: int = 199, m: int = 10000, seed: int = 0,
              mode: str = "bootstrap") -> dict:
    return json.loads(_scenic.bootstrap(ds, _text(scenario), _metrics(ds, metrics),
                                        B, m, seed, mode))


def diagnose(ds: Dataset, scenario: ScenarioLike = None, *, threshold: float = 10.0,
             spread_features: Sequence[str] = (),
             multiples: Sequence[float] = (1.0, 1.04, 1.08, 1.12)) -> dict:
    mult = list(multiples) if spread_features else []
    return json.loads(_scenic.diagnose(ds, _text(scenario), threshold,
                                       list(spread_features), mult))


def sweep(ds: Dataset, templates: ScenarioLike, grids: Sequence[Sequence[float]],
          metric: str, *, base: ScenarioLike = None, B: int = 199, m: int = 10000,
          seed: int = 0, level: Optional[float] = None) -> dict:
    """Sweep the targets of the first one or two template constraints."""
    return json.loads(_scenic.sweep(ds, _text(templates), [list(g) for g in grids],
                                    metric, _text(base), B, m, seed, level))


def match(control: Dataset, treatment: Dataset, metric: str, *,
          features: Sequence[str] = (), caliper: Optional[float] = None,
          accept_nonconverged: bool = False) -> dict:
    return json.loads(_scenic.match(control, treatment, list(features), metric,
                                    caliper, accept_nonconverged))


def criteo_repro(ds: Dataset, *, features: Sequence[str] = (),
                 targets: Sequence[float] = (), B: int = 199, m: int = 10000,
                 seed: int = 7, match_rows: int = 200000) -> dict:
    return json.loads(_scenic.criteo_repro(ds, list(features), list(targets), B, m,
                                           seed, match_rows))


def planted_tilt(n: int, tilt: Sequence[float], *, n_treatment: int = 0, seed: int = 0):
    """Synthetic control/treatment pair with exact tilted means.

    Returns ``(control, treatment, truth)``.
    """
    return _scenic.planted_tilt(n, n_treatment, list(tilt), seed)
