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
import json
import os
import pathlib

import numpy as np
import pytest

import scenic

FIXTURES = pathlib.Path(os.environ.get(
    "SCENIC_FIXTURE_DIR", pathlib.Path(__file__).resolve().parents[1] / "fixtures"))


def shoes():
    return scenic.load_csv(str(FIXTURES / "shoes.csv"), str(FIXTURES / "shoes.schema.json"))


def scenario(name):
    return json.loads((FIXTURES / name).read_text())


def test_solve_doubled_males():
    doc, weights = scenic.solve(shoes(), scenario("double_males.json"), ["price"])
    assert doc["status"] == "converged"
    assert round(doc["estimates"][0]["value"], 2) == 272.73
    assert doc["baseline"]["price"] == pytest.approx(1790 / 7, abs=1e-9)
    assert weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert weights[2] / weights[0] == pytest.approx(2.0, abs=1e-9)


def test_infeasible_carries_report():
    with pytest.raises(scenic.InfeasibleScenario) as info:
        scenic.solve(shoes(), scenario("male_age_100.json"), "price")
    report = scenic.infeasibility_report(info.value)
    assert report["offending_labels"] == ["male age 100"]
    assert isinstance(info.value, scenic.ScenicError)


def test_bad_scenario_and_data_errors():
    with pytest.raises(scenic.ScenarioError):
        scenic.validate_scenario({"constraints": [{"feature": "age", "bogus": 1}]})
    with pytest.raises(scenic.DataError):
        scenic.load_csv("/no/such.csv", str(FIXTURES / "shoes.schema.json"))


def test_bootstrap_is_deterministic():
    ds = shoes()
    a = scenic.bootstrap(ds, scenario("male_age_ge_65.json"), "price", B=30, m=500, seed=4)
    b = scenic.bootstrap(ds, scenario("male_age_ge_65.json"), "price", B=30, m=500, seed=4)
    assert a == b
    assert len(a["distributions"][0]["values"]) == 30
    assert a["provenance"]["seed"] == 4


def test_dataset_from_columns_and_uniform_weights():
    ds = scenic.Dataset(["x", "y"], ["numeric-feature", "metric"],
                        [[1.0, 2.0, 3.0, 4.0], [2.0, 4.0, 6.0, 8.0]])
    doc, weights = scenic.solve(ds)
    np.testing.assert_allclose(weights, 0.25, atol=1e-12)
    assert doc["estimates"][0]["value"] == pytest.approx(5.0)
    np.testing.assert_array_equal(ds.column("y"), [2.0, 4.0, 6.0, 8.0])


def test_planted_tilt_match_and_sweep():
    control, treatment, truth = scenic.planted_tilt(4000, [0.3, -0.2], n_treatment=1000, seed=2)
    m = scenic.match(control, treatment, "t")
    assert m["match"]["n_pairs"] == 1000
    assert abs(m["estimate"] - truth["t"]) < abs(m["control_mean"] - truth["t"])

    templates = {"constraints": [{"feature": "x0", "statistic": "weighted-mean",
                                  "relation": "eq",
                                  "target": {"mode": "lift-percent", "value": 0}}]}
    s = scenic.sweep(control, templates, [[-5, 0, 5]], "t", B=20, m=1000, seed=1)
    medians = [c["summary"]["median"] for c in s["sweep"]["cells"]]
    assert medians == sorted(medians)


def test_diagnose_spread():
    control, _, _ = scenic.planted_tilt(3000, [0.0, 0.0], seed=5)
    d = scenic.diagnose(control, spread_features=["x0"])
    iqr = [p["boxplot"]["q3"] - p["boxplot"]["q1"] for p in d["spread"]]
    assert iqr == sorted(iqr)
    assert d["diagnostics"]["ess_ratio"] == pytest.approx(1.0)
