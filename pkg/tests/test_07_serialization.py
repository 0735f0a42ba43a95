from __future__ import annotations

import json
import math

import numpy as np
import pytest

from pychoquet.capacity import additive_mobius
from pychoquet.exceptions import InvalidFileFormat
from pychoquet.serialization import (
    capacity_from_dict,
    dump_json,
    load_fit_result,
    load_model,
    load_preferences,
    load_reports,
    load_transform,
    model_from_dict,
    preferences_from_dict,
    transform_from_dict,
)
from pychoquet.models.capacity_model import Capacity, MobiusRep
from pychoquet.models.fit_model import FitResult, FitStatus
from pychoquet.models.preference_model import PreferenceKind
from pychoquet.models.report_model import AxiomReport, AxiomStatus

from tests.conftest import build_model


def test_mobius_file_defaults_missing_subsets_to_zero() -> None:
    m = capacity_from_dict({"n": 2, "kind": "mobius", "values": {"1": 0.3, "2": 0.5, "1,2": 0.2}})

    assert isinstance(m, MobiusRep)
    assert m.coeffs.tolist() == [0.0, 0.3, 0.5, 0.2]


def test_capacity_file_must_list_every_subset() -> None:
    with pytest.raises(InvalidFileFormat):
        capacity_from_dict({"n": 2, "kind": "capacity", "values": {"": 0.0, "1": 0.3, "1,2": 1.0}})

    c = capacity_from_dict({"n": 2, "kind": "capacity", "values": {"": 0.0, "1": 0.3, "2": 0.6, "1,2": 1.0}})
    assert c == Capacity([0.0, 0.3, 0.6, 1.0])


@pytest.mark.parametrize(
    "payload",
    [
        {"n": 2, "kind": "mobius", "values": {"3": 1.0}},
        {"n": 2, "kind": "mobius", "values": {"one": 1.0}},
        {"n": 2, "kind": "weights", "values": {}},
        {"n": 21, "kind": "mobius", "values": {}},
        {"n": 2, "kind": "mobius", "values": {}, "extra": 1},
    ],
)
def test_malformed_capacity_files_are_rejected(payload) -> None:
    with pytest.raises(InvalidFileFormat):
        capacity_from_dict(payload)


def test_model_capacity_is_stored_as_mobius() -> None:
    model = model_from_dict(
        {
            "criteria": [
                {"name": "price", "levels": ["high", "low"], "values": [0.0, 1.0]},
                {"name": "quality", "levels": ["poor", "good"], "values": [0.0, 1.0]},
            ],
            "capacity": {"n": 2, "kind": "capacity", "values": {"": 0.0, "1": 0.3, "2": 0.6, "1,2": 1.0}},
        }
    )

    assert model.shape == (2, 2)
    assert np.allclose(model.capacity.coeffs, [0.0, 0.3, 0.6, 0.1])


def test_scale_values_must_match_levels() -> None:
    with pytest.raises(InvalidFileFormat, match="levels"):
        model_from_dict({"criteria": [{"name": "c1", "levels": [0, 1, 2], "values": [0.0, 1.0]}]})


def test_preferences_without_model_use_the_bounding_grid() -> None:
    prefs = preferences_from_dict({"kind": "ranked", "alternatives": [[0, 0], [2, 1]], "ranks": [2, 1]})

    assert prefs.kind is PreferenceKind.RANKED
    assert prefs.model.shape == (3, 2)
    assert not prefs.covers_grid


@pytest.mark.parametrize(
    "payload",
    [
        {"kind": "ranked", "alternatives": [[0, 0], [1, 1]]},
        {"kind": "ranked", "alternatives": [[0, 0], [1, 1]], "ranks": [1]},
        {"kind": "pairs", "alternatives": [[0, 0], [1, 1]], "ranks": [1, 2]},
        {"kind": "pairs", "alternatives": [], "pairs": []},
    ],
)
def test_malformed_preference_files_are_rejected(payload) -> None:
    with pytest.raises(InvalidFileFormat):
        preferences_from_dict(payload)


def test_transform_file_uses_one_based_cliques() -> None:
    change = transform_from_dict({"cliques": [[1, 3], [2]], "alpha": [2.0, 0.5]})

    assert change.cliques == [frozenset({0, 2}), frozenset({1})]
    assert change.beta == [0.0, 0.0]


def test_model_and_preferences_survive_a_file_round_trip(tmp_path) -> None:
    model = build_model([[0.0, 1.0, 2.0], [0.0, 0.5]], additive_mobius([0.4, 0.6]))
    model_path, prefs_path = tmp_path / "model.json", tmp_path / "prefs.json"
    dump_json(model, model_path)
    dump_json({"kind": "pairs", "alternatives": [[0, 0], [2, 1]], "pairs": [{"better": 1, "worse": 0}]}, prefs_path)

    loaded = load_model(model_path)
    prefs = load_preferences(prefs_path, loaded)

    assert loaded.shape == (3, 2)
    assert loaded.capacity == model.capacity
    assert prefs.pairs[0].strict
    assert prefs.compare(1, 0) == 1


def test_reports_survive_a_file_round_trip(tmp_path) -> None:
    reports = [
        AxiomReport("A3", AxiomStatus.FAIL, witnesses=[{"z": [1, 1]}], checked=4, violated=1, seed=3),
        AxiomReport("A9", AxiomStatus.NOT_APPLICABLE, notes=["not testable"]),
    ]
    path = tmp_path / "reports.json"
    dump_json(reports, path)

    loaded = load_reports(path)

    assert [report.status for report in loaded] == [AxiomStatus.FAIL, AxiomStatus.NOT_APPLICABLE]
    assert loaded[0].witnesses == [{"z": [1, 1]}]
    assert loaded[0].seed == 3
    assert loaded[1].notes == ["not testable"]


def test_fit_result_file_restores_infinite_violation(tmp_path) -> None:
    path = tmp_path / "fit.json"
    dump_json(FitResult(FitStatus.INFEASIBLE, max_violation=math.inf, message="no capacity"), path)

    loaded = load_fit_result(path)

    assert loaded.status is FitStatus.INFEASIBLE
    assert math.isinf(loaded.max_violation)
    assert loaded.message == "no capacity"


def test_unreadable_files_raise_invalid_format(tmp_path) -> None:
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")

    with pytest.raises(InvalidFileFormat):
        load_model(tmp_path / "missing.json")
    with pytest.raises(InvalidFileFormat):
        load_transform(broken)
    with pytest.raises(InvalidFileFormat):
        load_reports(broken)


def test_dump_json_handles_numpy_and_sets() -> None:
    text = dump_json({"count": np.int64(3), "values": np.array([0.5, 1.0]), "clique": frozenset({2, 1})})

    assert json.loads(text) == {"count": 3, "values": [0.5, 1.0], "clique": [1, 2]}
