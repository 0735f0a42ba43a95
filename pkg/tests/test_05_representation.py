from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from pychoquet.axioms import AxiomChecker
from pychoquet.capacity import additive_mobius, capacity_of, choquet_many, choquet_mobius, cliques_from_mobius, min_mobius, mobius_of
from pychoquet.exceptions import CliqueIncompatibility, CollapsedLevels, CriterionLimitExceeded, LemmaPreconditionError, StructuralError
from pychoquet.product import enumerate_grid, induced_order, random_model
from pychoquet.representation import RepresentationEngine
from pychoquet.suite import smallest_gap
from pychoquet.models.capacity_model import Capacity
from pychoquet.models.fit_model import CliqueTransform, FitProblem, FitResult, FitStatus
from pychoquet.models.options_model import CheckerOptions, EngineOptions
from pychoquet.models.preference_model import PreferenceKind, PreferenceStructure

from tests.conftest import build_model, value_storage


def grid_values(m, model) -> np.ndarray:
    return choquet_many(m, model.value_matrix(enumerate_grid(model)))


def test_fit_recovers_a_representation_of_an_induced_order(engine) -> None:
    for seed in range(3):
        model = random_model(3, 3, np.random.default_rng(seed))
        prefs = induced_order(model.capacity, model)
        epsilon = smallest_gap(grid_values(model.capacity, model), 1e-9) / 2

        result = engine.fit_capacity(FitProblem(model, prefs, epsilon))

        assert result.status is FitStatus.FEASIBLE
        assert result.max_violation == 0.0
        assert result.min_slack >= 0.0
        assert capacity_of(result.mobius).values[-1] == pytest.approx(1.0)
        assert engine.verify_representation(result.mobius, model, prefs, tolerance=1e-7).ok


def test_fit_handles_indifference_classes(engine, additive_model) -> None:
    prefs = induced_order(additive_model.capacity, additive_model)

    result = engine.fit_capacity(FitProblem(additive_model, prefs))

    assert result.feasible
    assert result.epsilon == pytest.approx(3e-3)
    assert engine.verify_representation(result.mobius, additive_model, prefs, tolerance=1e-7).ok


def test_dominated_preference_is_infeasible(engine, pairs_prefs) -> None:
    model = build_model([[0.0, 1.0], [0.0, 1.0]])
    prefs = pairs_prefs((2, 2), [(0, 0), (1, 1)], [(0, 1, True)])

    result = engine.fit_capacity(FitProblem(model, prefs))

    assert result.status is FitStatus.INFEASIBLE
    assert result.mobius is None
    assert result.max_violation > 1.0
    assert result.to_dict()["mobius"] is None


def test_empty_preferences_are_feasible(engine) -> None:
    model = build_model([[0.0, 1.0], [0.0, 1.0]])
    prefs = PreferenceStructure(model, [], PreferenceKind.PAIRS)

    result = engine.fit_capacity(FitProblem(model, prefs))

    assert result.feasible
    assert capacity_of(result.mobius).values[-1] == pytest.approx(1.0)


def test_fit_rejects_too_many_criteria() -> None:
    engine = RepresentationEngine(EngineOptions(criterion_limit=2))
    model = build_model([[0.0, 1.0]] * 3)
    prefs = PreferenceStructure(model, [], PreferenceKind.PAIRS)

    with pytest.raises(CriterionLimitExceeded):
        engine.fit_capacity(FitProblem(model, prefs, options=engine.options))


def test_fit_rejects_collapsed_levels(engine) -> None:
    model = build_model([[0.0, 0.0, 1.0], [0.0, 0.5, 1.0]])
    prefs = PreferenceStructure(model, [], PreferenceKind.PAIRS)

    with pytest.raises(CollapsedLevels, match="criterion 1"):
        engine.fit_capacity(FitProblem(model, prefs))


def test_fit_problem_validates_its_inputs(additive_model) -> None:
    prefs = induced_order(additive_model.capacity, additive_model)

    with pytest.raises(ValueError):
        FitProblem(additive_model, prefs, epsilon=0.0)
    with pytest.raises(StructuralError):
        FitProblem(build_model([[0.0, 1.0], [0.0, 1.0]]), prefs)


def test_verify_flags_a_wrong_capacity(engine, additive_model) -> None:
    prefs = induced_order(additive_model.capacity, additive_model)

    report = engine.verify_representation(min_mobius(2), additive_model, prefs)

    assert not report.ok
    assert report.checked == 16 * 15 // 2
    assert {mismatch["stated"] for mismatch in report.mismatches} <= {">", "~"}


def test_verify_pairs_statements(engine, pairs_prefs) -> None:
    model = build_model([[0.0, 1.0], [0.0, 1.0]])
    prefs = pairs_prefs((2, 2), [(1, 0), (0, 1)], [(0, 1, False)])

    assert engine.verify_representation(additive_mobius([0.5, 0.5]), model, prefs).ok
    assert not engine.verify_representation(additive_mobius([0.7, 0.3]), model, prefs).ok


def test_uniqueness_transform_rescales_each_clique(engine) -> None:
    model = build_model([[0.0, 1.0], [0.0, 1.0]], additive_mobius([0.5, 0.5]))
    transform = CliqueTransform([[0], [1]], [1.0, 3.0], [0.0, 0.0])

    moved, moved_model = engine.apply_uniqueness_transform(model.capacity, model, transform)

    assert np.allclose(moved.coeffs, [0.0, 0.25, 0.75, 0.0])
    assert np.allclose(moved_model.scales[1].values, [0.0, 1.0 / 3.0])
    assert moved_model.capacity is moved


def test_identity_transform_changes_nothing(engine, block_model) -> None:
    cliques = cliques_from_mobius(block_model.capacity)

    moved, moved_model = engine.apply_uniqueness_transform(
        block_model.capacity, block_model, CliqueTransform.identity(cliques)
    )

    assert np.allclose(moved.coeffs, block_model.capacity.coeffs)
    for before, after in zip(block_model.scales, moved_model.scales):
        assert np.allclose(before.values, after.values)


def test_transform_across_an_interacting_pair_is_refused(engine, min_model) -> None:
    with pytest.raises(CliqueIncompatibility) as excinfo:
        engine.apply_uniqueness_transform(min_model.capacity, min_model, CliqueTransform([[0], [1]], [1.0, 2.0]))

    assert excinfo.value.subset == frozenset({0, 1})
    assert excinfo.value.mass == pytest.approx(1.0)


def test_random_clique_transforms_preserve_the_order(engine, block_model) -> None:
    rng = np.random.default_rng(17)
    prefs = induced_order(block_model.capacity, block_model)
    before = grid_values(block_model.capacity, block_model)

    for _ in range(5):
        transform = engine.random_transform(cliques_from_mobius(block_model.capacity), rng)
        moved, moved_model = engine.apply_uniqueness_transform(block_model.capacity, block_model, transform)
        after = grid_values(moved, moved_model)

        assert all(0.2 <= alpha <= 5.0 for alpha in transform.alpha)
        assert np.array_equal(induced_order(moved, moved_model).ranks, prefs.ranks)
        # the new integral is a positive affine image of the old one
        slope = np.polyfit(before, after, 1)[0]
        assert slope > 0
        assert np.allclose(after, np.polyval(np.polyfit(before, after, 1), before), atol=1e-9)


@pytest.mark.parametrize("model_name", ["additive_model", "min_model"])
def test_integral_through_coordinate_relations(model_name, request, checker, engine) -> None:
    model = request.getfixturevalue(model_name)
    table = checker.build_relation_table(induced_order(model.capacity, model))

    for point in enumerate_grid(model):
        direct = choquet_mobius(model.capacity, model.value_matrix([point])[0])
        assert engine.choquet_via_relations(model.capacity, model, point, table) == pytest.approx(direct)


@pytest.mark.parametrize("seed", range(50))
def test_integral_through_coordinate_relations_on_block_minimum_models(seed, engine) -> None:
    model = random_model(3, 3 + seed % 2, np.random.default_rng(seed), family="blocks")
    table = AxiomChecker(CheckerOptions(seed=seed)).build_relation_table(induced_order(model.capacity, model))

    for point in enumerate_grid(model):
        direct = choquet_mobius(model.capacity, model.value_matrix([point])[0])
        assert engine.choquet_via_relations(model.capacity, model, point, table) == pytest.approx(direct, abs=1e-12)


@pytest.mark.parametrize("seed", range(50))
def test_fit_round_trip_on_general_capacities(seed, engine) -> None:
    model = random_model(3, 3, np.random.default_rng(seed), family="general")
    prefs = induced_order(model.capacity, model)
    epsilon = min(engine.default_epsilon(model), smallest_gap(grid_values(model.capacity, model), 1e-9) / 2)

    result = engine.fit_capacity(FitProblem(model, prefs, epsilon))
    refit = induced_order(result.mobius, model, tolerance=min(1e-7, epsilon / 4))

    assert result.status is FitStatus.FEASIBLE
    assert np.array_equal(refit.ranks, prefs.ranks)


def test_weight_of_a_subset_ignores_orderings_inside_it(engine) -> None:
    rng = np.random.default_rng(4)
    model = random_model(3, 2, rng)

    assert engine.check_A_NA(model.capacity, None, [3.0, 2.0, 1.0], [2.0, 3.0, 1.0], [0, 1])
    with pytest.raises(LemmaPreconditionError):
        engine.check_A_NA(model.capacity, None, [3.0, 2.0, 1.0], [1.0, 3.0, 2.0], [0, 1])


def test_weight_check_accepts_an_explicit_capacity(engine) -> None:
    c = Capacity([0.0, 0.3, 0.6, 1.0])

    assert engine.check_A_NA(mobius_of(c), c, [2.0, 1.0], [2.0, 1.0], [0])


def test_sub_capacity_decomposition_adds_up(engine, block_model) -> None:
    f = [0.3, 1.7, 0.9]

    parts = engine.sub_capacity_decomposition(block_model.capacity, f)

    assert parts.shape == (2,)
    assert np.allclose(parts, [0.6 * 0.3, 0.4 * 0.9])
    assert parts.sum() == pytest.approx(choquet_mobius(block_model.capacity, f))


def test_fit_over_candidates_keeps_the_best_assignment(caplog, engine, additive_model) -> None:
    caplog.set_level(logging.WARNING, logger="pychoquet")
    prefs = induced_order(additive_model.capacity, additive_model)
    values = value_storage.additive_values
    candidates = [
        [[0.0, 0.0, 1.0, 2.0], values],
        [values, values],
        [[0.0, 1.0, 1.5, 4.0], values],
    ]

    chosen, result = engine.fit_over_candidates(additive_model, prefs, candidates)

    assert result.feasible
    assert chosen.scales[0].values.tolist() != [0.0, 0.0, 1.0, 2.0]
    messages = [record.getMessage() for record in caplog.records if record.name.startswith("pychoquet")]
    assert any("Skipping candidate=0" in message for message in messages)

    with pytest.raises(StructuralError):
        engine.fit_over_candidates(additive_model, prefs, [candidates[0]])


def test_fit_result_serializes_infinite_violation_as_null() -> None:
    payload = FitResult(FitStatus.INFEASIBLE, max_violation=math.inf).to_dict()

    assert payload["max_violation"] is None
    assert payload["status"] == "INFEASIBLE"
