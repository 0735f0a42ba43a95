from __future__ import annotations

import logging

import numpy as np
import pytest

from pychoquet.capacity import additive_mobius, capacity_of, min_mobius, validate_capacity
from pychoquet.exceptions import GridCapExceeded, InvalidAlternative, MissingValueFunctions
from pychoquet.product import enumerate_grid, induced_order, marginal_order, random_model, rank_values

from tests.conftest import build_model


def test_grid_enumeration_is_lexicographic() -> None:
    model = build_model([[0.0, 1.0], [0.0, 1.0, 2.0]])

    assert enumerate_grid(model) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]


def test_grid_cap_is_enforced() -> None:
    model = build_model([[0.0, 1.0, 2.0]] * 3)

    with pytest.raises(GridCapExceeded):
        enumerate_grid(model, grid_cap=26)


def test_alternatives_are_checked_against_the_scales() -> None:
    model = build_model([[0.0, 1.0], [0.0, 1.0]])

    with pytest.raises(InvalidAlternative):
        model.check_alternative((0, 2))
    with pytest.raises(InvalidAlternative):
        model.check_alternative((0,))


def test_value_matrix_needs_value_functions() -> None:
    model = build_model([[0.0, 1.0], [0.0, 1.0]]).with_values([[0.0, 1.0], None])

    assert not model.has_values
    with pytest.raises(MissingValueFunctions):
        model.value_matrix([(0, 0)])


def test_validate_reports_structural_problems() -> None:
    problems = build_model([[0.0, 0.0, 1.0], [1.0]]).validate()

    assert any("criterion 1" in problem and "not strictly increasing" in problem for problem in problems)
    assert any("criterion 2" in problem and "single level" in problem for problem in problems)


def test_rank_values_gives_rank_one_to_the_best() -> None:
    assert rank_values(np.array([3.0, 1.0, 2.0, 3.0])).tolist() == [1, 3, 2, 1]


def test_induced_order_of_the_weighted_sum() -> None:
    model = build_model([[0.0, 1.0], [0.0, 1.0]])

    prefs = induced_order(additive_mobius([0.5, 0.5]), model)

    assert prefs.alternatives == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert prefs.ranks.tolist() == [3, 2, 2, 1]


def test_induced_order_of_the_minimum() -> None:
    model = build_model([[0.0, 1.0], [0.0, 1.0]])

    prefs = induced_order(min_mobius(2), model)

    assert prefs.ranks.tolist() == [2, 2, 2, 1]


def test_induced_order_on_a_subset_of_alternatives() -> None:
    model = build_model([[0.0, 1.0], [0.0, 1.0]])

    prefs = induced_order(additive_mobius([0.25, 0.75]), model, alternatives=[(1, 0), (0, 1)])

    assert prefs.ranks.tolist() == [2, 1]
    assert not prefs.covers_grid
    assert prefs.score_tensor() is None


def test_induced_order_ignores_positive_affine_rescaling() -> None:
    model = random_model(3, 3, np.random.default_rng(5))
    rescaled = model.with_values([2.0 * scale.values - 1.0 for scale in model.scales])

    first = induced_order(model.capacity, model)
    second = induced_order(model.capacity, rescaled)

    assert np.array_equal(first.ranks, second.ranks)


def test_marginal_orders_match_the_declared_levels(additive_model) -> None:
    order = marginal_order(induced_order(additive_model.capacity, additive_model))

    assert order.ok
    assert order.matches_declared()
    assert not order.collapsed


def test_reversed_levels_are_reported_with_both_contexts(pairs_prefs) -> None:
    prefs = pairs_prefs(
        (2, 2),
        [(0, 0), (1, 0), (1, 1), (0, 1)],
        [(0, 1, True), (2, 3, True)],
    )

    order = marginal_order(prefs)

    assert not order.ok
    assert order.ranks[0] is None
    assert order.failures[0] == {"criterion": 1, "levels": [0, 1], "x": [0], "y": [1]}


def test_duplicate_values_collapse_levels(caplog) -> None:
    caplog.set_level(logging.WARNING, logger="pychoquet")
    model = random_model(2, 3, np.random.default_rng(2), family="additive", duplicate_values=True)

    order = marginal_order(induced_order(model.capacity, model))

    assert (0, 0, 1) in order.collapsed
    assert order.ranks[0].tolist() == [0, 0, 1]
    messages = [record.getMessage() for record in caplog.records if record.name.startswith("pychoquet")]
    assert any("Collapsed levels" in message for message in messages)


def test_random_model_families() -> None:
    rng = np.random.default_rng(0)

    min_model = random_model(3, 4, rng, family="min")
    additive = random_model(3, 4, rng, family="additive")
    general = random_model(3, 4, rng, family="general")
    blocks = random_model(4, 3, rng, family="blocks")

    assert min_model.capacity == min_mobius(3)
    assert all(np.array_equal(scale.values, min_model.scales[0].values) for scale in min_model.scales)
    assert additive.capacity.coeffs[3] == 0.0
    assert additive.capacity.coeffs[1:].sum() == pytest.approx(1.0)
    assert validate_capacity(capacity_of(general.capacity)) == []
    assert not np.array_equal(general.scales[0].values, general.scales[1].values)
    assert all(np.array_equal(scale.values, blocks.scales[0].values) for scale in blocks.scales)
    assert blocks.capacity.coeffs.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        random_model(2, 2, rng, family="median")
