from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
import pytest

from pychoquet.axioms import AxiomChecker
from pychoquet.capacity import additive_mobius, min_mobius
from pychoquet.product import enumerate_grid, rank_values
from pychoquet.representation import RepresentationEngine
from pychoquet.models.capacity_model import MobiusRep, subset_bits
from pychoquet.models.options_model import CheckerOptions
from pychoquet.models.preference_model import PreferenceKind, PreferenceStatement, PreferenceStructure
from pychoquet.models.product_model import CriterionScale, ProductModel


class ValueStorage:
    """
    Value storage class for sharing constants across tests cases
    """

    def __init__(self):
        # triple cancellation fails on both cones at (1, 1)
        self.a3_counterexample = np.array(
            [
                [0.0, 1.0, 1.0],
                [1.0, 1.0, 2.0],
                [1.0, 2.0, 3.0],
            ]
        )
        # x1 + x2 with (2, 1) moved from 3 to 2.5
        self.a4_counterexample = np.add.outer(np.arange(3.0), np.arange(3.0))
        self.a4_counterexample[2, 1] = 2.5
        # x1 + x2 + x3 with (0, 0, 2) and (0, 1, 1) moved to 2.5
        self.a5_counterexample = np.add.outer(np.add.outer(np.arange(3.0), np.arange(3.0)), np.arange(3.0))
        self.a5_counterexample[0, 0, 2] = 2.5
        self.a5_counterexample[0, 1, 1] = 2.5
        # criterion 1 separates levels 0 and 1 when x2 = 0 but not when x2 = 1
        self.a6_counterexample = np.array(
            [
                [0.0, 3.0, 6.0],
                [1.0, 3.0, 7.0],
                [2.0, 5.0, 8.0],
            ]
        )
        self.additive_values: list[float] = [0.0, 1.0, 2.0, 3.0]
        self.min_values: list[float] = [0.0, 0.4, 0.7, 1.0]
        self.block_values: list[float] = [0.0, 1.0, 2.0]


value_storage = ValueStorage()


def build_model(values: Sequence[Sequence[float] | None], capacity: MobiusRep | None = None) -> ProductModel:
    scales = []
    for i, vals in enumerate(values):
        scales.append(CriterionScale(f"c{i + 1}", list(range(len(vals))), vals))
    return ProductModel(scales, capacity)


def build_grid_prefs(scores: np.ndarray) -> PreferenceStructure:
    """Ranked preferences on the full grid, higher score is better."""
    scores = np.asarray(scores, dtype=float)
    model = ProductModel([CriterionScale(f"c{i + 1}", list(range(size))) for i, size in enumerate(scores.shape)])
    alternatives = enumerate_grid(model)
    coords = np.array(alternatives).T
    return PreferenceStructure(model, alternatives, PreferenceKind.RANKED, ranks=rank_values(scores[tuple(coords)]))


def build_pairs_prefs(
    shape: Sequence[int],
    alternatives: Sequence[Sequence[int]],
    statements: Sequence[tuple[int, int, bool]],
) -> PreferenceStructure:
    model = ProductModel([CriterionScale(f"c{i + 1}", list(range(size))) for i, size in enumerate(shape)])
    pairs = [PreferenceStatement(better, worse, strict) for better, worse, strict in statements]
    return PreferenceStructure(model, alternatives, PreferenceKind.PAIRS, pairs=pairs)


@pytest.fixture
def grid_prefs() -> Callable[[np.ndarray], PreferenceStructure]:
    return build_grid_prefs


@pytest.fixture
def pairs_prefs() -> Callable[..., PreferenceStructure]:
    return build_pairs_prefs


@pytest.fixture
def additive_model() -> ProductModel:
    values = value_storage.additive_values
    return build_model([values, values], additive_mobius([0.5, 0.5]))


@pytest.fixture
def min_model() -> ProductModel:
    values = value_storage.min_values
    return build_model([values, values], min_mobius(2))


@pytest.fixture
def min3_model() -> ProductModel:
    values = value_storage.block_values
    return build_model([values, values, values], min_mobius(3))


@pytest.fixture
def block_model() -> ProductModel:
    coeffs = np.zeros(8)
    coeffs[subset_bits([0, 1])] = 0.6
    coeffs[subset_bits([2])] = 0.4
    values = value_storage.block_values
    return build_model([values, values, values], MobiusRep(coeffs, n=3))


@pytest.fixture
def checker() -> AxiomChecker:
    return AxiomChecker(CheckerOptions(seed=7))


@pytest.fixture
def engine() -> RepresentationEngine:
    return RepresentationEngine()
