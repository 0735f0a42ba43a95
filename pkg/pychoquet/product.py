"""Finite product sets, the forward Choquet model and marginal orders."""
from __future__ import annotations

__all__ = [
    "MODEL_FAMILIES",
    "enumerate_grid",
    "grid_coordinates",
    "rank_values",
    "induced_order",
    "marginal_order",
    "random_mobius",
    "random_capacity",
    "random_blocks",
    "random_values",
    "random_model",
]

from itertools import product
from typing import Iterable, Sequence

import numpy as np

from pychoquet.capacity import additive_mobius, choquet_many, min_mobius, mobius_of
from pychoquet.logging_utils import get_logger

# Exceptions
from pychoquet.exceptions import GridCapExceeded, StructuralError

# Models
from pychoquet.models.capacity_model import Capacity, MobiusRep, popcounts, subset_bits
from pychoquet.models.options_model import DEFAULT_GRID_CAP, DEFAULT_TOLERANCE
from pychoquet.models.preference_model import MarginalOrder, PreferenceKind, PreferenceStructure
from pychoquet.models.product_model import Alternative, CriterionScale, ProductModel

MODEL_FAMILIES: tuple[str, ...] = ("random", "general", "additive", "min", "blocks")

logger = get_logger("product")


def enumerate_grid(model: ProductModel, grid_cap: int = DEFAULT_GRID_CAP) -> list[Alternative]:
    """All alternatives of ``model`` in lexicographic order."""
    if model.grid_size > grid_cap:
        raise GridCapExceeded(model.grid_size, grid_cap)
    return list(product(*(range(size) for size in model.shape)))


def grid_coordinates(shape: Sequence[int]) -> np.ndarray:
    """Level indices of every grid point in C order, shape ``(prod(shape), n)``."""
    return np.array(np.unravel_index(np.arange(int(np.prod(shape))), tuple(shape))).T


def rank_values(values: np.ndarray, tolerance: float = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Dense ranks by descending value, rank 1 for the largest.

    Sorted neighbours closer than ``tolerance`` share a rank, so a run of
    small gaps chains into one class.
    """
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.size == 0:
        return np.zeros(0, dtype=np.int64)

    order = np.argsort(-values, kind="stable")
    gaps = -np.diff(values[order])
    sorted_ranks = np.concatenate(([1], 1 + np.cumsum(gaps > tolerance)))
    ranks = np.empty(values.size, dtype=np.int64)
    ranks[order] = sorted_ranks
    return ranks


def induced_order(
    m: MobiusRep,
    model: ProductModel,
    alternatives: Sequence[Sequence[int]] | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    grid_cap: int = DEFAULT_GRID_CAP,
) -> PreferenceStructure:
    """
    RANKED preferences generated by the Choquet integral of ``m`` over the model's values.

    Args:
        m (MobiusRep): Möbius coefficients on the model's criteria.
        model (ProductModel): Model whose scales all carry values.
        alternatives: Alternatives to rank, the full grid by default.
        tolerance (float): Values closer than this are indifferent.

    Returns:
        PreferenceStructure: Ranks by descending integral value.
    """
    if m.n != model.n:
        raise StructuralError(f"Möbius coefficients on {m.n} criteria, model has {model.n}")

    alts = enumerate_grid(model, grid_cap) if alternatives is None else list(alternatives)
    values = choquet_many(m, model.value_matrix(alts)) if alts else np.zeros(0)
    ranks = rank_values(values, tolerance)
    logger.debug("Induced order alternatives=%s classes=%s", len(alts), int(ranks.max(initial=0)))
    return PreferenceStructure(model, alts, PreferenceKind.RANKED, ranks=ranks)


def _dense(raw: np.ndarray) -> np.ndarray:
    return np.unique(raw, return_inverse=True)[1].astype(np.int64)


def _context_tuple(shape: tuple[int, ...], i: int, flat: int) -> tuple[int, ...]:
    others = shape[:i] + shape[i + 1:]
    return tuple(int(c) for c in np.unravel_index(flat, others)) if others else ()


def _marginal_from_scores(scores: np.ndarray) -> MarginalOrder:
    shape = scores.shape
    order = MarginalOrder(ranks=[])
    for i, size in enumerate(shape):
        fibers = np.moveaxis(scores, i, 0).reshape(size, -1)
        ge = np.all(fibers[:, None, :] >= fibers[None, :, :], axis=2)
        failed = False
        for a in range(size):
            for b in range(a + 1, size):
                if not ge[a, b] and not ge[b, a]:
                    failed = True
                    x = int(np.argmax(fibers[a] > fibers[b]))
                    y = int(np.argmax(fibers[b] > fibers[a]))
                    order.failures.append(
                        {
                            "criterion": i + 1,
                            "levels": [a, b],
                            "x": list(_context_tuple(shape, i, x)),
                            "y": list(_context_tuple(shape, i, y)),
                        }
                    )
                elif ge[a, b] and ge[b, a]:
                    order.collapsed.append((i, a, b))
        order.ranks.append(None if failed else _dense(ge.sum(axis=1)))
    return order


def _marginal_from_statements(prefs: PreferenceStructure, grid_cap: int) -> MarginalOrder:
    model = prefs.model
    order = MarginalOrder(ranks=[])
    for i, size in enumerate(model.shape):
        others = [range(s) for j, s in enumerate(model.shape) if j != i]
        contexts = list(product(*others))
        if len(contexts) * size > grid_cap:
            raise GridCapExceeded(len(contexts) * size, grid_cap)

        ge = np.ones((size, size), dtype=bool)
        failed = False
        silent = False
        for a in range(size):
            for b in range(a + 1, size):
                seen: dict[int, tuple[int, ...]] = {}
                missing = False
                for context in contexts:
                    x = prefs.index.get(context[:i] + (a,) + context[i:])
                    y = prefs.index.get(context[:i] + (b,) + context[i:])
                    verdict = None if x is None or y is None else prefs.compare(x, y)
                    if verdict is None:
                        missing = True
                        continue
                    seen.setdefault(verdict, context)
                    ge[a, b] &= verdict >= 0
                    ge[b, a] &= verdict <= 0
                if 1 in seen and -1 in seen:
                    failed = True
                    order.failures.append(
                        {"criterion": i + 1, "levels": [a, b], "x": list(seen[1]), "y": list(seen[-1])}
                    )
                elif missing:
                    silent = True
                    order.undetermined.append((i, a, b))
                elif ge[a, b] and ge[b, a]:
                    order.collapsed.append((i, a, b))
        order.ranks.append(None if failed or silent else _dense(ge.sum(axis=1)))
    return order


def marginal_order(prefs: PreferenceStructure, grid_cap: int = DEFAULT_GRID_CAP) -> MarginalOrder:
    """
    Derive ``a_i ≽_i b_i ⟺ a_i x_{-i} ≽ b_i x_{-i}`` for all ``x_{-i}``.

    Criteria whose levels are reversed between two contexts get a failure entry
    naming both contexts; pairs the data does not compare in every context are
    listed as undetermined. In both cases the criterion has no rank.
    """
    scores = prefs.score_tensor()
    if scores is not None:
        order = _marginal_from_scores(scores)
    else:
        order = _marginal_from_statements(prefs, grid_cap)

    if order.collapsed:
        logger.warning(
            "Collapsed levels found count=%s first=criterion %s levels %s/%s",
            len(order.collapsed),
            order.collapsed[0][0] + 1,
            order.collapsed[0][1],
            order.collapsed[0][2],
        )
    return order


def random_mobius(
    n: int,
    rng: np.random.Generator,
    blocks: Iterable[Iterable[int]] | None = None,
) -> MobiusRep:
    """
    Positive Möbius coefficients drawn from a flat Dirichlet.

    With ``blocks`` only subsets inside one block get mass, so the capacity
    decomposes over the blocks.
    """
    size = 1 << n
    if blocks is None:
        support = np.arange(1, size)
    else:
        masks = [subset_bits(block) for block in blocks]
        bits = np.arange(1, size)
        support = bits[np.any([(bits & ~mask) == 0 for mask in masks], axis=0)]

    coeffs = np.zeros(size)
    coeffs[support] = rng.dirichlet(np.ones(support.size))
    return MobiusRep(coeffs, n=n)


def random_capacity(n: int, rng: np.random.Generator) -> MobiusRep:
    """
    Möbius coefficients of a random monotone capacity; interactions of either sign occur.

    Subsets are filled by size, each one exceeding the largest of its
    one-smaller subsets by a uniform increment, then ``ν`` is divided by
    ``ν(N)``. Every marginal contribution is positive, so the integral is
    strictly increasing in each coordinate.
    """
    size = 1 << n
    values = np.zeros(size)
    for bits in np.argsort(popcounts(n), kind="stable")[1:]:
        below = [values[bits & ~(1 << i)] for i in range(n) if bits >> i & 1]
        values[bits] = max(below) + rng.uniform(0.05, 1.0)
    return mobius_of(Capacity(values / values[-1], n=n))


def random_blocks(n: int, rng: np.random.Generator) -> MobiusRep:
    """
    Dirichlet weights on the minimum over each block of a random partition of the criteria.

    Criteria in one block interact, criteria in different blocks do not.
    """
    labels = rng.integers(0, n, n)
    blocks = [np.flatnonzero(labels == label).tolist() for label in np.unique(labels)]
    coeffs = np.zeros(1 << n)
    for block, weight in zip(blocks, rng.dirichlet(np.ones(len(blocks)))):
        coeffs[subset_bits(block)] = weight
    return MobiusRep(coeffs, n=n)


def random_values(levels: int, rng: np.random.Generator) -> np.ndarray:
    """Strictly increasing values starting at 0."""
    return np.concatenate(([0.0], np.cumsum(rng.uniform(0.1, 1.0, levels - 1))))


def random_model(
    n: int,
    levels: int | Sequence[int],
    rng: np.random.Generator,
    family: str = "random",
    duplicate_values: bool = False,
) -> ProductModel:
    """
    A model with values and capacity for round-trip experiments.

    Families:
        ``random``: Dirichlet Möbius over all subsets, independent values per scale.
        ``general``: :func:`random_capacity`, independent values.
        ``additive``: Dirichlet weights on singletons, independent values.
        ``min``: the min capacity with the same values on every scale.
        ``blocks``: :func:`random_blocks` with the same values on every scale.

    ``duplicate_values`` gives the first two levels of criterion 1 the same value.
    """
    if family not in MODEL_FAMILIES:
        raise ValueError(f"unknown model family {family!r}, expected one of {MODEL_FAMILIES}")
    sizes = [levels] * n if isinstance(levels, int) else list(levels)
    if len(sizes) != n or min(sizes) < 1:
        raise StructuralError(f"need {n} positive level counts, got {sizes}")

    if family in ("min", "blocks"):
        shared = random_values(max(sizes), rng)
        values = [shared[:size] for size in sizes]
        capacity = min_mobius(n) if family == "min" else random_blocks(n, rng)
    else:
        values = [random_values(size, rng) for size in sizes]
        if family == "additive":
            capacity = additive_mobius(rng.dirichlet(np.ones(n)))
        elif family == "general":
            capacity = random_capacity(n, rng)
        else:
            capacity = random_mobius(n, rng)

    if duplicate_values and sizes[0] > 1:
        values[0] = values[0].copy()
        values[0][1] = values[0][0]

    scales = [CriterionScale(f"c{i + 1}", list(range(size)), vals) for i, (size, vals) in enumerate(zip(sizes, values))]
    return ProductModel(scales, capacity)
