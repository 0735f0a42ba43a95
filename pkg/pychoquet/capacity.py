"""Capacity and Möbius algebra, Choquet integral evaluation."""
from __future__ import annotations

__all__ = [
    "validate_capacity",
    "mobius_of",
    "capacity_of",
    "choquet_sorted",
    "choquet_mobius",
    "choquet_many",
    "subset_minima",
    "classify_special",
    "is_comonotonic",
    "cliques_from_mobius",
    "weights_for_ordering",
    "clique_mass",
    "clique_integrals",
    "additive_mobius",
    "min_mobius",
    "max_mobius",
    "format_partition",
]

from typing import Iterable, Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from pychoquet.logging_utils import get_logger

# Exceptions
from pychoquet.exceptions import IncompleteOrdering, StructuralError

# Models
from pychoquet.models.capacity_model import (
    Capacity,
    MobiusRep,
    SpecialCase,
    popcounts,
    subset_bits,
    subset_label,
    subset_members,
)
from pychoquet.models.options_model import DEFAULT_TOLERANCE

logger = get_logger("capacity")


def _subset_transform(values: np.ndarray, n: int, sign: float) -> np.ndarray:
    out = np.array(values, dtype=float)
    for i in range(n):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 1, :] += sign * view[:, 0, :]
    return out


def _as_scores(f: Iterable[float], n: int) -> np.ndarray:
    scores = np.asarray(f, dtype=float).reshape(-1)
    if scores.size != n:
        raise StructuralError(f"score vector has {scores.size} entries, expected {n}")
    if not np.all(np.isfinite(scores)):
        raise StructuralError("score vector must be finite")
    return scores


def validate_capacity(c: Capacity, tolerance: float = DEFAULT_TOLERANCE) -> list[str]:
    """
    List the capacity constraints ``c`` violates.

    Monotonicity is audited on single-bit supersets, which covers every chain
    ``A ⊆ B`` by transitivity.

    Args:
        c (Capacity): The set function to audit.
        tolerance (float): Slack allowed on every comparison.

    Returns:
        list[str]: One message per violated constraint, empty when valid.

    Raises:
        StructuralError: ``c`` does not hold ``2**n`` values.
    """
    c.check_length()
    values = c.values
    violations: list[str] = []

    if abs(values[0]) > tolerance:
        violations.append(f"ν(∅)=0 violated: ν(∅)={values[0]:.6g}")
    if abs(values[-1] - 1.0) > tolerance:
        violations.append(f"ν(N)=1 violated: ν(N)={values[-1]:.6g}")

    bits = np.arange(values.size)
    for i in range(c.n):
        lower = bits[(bits >> i) & 1 == 0]
        upper = lower | (1 << i)
        drops = values[lower] - values[upper]
        for index in np.flatnonzero(drops > tolerance):
            a, b = int(lower[index]), int(upper[index])
            violations.append(
                f"monotonicity violated: ν({subset_label(a)})={values[a]:.6g} > ν({subset_label(b)})={values[b]:.6g}"
            )

    return violations


def mobius_of(c: Capacity) -> MobiusRep:
    """Möbius transform ``m(A) = Σ_{B⊆A} (−1)^{|A∖B|} ν(B)``."""
    c.check_length()
    return MobiusRep(_subset_transform(c.values, c.n, -1.0), n=c.n)


def capacity_of(m: MobiusRep, tolerance: float = DEFAULT_TOLERANCE) -> Capacity:
    """
    Zeta transform ``ν(A) = Σ_{B⊆A} m(B)``.

    The capacity is returned even when it is not valid; violations are logged.
    """
    m.check_length()
    capacity = Capacity(_subset_transform(m.coeffs, m.n, 1.0), n=m.n)
    violations = validate_capacity(capacity, tolerance)
    if violations:
        logger.warning(
            "Möbius coefficients induce an invalid capacity n=%s violations=%s first=%s",
            m.n,
            len(violations),
            violations[0],
        )
    return capacity


def choquet_sorted(c: Capacity, f: Iterable[float]) -> float:
    """
    Choquet integral in its sorted-increment form.

    Scores are shifted so that their minimum is 0 and shifted back afterwards,
    so negative values are accepted. Ties are broken by coordinate index.

    Example:
        .. code-block:: python

            >>> choquet_sorted(Capacity([0, 0.3, 0.6, 1]), [0.9, 0.4])
            0.55
    """
    c.check_length()
    scores = _as_scores(f, c.n)
    if c.n == 0:
        return 0.0

    shift = float(scores.min())
    shifted = scores - shift
    order = np.lexsort((np.arange(c.n), shifted))
    increments = np.diff(shifted[order], prepend=0.0)
    uppers = np.cumsum((1 << order)[::-1])[::-1]
    return float(increments @ c.values[uppers]) + shift


def subset_minima(scores: np.ndarray | Sequence[Sequence[float]]) -> np.ndarray:
    """
    ``min_{i∈A} f_i`` for every subset ``A`` and every row of ``scores``.

    Args:
        scores: Array of shape ``(k, n)``.

    Returns:
        np.ndarray: Shape ``(k, 2**n)``; the empty-set column is 0.
    """
    rows = np.atleast_2d(np.asarray(scores, dtype=float))
    k, n = rows.shape
    minima = np.full((k, 1 << n), np.inf)
    for i in range(n):
        view = minima.reshape(k, -1, 2, 1 << i)
        view[:, :, 1, :] = np.minimum(view[:, :, 0, :], rows[:, i, None, None])
    minima[:, 0] = 0.0
    return minima


def choquet_mobius(m: MobiusRep, f: Iterable[float]) -> float:
    """Choquet integral as ``Σ_{A≠∅} m(A) min_{i∈A} f_i``."""
    m.check_length()
    scores = _as_scores(f, m.n)
    minima = subset_minima(scores[None, :])[0]
    return float(m.coeffs[1:] @ minima[1:])


def choquet_many(m: MobiusRep, scores: np.ndarray) -> np.ndarray:
    """Möbius-form integral of every row of a ``(k, n)`` score matrix."""
    m.check_length()
    rows = np.atleast_2d(np.asarray(scores, dtype=float))
    if rows.shape[1] != m.n:
        raise StructuralError(f"score rows have {rows.shape[1]} entries, expected {m.n}")
    return subset_minima(rows)[:, 1:] @ m.coeffs[1:]


def classify_special(m: MobiusRep, tolerance: float = DEFAULT_TOLERANCE) -> SpecialCase:
    """
    Tag the min, max and weighted-sum special cases.

    MAX is recognised by ``ν(A)=1`` on every nonempty ``A``. Listing only the
    singleton coefficients does not pin it down, the higher-order ones alternate in sign.
    """
    m.check_length()
    coeffs = m.coeffs
    others = np.abs(coeffs[:-1]) <= tolerance

    if abs(coeffs[-1] - 1.0) <= tolerance and np.all(others):
        return SpecialCase.MIN

    values = _subset_transform(coeffs, m.n, 1.0)
    if m.n > 0 and np.all(np.abs(values[1:] - 1.0) <= tolerance):
        return SpecialCase.MAX

    if np.all(np.abs(coeffs[popcounts(m.n) >= 2]) <= tolerance):
        return SpecialCase.ADDITIVE

    return SpecialCase.GENERAL


def is_comonotonic(f: Iterable[float], g: Iterable[float]) -> bool:
    """True iff no pair ``i, j`` has ``f_i > f_j`` and ``g_i < g_j``."""
    first = np.asarray(f, dtype=float).reshape(-1)
    second = np.asarray(g, dtype=float).reshape(-1)
    if first.size != second.size:
        raise StructuralError(f"score vectors differ in length: {first.size} and {second.size}")

    above = first[:, None] > first[None, :]
    below = second[:, None] < second[None, :]
    return not bool(np.any(above & below))


def cliques_from_mobius(m: MobiusRep, tolerance: float = DEFAULT_TOLERANCE) -> list[frozenset[int]]:
    """
    Finest partition of N keeping every subset with nonzero Möbius mass inside one block.

    Blocks hold 0-based criteria and are ordered by their smallest member.
    """
    m.check_length()
    components = DisjointSet(range(m.n))
    for bits in m.support(tolerance):
        members = subset_members(bits)
        for member in members[1:]:
            components.merge(members[0], member)

    return sorted((frozenset(block) for block in components.subsets()), key=min)


def weights_for_ordering(c: Capacity, rank: Sequence[float | None]) -> np.ndarray:
    """
    Weights ``p_i`` of the additive form the integral takes on points ordered like ``rank``.

    ``rank`` gives each coordinate a comparable score, higher meaning a larger
    value. Ties are broken by coordinate index, so the weights always sum to 1.

    Raises:
        IncompleteOrdering: ``rank`` misses a coordinate.
    """
    c.check_length()
    if len(rank) != c.n or any(value is None for value in rank):
        raise IncompleteOrdering(f"ordering must rank all {c.n} criteria, got {list(rank)!r}")

    keys = np.asarray(rank, dtype=float)
    if np.any(np.isnan(keys)):
        raise IncompleteOrdering(f"ordering must rank all {c.n} criteria, got {list(rank)!r}")

    order = np.lexsort((np.arange(c.n), keys))
    uppers = np.append(np.cumsum((1 << order)[::-1])[::-1], 0)
    weights = np.empty(c.n)
    weights[order] = c.values[uppers[:-1]] - c.values[uppers[1:]]
    return weights


def clique_mass(m: MobiusRep, cliques: Sequence[Iterable[int]]) -> np.ndarray:
    """``Σ_{∅≠B⊆A} m(B)`` for every clique ``A``."""
    m.check_length()
    bits = np.arange(len(m))
    masses = []
    for clique in cliques:
        mask = subset_bits(clique)
        inside = ((bits & ~mask) == 0) & (bits != 0)
        masses.append(float(m.coeffs[inside].sum()))
    return np.array(masses)


def clique_integrals(m: MobiusRep, f: Iterable[float], cliques: Sequence[Iterable[int]]) -> np.ndarray:
    """
    Per-clique integrals of the restricted sub-capacities.

    Their sum equals the full integral whenever no Möbius mass straddles two cliques.
    """
    m.check_length()
    minima = subset_minima(_as_scores(f, m.n)[None, :])[0]
    bits = np.arange(len(m))
    integrals = []
    for clique in cliques:
        mask = subset_bits(clique)
        inside = ((bits & ~mask) == 0) & (bits != 0)
        integrals.append(float(m.coeffs[inside] @ minima[inside]))
    return np.array(integrals)


def additive_mobius(weights: Sequence[float]) -> MobiusRep:
    """Möbius coefficients of the weighted sum with the given weights."""
    n = len(weights)
    coeffs = np.zeros(1 << n)
    for i, weight in enumerate(weights):
        coeffs[1 << i] = weight
    return MobiusRep(coeffs, n=n)


def min_mobius(n: int) -> MobiusRep:
    coeffs = np.zeros(1 << n)
    coeffs[-1] = 1.0
    return MobiusRep(coeffs, n=n)


def max_mobius(n: int) -> MobiusRep:
    values = np.ones(1 << n)
    values[0] = 0.0
    return mobius_of(Capacity(values, n=n))


def format_partition(blocks: Iterable[Iterable[int]]) -> str:
    """``{{1,2},{3}}`` style rendering of a partition of 0-based criteria."""
    return "{" + ",".join(subset_label(subset_bits(block)) for block in blocks) + "}"
