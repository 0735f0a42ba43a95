from __future__ import annotations

__all__ = [
    "Capacity",
    "MobiusRep",
    "SpecialCase",
    "MAX_CRITERIA",
    "subset_bits",
    "subset_members",
    "subset_label",
    "subset_key",
    "parse_subset_key",
    "popcounts",
]

from enum import Enum
from functools import lru_cache
from typing import Iterable

import numpy as np

from pychoquet.exceptions import CriterionLimitExceeded, StructuralError

MAX_CRITERIA: int = 20


class SpecialCase(str, Enum):
    """Particular cases of the Choquet integral."""

    MIN = "MIN"
    MAX = "MAX"
    ADDITIVE = "ADDITIVE"
    GENERAL = "GENERAL"


def subset_bits(members: Iterable[int]) -> int:
    """Bitmask of a set of 0-based criterion indices."""
    bits = 0
    for member in members:
        bits |= 1 << int(member)
    return bits


def subset_members(bits: int) -> tuple[int, ...]:
    """0-based members of a bitmask, ascending."""
    return tuple(i for i in range(int(bits).bit_length()) if bits >> i & 1)


def subset_label(bits: int) -> str:
    """Human readable subset with 1-based members, ``∅`` for the empty set."""
    if bits == 0:
        return "∅"
    return "{" + ",".join(str(i + 1) for i in subset_members(bits)) + "}"


def subset_key(bits: int) -> str:
    """JSON key of a subset: comma-joined sorted 1-based members, ``""`` for the empty set."""
    return ",".join(str(i + 1) for i in subset_members(bits))


def parse_subset_key(key: str, n: int) -> int:
    key = key.strip()
    if key in ("", "∅"):
        return 0
    try:
        members = [int(part) - 1 for part in key.split(",")]
    except ValueError as exc:
        raise StructuralError(f"subset key {key!r} is not a comma-joined list of criteria") from exc
    if any(not 0 <= member < n for member in members):
        raise StructuralError(f"subset key {key!r} names a criterion outside 1..{n}")
    return subset_bits(members)


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    """Cardinality of every subset of an ``n`` element ground set, by bitmask."""
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        view = counts.reshape(-1, 2, 1 << i)
        view[:, 1, :] += 1
    counts.setflags(write=False)
    return counts


def _infer_n(length: int) -> int:
    n = max(length - 1, 0).bit_length()
    if n > MAX_CRITERIA:
        raise CriterionLimitExceeded(n, MAX_CRITERIA)
    return n


class _SetFunction:
    kind: str = ""

    def __init__(self, values: Iterable[float] | np.ndarray, n: int | None = None) -> None:
        array = np.array(values, dtype=float).reshape(-1)
        resolved_n = _infer_n(array.size) if n is None else int(n)
        if resolved_n > MAX_CRITERIA:
            raise CriterionLimitExceeded(resolved_n, MAX_CRITERIA)

        array.setflags(write=False)
        self.n = resolved_n
        self._array = array

    def __len__(self) -> int:
        return self._array.size

    def __getitem__(self, bits: int) -> float:
        return float(self._array[bits])

    def check_length(self) -> None:
        if self._array.size != 1 << self.n:
            raise StructuralError(
                f"{self.kind} for n={self.n} needs {1 << self.n} entries, got {self._array.size}"
            )

    def of(self, members: Iterable[int]) -> float:
        """Value at a subset given by 0-based members."""
        return float(self._array[subset_bits(members)])

    def to_dict(self) -> dict:
        self.check_length()
        return {
            "n": self.n,
            "kind": self.kind,
            "values": {subset_key(bits): float(value) for bits, value in enumerate(self._array)},
        }

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._array, other._array)

    __hash__ = None  # type: ignore[assignment]


class Capacity(_SetFunction):
    """
    A capacity on the subsets of N, stored by bitmask.

    Attributes:
        n (int): Number of criteria.
        values (np.ndarray): Read-only array of length ``2**n``; bit ``i`` of the
            index is set iff criterion ``i`` belongs to the subset.

    Example:
        .. code-block:: python

            >>> Capacity([0.0, 0.3, 0.6, 1.0]).of([0])
            0.3
    """

    kind = "capacity"

    @property
    def values(self) -> np.ndarray:
        return self._array

    def __repr__(self) -> str:
        """Repr special method."""
        return f"Capacity(n={self.n}, values={self._array.tolist()!r})"


class MobiusRep(_SetFunction):
    """
    Möbius coefficients ``m(A)`` of a capacity; ``coeffs[0]`` is ``m(∅)``.
    """

    kind = "mobius"

    @property
    def coeffs(self) -> np.ndarray:
        return self._array

    def support(self, tolerance: float = 1e-9) -> list[int]:
        """Bitmasks of the nonempty subsets with ``|m(A)| > tolerance``."""
        return [int(bits) for bits in np.flatnonzero(np.abs(self._array) > tolerance) if bits]

    def __repr__(self) -> str:
        """Repr special method."""
        return f"MobiusRep(n={self.n}, coeffs={self._array.tolist()!r})"
