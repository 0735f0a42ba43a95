from __future__ import annotations

__all__ = [
    "ConeSide",
    "ConeSpec",
    "ConeRelationTable",
    "PartitionCell",
    "CellPartition",
    "format_order",
]

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from pychoquet.exceptions import StructuralError
from pychoquet.models.product_model import Alternative


class ConeSide(str, Enum):
    SE = "SE"
    NW = "NW"


@dataclass(slots=True, frozen=True)
class ConeSpec:
    """
    The cone at ``z`` for the pair ``(i, j)``.

    SE holds the points with ``x_i ≽_i z_i`` and ``z_j ≽_j x_j``, other
    coordinates fixed to ``z``; NW swaps the two inequalities.
    """

    z: Alternative
    i: int
    j: int
    side: ConeSide = ConeSide.SE

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise StructuralError("a cone needs two distinct criteria")


def format_order(pairs: Iterable[tuple[int, int]]) -> str:
    """``1S2, 3S2`` style rendering with 1-based criteria; ``∅`` for the empty order."""
    ordered = sorted(pairs)
    if not ordered:
        return "∅"
    return ", ".join(f"{i + 1}S{j + 1}" for i, j in ordered)


class ConeRelationTable:
    """
    The relations ``R^z``, ``S^z`` and ``E^z`` at every grid point.

    ``r[p, i, j]`` is True when ij-triple cancellation holds on the SE cone of
    ``(i, j)`` at the grid point with flat index ``p`` and at every point
    sharing its levels of ``i`` and ``j``. A cone with fewer than
    two levels on either axis is degenerate: it satisfies the condition
    trivially and ``informative[p, i, j]`` is False.

    Attributes:
        shape (tuple[int, ...]): Grid shape.
        r (np.ndarray): Boolean array ``(points, n, n)``.
        informative (np.ndarray): Non-degenerate cones.
        determined (np.ndarray): Cones actually audited.
        marginal_ranks (list[np.ndarray]): Level positions under ``≽_i``.
        coverage (float): Share of the audit cost spent.
        witnesses (dict): Triple cancellation failures keyed by ``(point, i, j)``;
            the witness names the context where the failure was found.
    """

    def __init__(
        self,
        shape: Sequence[int],
        r: np.ndarray,
        informative: np.ndarray,
        determined: np.ndarray,
        marginal_ranks: Sequence[np.ndarray],
        coverage: float = 1.0,
        witnesses: dict[tuple[int, int, int], dict] | None = None,
    ) -> None:
        """Initialize the instance."""
        self.shape = tuple(int(size) for size in shape)
        self.n = len(self.shape)
        expected = (int(np.prod(self.shape)), self.n, self.n)
        if r.shape != expected:
            raise StructuralError(f"relation flags have shape {r.shape}, expected {expected}")

        self.r = r
        self.informative = informative
        self.determined = determined
        self.marginal_ranks = [np.asarray(rank) for rank in marginal_ranks]
        self.coverage = coverage
        self.witnesses = witnesses or {}

    @classmethod
    def from_flags(cls, shape: Sequence[int], r: np.ndarray) -> ConeRelationTable:
        """Table with every cone informative and audited, for hand-built flags."""
        flags = np.asarray(r, dtype=bool)
        ranks = [np.arange(size) for size in shape]
        return cls(shape, flags, np.ones_like(flags), np.ones_like(flags), ranks)

    @property
    def size(self) -> int:
        return self.r.shape[0]

    @property
    def s(self) -> np.ndarray:
        """``s[p, i, j]`` iff ``i S j``, i.e. NOT ``j R i``."""
        return ~self.r.transpose(0, 2, 1)

    @property
    def e(self) -> np.ndarray:
        return self.r & self.r.transpose(0, 2, 1)

    @property
    def complete(self) -> bool:
        return bool(np.all(self.determined))

    def point_index(self, alternative: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(int(c) for c in alternative), self.shape))

    def alternative(self, index: int) -> Alternative:
        return tuple(int(c) for c in np.unravel_index(index, self.shape))

    def strict_pairs(self, index: int) -> frozenset[tuple[int, int]]:
        """The order ``S^z`` at a point, as ``(i, j)`` pairs meaning ``i S j``."""
        s = self.s[index]
        return frozenset((int(i), int(j)) for i, j in zip(*np.nonzero(s)) if i != j)

    def to_dict(self) -> dict:
        points = []
        for index in range(self.size):
            points.append(
                {
                    "z": list(self.alternative(index)),
                    "S": format_order(self.strict_pairs(index)),
                    "incomplete": [
                        [int(i) + 1, int(j) + 1]
                        for i, j in zip(*np.nonzero(~(self.r[index] | self.r[index].T)))
                        if i < j
                    ],
                }
            )
        return {"shape": list(self.shape), "coverage": self.coverage, "points": points}

    def __repr__(self) -> str:
        """Repr special method."""
        return f"ConeRelationTable(shape={self.shape!r}, coverage={self.coverage!r})"


class PartitionCell:
    """
    The set ``X^{S_a}`` governed by one coordinate order.

    Attributes:
        order (frozenset[tuple[int, int]]): Strict pairs ``(i, j)`` meaning ``i S_a j``.
        mask (np.ndarray): Flat boolean membership over the grid.
        shape (tuple[int, ...]): Grid shape.
        essential (frozenset[int] | None): Criteria essential on the cell, once computed.
    """

    def __init__(
        self,
        order: Iterable[tuple[int, int]],
        mask: np.ndarray,
        shape: Sequence[int],
        essential: Iterable[int] | None = None,
    ) -> None:
        """Initialize the instance."""
        self.order = frozenset((int(i), int(j)) for i, j in order)
        self.mask = np.asarray(mask, dtype=bool).reshape(-1)
        self.shape = tuple(int(size) for size in shape)
        self.essential = None if essential is None else frozenset(essential)

    @classmethod
    def whole_grid(cls, shape: Sequence[int]) -> PartitionCell:
        return cls((), np.ones(int(np.prod(shape)), dtype=bool), shape)

    @property
    def order_id(self) -> str:
        return format_order(self.order)

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def members(self) -> list[Alternative]:
        coords = np.unravel_index(np.flatnonzero(self.mask), self.shape)
        return [tuple(int(c) for c in point) for point in zip(*coords)]

    def grid_mask(self) -> np.ndarray:
        return self.mask.reshape(self.shape)

    def to_dict(self) -> dict:
        return {
            "order_id": self.order_id,
            "size": self.size,
            "essential": None if self.essential is None else sorted(i + 1 for i in self.essential),
            "members": [list(member) for member in self.members],
        }

    def __repr__(self) -> str:
        """Repr special method."""
        essential = None if self.essential is None else sorted(i + 1 for i in self.essential)
        return f"PartitionCell(order={self.order_id!r}, size={self.size}, essential={essential!r})"


class CellPartition:
    """
    Cells of the grid plus the points no cell covers.

    Attributes:
        cells (list[PartitionCell]): One cell per maximal observed order.
        uncovered (list[Alternative]): Grid points outside every cell.
        shape (tuple[int, ...]): Grid shape.
    """

    def __init__(self, cells: Sequence[PartitionCell], uncovered: Sequence[Alternative], shape: Sequence[int]) -> None:
        """Initialize the instance."""
        self.cells = list(cells)
        self.uncovered = list(uncovered)
        self.shape = tuple(int(size) for size in shape)

    def __iter__(self):
        return iter(self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __getitem__(self, index: int) -> PartitionCell:
        return self.cells[index]

    @property
    def covers_grid(self) -> bool:
        return not self.uncovered

    def union_mask(self) -> np.ndarray:
        union = np.zeros(int(np.prod(self.shape)), dtype=bool)
        for cell in self.cells:
            union |= cell.mask
        return union

    def to_dict(self) -> dict:
        return {
            "cells": [cell.to_dict() for cell in self.cells],
            "uncovered": [list(point) for point in self.uncovered],
        }

    def __repr__(self) -> str:
        """Repr special method."""
        return f"CellPartition(cells={len(self.cells)}, uncovered={len(self.uncovered)})"
