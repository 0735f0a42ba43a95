from __future__ import annotations

__all__ = [
    "CriterionScale",
    "ProductModel",
    "Alternative",
]

from math import prod
from typing import Sequence

import numpy as np

from pychoquet.exceptions import CollapsedLevels, InvalidAlternative, MissingValueFunctions, StructuralError
from pychoquet.models.capacity_model import MobiusRep

Alternative = tuple[int, ...]


class CriterionScale:
    """
    One criterion: ordered level labels and optional values ``f_i(level)``.

    Attributes:
        name (str): Criterion name.
        levels (list): Level labels, unique, in their declared order (worst first).
        values (np.ndarray | None): Value of every level, same length as ``levels``.
    """

    def __init__(
        self,
        name: str,
        levels: Sequence[object],
        values: Sequence[float] | np.ndarray | None = None,
    ) -> None:
        """Initialize the instance."""
        labels = list(levels)
        if not labels:
            raise StructuralError(f"criterion {name!r} has no levels")
        if len(set(map(str, labels))) != len(labels):
            raise StructuralError(f"criterion {name!r} repeats a level label")

        array = None
        if values is not None:
            array = np.array(values, dtype=float).reshape(-1)
            if array.size != len(labels):
                raise StructuralError(
                    f"criterion {name!r} has {len(labels)} levels but {array.size} values"
                )
            array.setflags(write=False)

        self.name = name
        self.levels = labels
        self.values = array

    @property
    def size(self) -> int:
        return len(self.levels)

    def is_strictly_increasing(self) -> bool:
        return self.values is not None and bool(np.all(np.diff(self.values) > 0))

    def with_values(self, values: Sequence[float] | np.ndarray | None) -> CriterionScale:
        return CriterionScale(self.name, self.levels, values)

    def to_dict(self) -> dict:
        payload: dict = {"name": self.name, "levels": list(self.levels)}
        if self.values is not None:
            payload["values"] = self.values.tolist()
        return payload

    def __repr__(self) -> str:
        """Repr special method."""
        values = None if self.values is None else self.values.tolist()
        return f"CriterionScale(name={self.name!r}, levels={self.levels!r}, values={values!r})"


class ProductModel:
    """
    A finite product set ``X = X_1 × … × X_n`` with optional value functions and capacity.

    Attributes:
        scales (list[CriterionScale]): One scale per criterion.
        capacity (MobiusRep | None): Möbius coefficients, when the model carries them.

    Example:
        .. code-block:: python

            >>> model = ProductModel([
            ...     CriterionScale("price", ["high", "low"], [0.0, 1.0]),
            ...     CriterionScale("quality", ["poor", "fair", "good"], [0.0, 0.5, 1.0]),
            ... ])
            >>> model.shape
            (2, 3)
    """

    def __init__(self, scales: Sequence[CriterionScale], capacity: MobiusRep | None = None) -> None:
        """Initialize the instance."""
        self.scales = list(scales)
        if not self.scales:
            raise StructuralError("a product model needs at least one criterion")
        if capacity is not None and capacity.n != len(self.scales):
            raise StructuralError(
                f"capacity is defined on {capacity.n} criteria, model has {len(self.scales)}"
            )
        self.capacity = capacity

    @property
    def n(self) -> int:
        return len(self.scales)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(scale.size for scale in self.scales)

    @property
    def grid_size(self) -> int:
        return prod(self.shape)

    @property
    def has_values(self) -> bool:
        return all(scale.values is not None for scale in self.scales)

    def check_alternative(self, alternative: Sequence[int]) -> Alternative:
        """Return ``alternative`` as a tuple, or raise if a level index is out of range."""
        coords = tuple(int(level) for level in alternative)
        if len(coords) != self.n:
            raise InvalidAlternative(f"alternative {coords} has {len(coords)} coordinates, expected {self.n}")
        for i, (level, scale) in enumerate(zip(coords, self.scales)):
            if not 0 <= level < scale.size:
                raise InvalidAlternative(
                    f"alternative {coords}: level {level} of criterion {i + 1} is outside 0..{scale.size - 1}"
                )
        return coords

    def value_matrix(self, alternatives: Sequence[Sequence[int]]) -> np.ndarray:
        """Scores ``f_i(x_i)`` of every alternative, shape ``(k, n)``."""
        if not self.has_values:
            missing = [scale.name for scale in self.scales if scale.values is None]
            raise MissingValueFunctions(f"criteria without value functions: {', '.join(missing)}")
        coords = np.array([self.check_alternative(alt) for alt in alternatives], dtype=np.int64).reshape(-1, self.n)
        return np.column_stack([scale.values[coords[:, i]] for i, scale in enumerate(self.scales)])

    def validate(self) -> list[str]:
        """
        Structural audit: at least two criteria, two levels per scale, strictly increasing values.
        """
        problems: list[str] = []
        if self.n < 2:
            problems.append(f"axiom analysis needs n >= 2, model has n={self.n}")
        for i, scale in enumerate(self.scales):
            if scale.size < 2:
                problems.append(f"criterion {i + 1} ({scale.name}) has a single level")
            if scale.values is not None and not scale.is_strictly_increasing():
                problems.append(
                    f"criterion {i + 1} ({scale.name}) values are not strictly increasing: {scale.values.tolist()}"
                )
        return problems

    def raise_for_collapsed(self) -> None:
        for i, scale in enumerate(self.scales):
            if scale.values is not None and not scale.is_strictly_increasing():
                raise CollapsedLevels(
                    f"criterion {i + 1} ({scale.name}) values are not strictly increasing: {scale.values.tolist()}"
                )

    def with_values(self, values: Sequence[Sequence[float] | None], capacity: MobiusRep | None = None) -> ProductModel:
        scales = [scale.with_values(vals) for scale, vals in zip(self.scales, values)]
        return ProductModel(scales, capacity if capacity is not None else self.capacity)

    def to_dict(self) -> dict:
        payload: dict = {"criteria": [scale.to_dict() for scale in self.scales]}
        if self.capacity is not None:
            payload["capacity"] = self.capacity.to_dict()
        return payload

    def __repr__(self) -> str:
        """Repr special method."""
        return f"ProductModel(shape={self.shape!r}, names={[s.name for s in self.scales]!r}, capacity={self.capacity!r})"
