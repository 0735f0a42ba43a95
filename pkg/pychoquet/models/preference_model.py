from __future__ import annotations

__all__ = [
    "PreferenceKind",
    "PreferenceStatement",
    "PreferenceStructure",
    "MarginalOrder",
]

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from pychoquet.exceptions import StructuralError
from pychoquet.models.product_model import Alternative, ProductModel


class PreferenceKind(str, Enum):
    RANKED = "ranked"
    PAIRS = "pairs"


@dataclass(slots=True, frozen=True)
class PreferenceStatement:
    """``better ≻ worse`` when ``strict``, ``better ∼ worse`` otherwise; indices into the alternative list."""

    better: int
    worse: int
    strict: bool = True

    def to_dict(self) -> dict:
        return {"better": self.better, "worse": self.worse, "strict": self.strict}


class PreferenceStructure:
    """
    Preferences over alternatives of a :class:`ProductModel`.

    RANKED data gives every alternative a rank (1 is best, equal ranks are
    indifferent) and is a weak order by construction. PAIRS data is a list of
    explicit statements; nothing is inferred by transitivity.

    Attributes:
        model (ProductModel): The product set the alternatives live in.
        alternatives (list[Alternative]): Distinct alternatives referenced by the data.
        kind (PreferenceKind): RANKED or PAIRS.
        ranks (np.ndarray | None): Rank of every alternative (RANKED only).
        pairs (list[PreferenceStatement]): Statements (PAIRS only).
    """

    def __init__(
        self,
        model: ProductModel,
        alternatives: Sequence[Sequence[int]],
        kind: PreferenceKind | str,
        ranks: Sequence[int] | np.ndarray | None = None,
        pairs: Sequence[PreferenceStatement] | None = None,
    ) -> None:
        """Initialize the instance."""
        self.model = model
        self.kind = PreferenceKind(kind)
        self.alternatives: list[Alternative] = [model.check_alternative(alt) for alt in alternatives]
        self.index = {alt: k for k, alt in enumerate(self.alternatives)}
        if len(self.index) != len(self.alternatives):
            raise StructuralError("alternatives must be distinct")

        self.ranks = None
        self.pairs: list[PreferenceStatement] = []
        if self.kind is PreferenceKind.RANKED:
            if ranks is None or len(ranks) != len(self.alternatives):
                raise StructuralError("ranked preferences need one rank per alternative")
            self.ranks = np.asarray(ranks, dtype=np.int64)
            if self.ranks.size and self.ranks.min() < 1:
                raise StructuralError("ranks start at 1")
        else:
            for statement in pairs or []:
                for ref in (statement.better, statement.worse):
                    if not 0 <= ref < len(self.alternatives):
                        raise StructuralError(f"statement {statement} references alternative {ref} out of range")
            self.pairs = list(pairs or [])

        self._matrices: tuple[np.ndarray, np.ndarray] | None = None
        self._scores: np.ndarray | None = None
        self._scores_built = False

    def __len__(self) -> int:
        return len(self.alternatives)

    @property
    def covers_grid(self) -> bool:
        return len(self.alternatives) == self.model.grid_size

    def relation_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """
        ``(weak, strict)`` boolean matrices; ``weak`` is reflexive.

        For RANKED data they are read off the ranks.
        """
        if self._matrices is None:
            k = len(self.alternatives)
            if self.kind is PreferenceKind.RANKED:
                weak = self.ranks[:, None] <= self.ranks[None, :]
                strict = self.ranks[:, None] < self.ranks[None, :]
            else:
                weak = np.eye(k, dtype=bool)
                strict = np.zeros((k, k), dtype=bool)
                for statement in self.pairs:
                    weak[statement.better, statement.worse] = True
                    if statement.strict:
                        strict[statement.better, statement.worse] = True
                    else:
                        weak[statement.worse, statement.better] = True
            self._matrices = (weak, strict)
        return self._matrices

    def compare(self, x: int, y: int) -> int | None:
        """1 if ``x ≻ y``, -1 if ``y ≻ x``, 0 if ``x ∼ y``, None when the data is silent."""
        weak, strict = self.relation_matrices()
        if strict[x, y]:
            return 1
        if strict[y, x]:
            return -1
        if weak[x, y] and weak[y, x]:
            return 0
        return None

    def score_tensor(self) -> np.ndarray | None:
        """
        Grid-shaped array, higher is better, when the data is a weak order on the whole grid.

        Returns None for partial data or PAIRS data that is not a complete,
        consistent weak order.
        """
        if not self._scores_built:
            self._scores_built = True
            self._scores = self._build_scores()
        return self._scores

    def _build_scores(self) -> np.ndarray | None:
        if not self.covers_grid:
            return None

        if self.kind is PreferenceKind.RANKED:
            scores = -self.ranks.astype(float)
        else:
            weak, strict = self.relation_matrices()
            if not np.all(weak | weak.T):
                return None
            if np.any(strict & weak.T):
                return None
            wins = weak.sum(axis=1)
            if not np.array_equal(weak, wins[:, None] >= wins[None, :]):
                return None
            scores = wins.astype(float)

        tensor = np.empty(self.model.shape)
        coords = np.array(self.alternatives, dtype=np.int64)
        tensor[tuple(coords.T)] = scores
        tensor.setflags(write=False)
        return tensor

    def to_dict(self) -> dict:
        payload: dict = {
            "kind": self.kind.value,
            "alternatives": [list(alt) for alt in self.alternatives],
        }
        if self.kind is PreferenceKind.RANKED:
            payload["ranks"] = self.ranks.tolist()
        else:
            payload["pairs"] = [statement.to_dict() for statement in self.pairs]
        return payload

    def __repr__(self) -> str:
        """Repr special method."""
        return (
            f"PreferenceStructure(kind={self.kind.value!r}, alternatives={len(self.alternatives)}, "
            f"statements={len(self.pairs) if self.kind is PreferenceKind.PAIRS else None!r})"
        )


@dataclass(slots=True)
class MarginalOrder:
    """
    Per-criterion weak orders ``≽_i`` over levels.

    ``ranks[i][a]`` is the dense position of level ``a`` (0 is worst) or None
    when the order of criterion ``i`` is not available.
    """

    ranks: list[np.ndarray | None]
    failures: list[dict] = field(default_factory=list)
    undetermined: list[tuple[int, int, int]] = field(default_factory=list)
    collapsed: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and all(rank is not None for rank in self.ranks)

    def matches_declared(self) -> bool:
        """True when every ``≽_i`` is the strict declared level order."""
        return self.ok and all(np.array_equal(rank, np.arange(rank.size)) for rank in self.ranks)

    def to_dict(self) -> dict:
        return {
            "ranks": [None if rank is None else rank.tolist() for rank in self.ranks],
            "failures": self.failures,
            "undetermined": [{"criterion": i + 1, "levels": [a, b]} for i, a, b in self.undetermined],
            "collapsed": [{"criterion": i + 1, "levels": [a, b]} for i, a, b in self.collapsed],
        }
