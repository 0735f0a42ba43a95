from __future__ import annotations

__all__ = [
    "FitStatus",
    "FitProblem",
    "FitResult",
    "CliqueTransform",
]

import math
from enum import Enum
from typing import Iterable, Sequence

from pychoquet.exceptions import StructuralError
from pychoquet.models.capacity_model import MobiusRep, subset_label, subset_bits
from pychoquet.models.options_model import EngineOptions
from pychoquet.models.preference_model import PreferenceStructure
from pychoquet.models.product_model import ProductModel


class FitStatus(str, Enum):
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"


class FitProblem:
    """
    Capacity identification problem with fixed value functions.

    Attributes:
        model (ProductModel): Model whose scales all carry values.
        prefs (PreferenceStructure): Preferences over alternatives of ``model``.
        epsilon (float | None): Strict preference margin; ``None`` takes the
            engine default of 1e-3 times the value span.
        options (EngineOptions): Solver tolerance and iteration cap.
    """

    def __init__(
        self,
        model: ProductModel,
        prefs: PreferenceStructure,
        epsilon: float | None = None,
        options: EngineOptions | None = None,
    ) -> None:
        """Initialize the instance."""
        if epsilon is not None and epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if prefs.model.shape != model.shape:
            raise StructuralError(f"preferences live on grid {prefs.model.shape}, model grid is {model.shape}")

        self.model = model
        self.prefs = prefs
        self.epsilon = epsilon
        self.options = options or EngineOptions()

    def __repr__(self) -> str:
        """Repr special method."""
        return f"FitProblem(shape={self.model.shape!r}, prefs={self.prefs!r}, epsilon={self.epsilon!r})"


class FitResult:
    """
    Outcome of :meth:`pychoquet.representation.RepresentationEngine.fit_capacity`.

    Attributes:
        status (FitStatus): FEASIBLE or INFEASIBLE.
        mobius (MobiusRep | None): Fitted coefficients when feasible.
        max_violation (float): Largest shortfall of a strict constraint below its margin, 0 when feasible.
        active_constraints (int): Inequalities binding at the optimum.
        min_slack (float): Optimal smallest slack ``t*`` of the strict constraints.
        epsilon (float): Margin the problem was solved with.
        message (str): Solver message.
    """

    def __init__(
        self,
        status: FitStatus | str,
        mobius: MobiusRep | None = None,
        max_violation: float = 0.0,
        active_constraints: int = 0,
        min_slack: float = 0.0,
        epsilon: float = 0.0,
        message: str = "",
    ) -> None:
        """Initialize the instance."""
        self.status = FitStatus(status)
        self.mobius = mobius
        self.max_violation = max_violation
        self.active_constraints = active_constraints
        self.min_slack = min_slack
        self.epsilon = epsilon
        self.message = message

    @property
    def feasible(self) -> bool:
        return self.status is FitStatus.FEASIBLE

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "mobius": None if self.mobius is None else self.mobius.to_dict(),
            "max_violation": self.max_violation if math.isfinite(self.max_violation) else None,
            "active_constraints": self.active_constraints,
            "min_slack": self.min_slack,
            "epsilon": self.epsilon,
            "message": self.message,
        }

    def __repr__(self) -> str:
        """Repr special method."""
        return (
            f"FitResult(status={self.status.value!r}, max_violation={self.max_violation!r}, "
            f"active_constraints={self.active_constraints!r}, min_slack={self.min_slack!r})"
        )


class CliqueTransform:
    """
    Positive affine change of scale per clique: ``f_i = α_A g_i + β_A`` for ``i ∈ A``.

    Attributes:
        cliques (list[frozenset[int]]): Partition of the 0-based criteria.
        alpha (list[float]): Scale of every clique, positive.
        beta (list[float]): Shift of every clique.
    """

    def __init__(
        self,
        cliques: Iterable[Iterable[int]],
        alpha: Sequence[float],
        beta: Sequence[float] | None = None,
    ) -> None:
        """Initialize the instance."""
        self.cliques = [frozenset(int(i) for i in clique) for clique in cliques]
        self.alpha = [float(a) for a in alpha]
        self.beta = [0.0] * len(self.cliques) if beta is None else [float(b) for b in beta]

        if len(self.alpha) != len(self.cliques) or len(self.beta) != len(self.cliques):
            raise StructuralError(
                f"{len(self.cliques)} cliques need as many scales and shifts, "
                f"got {len(self.alpha)} and {len(self.beta)}"
            )
        if any(a <= 0 for a in self.alpha):
            raise ValueError(f"clique scales must be positive, got {self.alpha}")

        seen: set[int] = set()
        for clique in self.cliques:
            if not clique or clique & seen:
                raise StructuralError(f"cliques must be nonempty and disjoint, got {self.describe()}")
            seen |= clique

    @classmethod
    def identity(cls, cliques: Iterable[Iterable[int]]) -> CliqueTransform:
        listed = list(cliques)
        return cls(listed, [1.0] * len(listed))

    def covers(self, n: int) -> bool:
        return set().union(*self.cliques) == set(range(n))

    def clique_of(self, criterion: int) -> int:
        for index, clique in enumerate(self.cliques):
            if criterion in clique:
                return index
        raise StructuralError(f"criterion {criterion + 1} is in no clique")

    def describe(self) -> str:
        return ", ".join(subset_label(subset_bits(clique)) for clique in self.cliques)

    def to_dict(self) -> dict:
        return {
            "cliques": [sorted(i + 1 for i in clique) for clique in self.cliques],
            "alpha": self.alpha,
            "beta": self.beta,
        }

    def __repr__(self) -> str:
        """Repr special method."""
        return f"CliqueTransform(cliques={self.describe()!r}, alpha={self.alpha!r}, beta={self.beta!r})"
