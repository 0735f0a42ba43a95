__all__ = [
    "StructuralError",
    "InvalidAlternative",
    "InvalidFileFormat",
    "CriterionLimitExceeded",
    "GridCapExceeded",
    "MissingValueFunctions",
    "CollapsedLevels",
    "IncompleteOrdering",
    "RelationUndetermined",
    "RelationIncomplete",
    "CliqueIncompatibility",
    "LemmaPreconditionError",
    "SolverError",
]


class StructuralError(Exception):
    """Raised when an input has the wrong length, shape or layout."""


class InvalidAlternative(StructuralError):
    """Raised when an alternative references a level outside its scale."""


class InvalidFileFormat(StructuralError):
    """Raised when a capacity, model or preference file cannot be parsed."""


class CriterionLimitExceeded(Exception):
    """Raised when the number of criteria is above the supported limit."""

    def __init__(self, n: int, limit: int) -> None:
        super().__init__(f"{n} criteria requested, at most {limit} are supported here")
        self.n = n
        self.limit = limit


class GridCapExceeded(Exception):
    """Raised when the product grid holds more alternatives than the cap allows."""

    def __init__(self, size: int, cap: int) -> None:
        super().__init__(f"grid has {size} alternatives, cap is {cap}")
        self.size = size
        self.cap = cap


class MissingValueFunctions(Exception):
    """Raised when an operation needs value functions a scale does not carry."""


class CollapsedLevels(Exception):
    """Raised when two levels of a scale share a value or are indifferent everywhere."""


class IncompleteOrdering(Exception):
    """Raised when a coordinate ordering does not rank every criterion."""


class RelationUndetermined(Exception):
    """Raised when the coordinate relations cannot be derived from the preference data."""


class RelationIncomplete(Exception):
    """Raised when no coordinate of a subset is minimal for the relation at a point."""


class CliqueIncompatibility(Exception):
    """Raised when a clique partition splits a subset carrying Möbius mass."""

    def __init__(self, subset: frozenset[int], mass: float) -> None:
        members = ",".join(str(i + 1) for i in sorted(subset))
        super().__init__(f"subset {{{members}}} straddles two cliques but has m={mass:.6g}")
        self.subset = subset
        self.mass = mass


class LemmaPreconditionError(Exception):
    """Raised when two coordinate orderings disagree on a pair crossing the subset boundary."""


class SolverError(Exception):
    """Raised when the linear program fails for numerical reasons."""
