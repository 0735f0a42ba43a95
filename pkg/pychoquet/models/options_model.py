from __future__ import annotations

__all__ = [
    "OptionsModel",
    "CheckerOptions",
    "EngineOptions",
    "DEFAULT_TOLERANCE",
    "DEFAULT_GRID_CAP",
    "DEFAULT_BUDGET",
]

from pychoquet.logging_utils import configure_logging

DEFAULT_TOLERANCE: float = 1e-9
DEFAULT_GRID_CAP: int = 10**6
DEFAULT_BUDGET: int = 10**7


class OptionsModel:
    """
    Shared options for the pychoquet services.

    Attributes:
        tolerance (float, default: 1e-9): Equality and monotonicity tolerance on reals.
        verbose (bool, default: False): Turn on DEBUG logging.
        log_level (str | int | None): Explicit logging level, overrides ``verbose``.
    """

    def __init__(
        self,
        tolerance: float = DEFAULT_TOLERANCE,
        verbose: bool = False,
        log_level: str | int | None = None,
    ) -> None:
        """Initialize the instance."""
        if tolerance < 0:
            raise ValueError("tolerance must be non-negative")

        self.tolerance = tolerance
        self.verbose = verbose
        self.log_level = log_level or ("DEBUG" if verbose else None)

        if self.log_level is not None:
            configure_logging(self.log_level)

    def __repr__(self) -> str:
        """Repr special method."""
        return f"{type(self).__name__}(tolerance={self.tolerance!r}, log_level={self.log_level!r})"


class CheckerOptions(OptionsModel):
    """
    Options for :class:`pychoquet.axioms.AxiomChecker`.

    Attributes:
        budget (int, default: 10**7): Relation lookups a single check may spend
            before it falls back to seeded subsampling.
        seed (int, default: 0): Seed of the subsampling generator.
        max_witnesses (int, default: 10): Witnesses kept per report.
        grid_cap (int, default: 10**6): Largest grid the checker accepts.
        sequence_length (int, default: 6): Longest standard sequence enumerated.
    """

    def __init__(
        self,
        budget: int = DEFAULT_BUDGET,
        seed: int = 0,
        max_witnesses: int = 10,
        grid_cap: int = DEFAULT_GRID_CAP,
        sequence_length: int = 6,
        tolerance: float = DEFAULT_TOLERANCE,
        verbose: bool = False,
        log_level: str | int | None = None,
    ) -> None:
        """Initialize the instance."""
        super().__init__(tolerance=tolerance, verbose=verbose, log_level=log_level)
        if budget <= 0 or max_witnesses <= 0 or grid_cap <= 0 or sequence_length < 2:
            raise ValueError("budget, max_witnesses and grid_cap must be positive, sequence_length at least 2")

        self.budget = budget
        self.seed = seed
        self.max_witnesses = max_witnesses
        self.grid_cap = grid_cap
        self.sequence_length = sequence_length


class EngineOptions(OptionsModel):
    """
    Options for :class:`pychoquet.representation.RepresentationEngine`.

    Attributes:
        epsilon (float | None): Strict preference margin. ``None`` means 1e-3 of
            the value span of the model being fitted.
        solver_tolerance (float, default: 1e-9): Primal/dual feasibility tolerance
            handed to the LP solver.
        max_iterations (int | None): Solver iteration cap.
        criterion_limit (int, default: 12): Largest n accepted by the fit.
        seed (int, default: 0): Seed for random clique transforms.
    """

    def __init__(
        self,
        epsilon: float | None = None,
        solver_tolerance: float = 1e-9,
        max_iterations: int | None = None,
        criterion_limit: int = 12,
        seed: int = 0,
        tolerance: float = DEFAULT_TOLERANCE,
        verbose: bool = False,
        log_level: str | int | None = None,
    ) -> None:
        """Initialize the instance."""
        super().__init__(tolerance=tolerance, verbose=verbose, log_level=log_level)
        if epsilon is not None and epsilon <= 0:
            raise ValueError("epsilon must be positive")

        self.epsilon = epsilon
        self.solver_tolerance = solver_tolerance
        self.max_iterations = max_iterations
        self.criterion_limit = criterion_limit
        self.seed = seed
