from __future__ import annotations

__all__ = [
    "SuiteStage",
    "StageResult",
    "SuiteReport",
]

from enum import Enum


class SuiteStage(str, Enum):
    VALIDATE = "validate"
    INDUCE = "induce"
    AXIOMS = "axioms"
    FIT = "fit"
    VERIFY = "verify"
    TRANSFORM = "transform"


class StageResult:
    """
    One stage of a round-trip run.

    Attributes:
        stage (SuiteStage): Stage name.
        passed (bool): Stage verdict.
        details (dict): Diagnostics, JSON friendly.
    """

    def __init__(self, stage: SuiteStage | str, passed: bool, details: dict | None = None) -> None:
        """Initialize the instance."""
        self.stage = SuiteStage(stage)
        self.passed = passed
        self.details = details or {}

    def to_dict(self) -> dict:
        return {"stage": self.stage.value, "passed": self.passed, "details": self.details}

    def __repr__(self) -> str:
        """Repr special method."""
        return f"StageResult(stage={self.stage.value!r}, passed={self.passed!r})"


class SuiteReport:
    """
    Stage results of a round-trip run, stopping at the first failing stage.

    Attributes:
        seed (int): Seed of the run.
        stages (list[StageResult]): Stages in execution order.
    """

    def __init__(self, seed: int, stages: list[StageResult] | None = None) -> None:
        """Initialize the instance."""
        self.seed = seed
        self.stages = stages or []

    @property
    def passed(self) -> bool:
        return bool(self.stages) and all(stage.passed for stage in self.stages) and len(self.stages) == len(SuiteStage)

    @property
    def failed_stage(self) -> SuiteStage | None:
        for stage in self.stages:
            if not stage.passed:
                return stage.stage
        return None

    def stage(self, name: SuiteStage | str) -> StageResult | None:
        wanted = SuiteStage(name)
        return next((stage for stage in self.stages if stage.stage is wanted), None)

    def to_dict(self) -> dict:
        failed = self.failed_stage
        return {
            "seed": self.seed,
            "passed": self.passed,
            "failed_stage": None if failed is None else failed.value,
            "stages": [stage.to_dict() for stage in self.stages],
        }

    def __repr__(self) -> str:
        """Repr special method."""
        return f"SuiteReport(seed={self.seed!r}, passed={self.passed!r}, stages={len(self.stages)})"
