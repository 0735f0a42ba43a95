from __future__ import annotations

__all__ = [
    "AxiomStatus",
    "AxiomReport",
    "ValidationReport",
    "aggregate_status",
]

from enum import Enum
from typing import Iterable


class AxiomStatus(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    UNDETERMINED = "UNDETERMINED"
    NOT_APPLICABLE = "NOT_APPLICABLE"


class AxiomReport:
    """
    Outcome of one axiom check.

    Attributes:
        axiom (str): Axiom id, e.g. ``"A3"`` or ``"A3-ACYCL"``.
        status (AxiomStatus): PASS, FAIL, UNDETERMINED or NOT_APPLICABLE.
        witnesses (list): Concrete violating (or undetermined) tuples, bounded.
        checked (int): Instances examined.
        violated (int): Instances that violate the axiom.
        coverage (float): Share of the instance space examined, 1.0 when exhaustive.
        seed (int | None): Seed used for subsampling.
        notes (list[str]): Remarks attached to the verdict.
    """

    def __init__(
        self,
        axiom: str,
        status: AxiomStatus | str,
        witnesses: list | None = None,
        checked: int = 0,
        violated: int = 0,
        coverage: float = 1.0,
        seed: int | None = None,
        notes: list[str] | None = None,
    ) -> None:
        """Initialize the instance."""
        self.axiom = axiom
        self.status = AxiomStatus(status)
        self.witnesses = witnesses or []
        self.checked = checked
        self.violated = violated
        self.coverage = coverage
        self.seed = seed
        self.notes = notes or []

        if self.status is AxiomStatus.FAIL and not self.witnesses:
            raise ValueError(f"{axiom}: a failing report needs a witness")

    @property
    def passed(self) -> bool:
        return self.status in (AxiomStatus.PASS, AxiomStatus.NOT_APPLICABLE)

    def to_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "status": self.status.value,
            "witnesses": self.witnesses,
            "checked": self.checked,
            "violated": self.violated,
            "coverage": self.coverage,
            "seed": self.seed,
            "notes": self.notes,
        }

    def parse_json(self, data: dict) -> AxiomReport:
        """
        Parse the attributes from a json
        """
        for attr in data:
            self.__setattr__(attr, data[attr])
        self.status = AxiomStatus(self.status)
        return self

    def __repr__(self) -> str:
        """Repr special method."""
        return (
            f"AxiomReport(axiom={self.axiom!r}, status={self.status.value!r}, checked={self.checked!r}, "
            f"violated={self.violated!r}, coverage={self.coverage!r}, witnesses={len(self.witnesses)})"
        )


def aggregate_status(reports: Iterable[AxiomReport]) -> AxiomStatus:
    """FAIL beats UNDETERMINED beats PASS; UNDETERMINED never counts as a pass."""
    statuses = {report.status for report in reports}
    if AxiomStatus.FAIL in statuses:
        return AxiomStatus.FAIL
    if AxiomStatus.UNDETERMINED in statuses:
        return AxiomStatus.UNDETERMINED
    return AxiomStatus.PASS


class ValidationReport:
    """
    Result of comparing stated preferences with integral values.

    Attributes:
        checked (int): Comparisons evaluated.
        mismatches (list[dict]): One entry per comparison whose sign disagrees.
    """

    def __init__(self, checked: int = 0, mismatches: list[dict] | None = None) -> None:
        """Initialize the instance."""
        self.checked = checked
        self.mismatches = mismatches or []

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {"checked": self.checked, "mismatches": self.mismatches}

    def __repr__(self) -> str:
        """Repr special method."""
        return f"ValidationReport(checked={self.checked!r}, mismatches={len(self.mismatches)})"
