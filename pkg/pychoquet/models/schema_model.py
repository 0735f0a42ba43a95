from __future__ import annotations

__all__ = [
    "CapacityFile",
    "ScaleFile",
    "ModelFile",
    "StatementFile",
    "PreferenceFile",
    "AxiomReportFile",
    "FitResultFile",
    "TransformFile",
]

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from pychoquet.models.capacity_model import MAX_CRITERIA


class CapacityFile(BaseModel):
    """``{"n": 2, "kind": "mobius", "values": {"1": 0.3, "2": 0.5, "1,2": 0.2}}``; the empty set is ``""``."""

    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=0, le=MAX_CRITERIA)
    kind: Literal["capacity", "mobius"]
    values: dict[str, float]


class ScaleFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    levels: list[str | int | float] = Field(min_length=1)
    values: list[float] | None = None

    @model_validator(mode="after")
    def _values_match_levels(self) -> ScaleFile:
        if self.values is not None and len(self.values) != len(self.levels):
            raise ValueError(f"criterion {self.name!r} has {len(self.levels)} levels but {len(self.values)} values")
        return self


class ModelFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    criteria: list[ScaleFile] = Field(min_length=1)
    capacity: CapacityFile | None = None


class StatementFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    better: int = Field(ge=0)
    worse: int = Field(ge=0)
    strict: bool = True


class PreferenceFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["ranked", "pairs"]
    alternatives: list[list[int]]
    ranks: list[int] | None = None
    pairs: list[StatementFile] | None = None

    @model_validator(mode="after")
    def _payload_matches_kind(self) -> PreferenceFile:
        if self.kind == "ranked":
            if self.ranks is None or len(self.ranks) != len(self.alternatives):
                raise ValueError("ranked preferences need one rank per alternative")
            if self.pairs:
                raise ValueError("ranked preferences take no pairs")
        elif self.ranks is not None:
            raise ValueError("pair preferences take no ranks")
        return self


class AxiomReportFile(BaseModel):
    axiom: str
    status: Literal["PASS", "FAIL", "UNDETERMINED", "NOT_APPLICABLE"]
    witnesses: list = Field(default_factory=list)
    checked: int = 0
    violated: int = 0
    coverage: float = Field(default=1.0, ge=0.0, le=1.0)
    seed: int | None = None
    notes: list[str] = Field(default_factory=list)


class FitResultFile(BaseModel):
    status: Literal["FEASIBLE", "INFEASIBLE"]
    mobius: CapacityFile | None = None
    max_violation: float | None = None
    active_constraints: int = 0
    min_slack: float = 0.0
    epsilon: float = 0.0
    message: str = ""


class TransformFile(BaseModel):
    """Cliques with 1-based criteria, one scale and one shift per clique."""

    model_config = ConfigDict(extra="forbid")

    cliques: list[list[int]] = Field(min_length=1)
    alpha: list[float]
    beta: list[float] | None = None
