from __future__ import annotations

__all__ = [
    "OutputFormat",
    "CommandConfig",
]

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path


class OutputFormat(str, Enum):
    JSON = "json"
    TEXT = "text"


@dataclass(slots=True)
class CommandConfig:
    """Options shared by the command line entry points."""

    subcommand: str
    inputs: list[Path] = field(default_factory=list)
    out: Path | None = None
    seed: int = 0
    budget: int | None = None
    epsilon: float | None = None
    tolerance: float | None = None
    format: OutputFormat = OutputFormat.TEXT

    def validate(self) -> None:
        """
        Raise ValueError on unreadable inputs, an unwritable output or non-positive numbers.
        """
        for path in self.inputs:
            if not path.is_file():
                raise ValueError(f"{self.subcommand}: cannot read {path}")
        if self.out is not None and not self.out.parent.exists():
            raise ValueError(f"{self.subcommand}: directory of {self.out} does not exist")
        for name in ("budget", "epsilon", "tolerance"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{self.subcommand}: --{name} must be positive, got {value}")
