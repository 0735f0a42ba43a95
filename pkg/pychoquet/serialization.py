"""JSON files for capacities, models, preferences, reports and fit results."""
from __future__ import annotations

__all__ = [
    "capacity_from_dict",
    "model_from_dict",
    "preferences_from_dict",
    "transform_from_dict",
    "load_capacity",
    "load_model",
    "load_preferences",
    "load_reports",
    "load_fit_result",
    "load_transform",
    "dump_json",
]

import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np
from pydantic import BaseModel, ValidationError

from pychoquet.capacity import mobius_of
from pychoquet.logging_utils import get_logger

# Exceptions
from pychoquet.exceptions import InvalidFileFormat, StructuralError

# Models
from pychoquet.models.capacity_model import Capacity, MobiusRep, parse_subset_key
from pychoquet.models.fit_model import CliqueTransform, FitResult
from pychoquet.models.preference_model import PreferenceKind, PreferenceStatement, PreferenceStructure
from pychoquet.models.product_model import CriterionScale, ProductModel
from pychoquet.models.report_model import AxiomReport
from pychoquet.models.schema_model import (
    AxiomReportFile,
    CapacityFile,
    FitResultFile,
    ModelFile,
    PreferenceFile,
    TransformFile,
)

logger = get_logger("serialization")


def _read(path: str | Path, schema: type[BaseModel]) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidFileFormat(f"cannot read {path}: {exc}") from exc
    return _parse(text, schema, str(path))


def _parse(payload: str | dict | list, schema: type[BaseModel], source: str) -> Any:
    try:
        if isinstance(payload, str):
            return schema.model_validate_json(payload)
        return schema.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise InvalidFileFormat(f"{source}: {where}: {first['msg']}") from exc


def _capacity(data: CapacityFile) -> Capacity | MobiusRep:
    size = 1 << data.n
    values = np.full(size, np.nan if data.kind == "capacity" else 0.0)
    try:
        for key, value in data.values.items():
            values[parse_subset_key(key, data.n)] = value
    except StructuralError as exc:
        raise InvalidFileFormat(str(exc)) from exc

    if data.kind == "mobius":
        return MobiusRep(values, n=data.n)
    missing = np.flatnonzero(np.isnan(values))
    if missing.size:
        raise InvalidFileFormat(f"capacity file misses {missing.size} subsets, first bitmask {int(missing[0])}")
    return Capacity(values, n=data.n)


def capacity_from_dict(payload: dict) -> Capacity | MobiusRep:
    """A :class:`Capacity` or :class:`MobiusRep`; missing Möbius subsets are 0, missing capacity subsets an error."""
    return _capacity(_parse(payload, CapacityFile, "capacity"))


def _model(data: ModelFile) -> ProductModel:
    try:
        scales = [CriterionScale(scale.name, scale.levels, scale.values) for scale in data.criteria]
        capacity = None
        if data.capacity is not None:
            parsed = _capacity(data.capacity)
            capacity = parsed if isinstance(parsed, MobiusRep) else mobius_of(parsed)
        return ProductModel(scales, capacity)
    except StructuralError as exc:
        raise InvalidFileFormat(str(exc)) from exc


def model_from_dict(payload: dict) -> ProductModel:
    return _model(_parse(payload, ModelFile, "model"))


def _preferences(data: PreferenceFile, model: ProductModel | None) -> PreferenceStructure:
    if model is None:
        model = _grid_model(data.alternatives)
    pairs = [PreferenceStatement(p.better, p.worse, p.strict) for p in data.pairs or []]
    return PreferenceStructure(model, data.alternatives, PreferenceKind(data.kind), ranks=data.ranks, pairs=pairs)


def _grid_model(alternatives: list[list[int]]) -> ProductModel:
    # without a model file the grid is the bounding box of the alternatives
    if not alternatives:
        raise InvalidFileFormat("preferences without a model need at least one alternative")
    coords = np.asarray(alternatives, dtype=np.int64)
    if coords.ndim != 2 or coords.min() < 0:
        raise InvalidFileFormat("alternatives must be equally long lists of non-negative level indices")
    sizes = coords.max(axis=0) + 1
    return ProductModel([CriterionScale(f"c{i + 1}", list(range(int(size)))) for i, size in enumerate(sizes)])


def preferences_from_dict(payload: dict, model: ProductModel | None = None) -> PreferenceStructure:
    """
    Preferences on ``model``, or on the smallest grid holding every alternative when no model is given.
    """
    return _preferences(_parse(payload, PreferenceFile, "preferences"), model)


def transform_from_dict(payload: dict) -> CliqueTransform:
    data = _parse(payload, TransformFile, "transform")
    return CliqueTransform([[i - 1 for i in clique] for clique in data.cliques], data.alpha, data.beta)


def load_capacity(path: str | Path) -> Capacity | MobiusRep:
    return _capacity(_read(path, CapacityFile))


def load_model(path: str | Path) -> ProductModel:
    model = _model(_read(path, ModelFile))
    logger.debug("Loaded model path=%s shape=%s", path, model.shape)
    return model


def load_preferences(path: str | Path, model: ProductModel | None = None) -> PreferenceStructure:
    prefs = _preferences(_read(path, PreferenceFile), model)
    logger.debug("Loaded preferences path=%s kind=%s alternatives=%s", path, prefs.kind.value, len(prefs))
    return prefs


def load_transform(path: str | Path) -> CliqueTransform:
    data = _read(path, TransformFile)
    return CliqueTransform([[i - 1 for i in clique] for clique in data.cliques], data.alpha, data.beta)


def load_reports(path: str | Path) -> list[AxiomReport]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidFileFormat(f"cannot read reports from {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise InvalidFileFormat(f"{path}: a report file holds a JSON array")

    reports = []
    for entry in raw:
        data = _parse(entry, AxiomReportFile, str(path))
        reports.append(AxiomReport(data.axiom, data.status, witnesses=data.witnesses).parse_json(data.model_dump()))
    return reports


def load_fit_result(path: str | Path) -> FitResult:
    data = _read(path, FitResultFile)
    mobius = None
    if data.mobius is not None:
        parsed = _capacity(data.mobius)
        mobius = parsed if isinstance(parsed, MobiusRep) else mobius_of(parsed)
    return FitResult(
        data.status,
        mobius=mobius,
        max_violation=math.inf if data.max_violation is None else data.max_violation,
        active_constraints=data.active_constraints,
        min_slack=data.min_slack,
        epsilon=data.epsilon,
        message=data.message,
    )


def _plain(item: Any) -> Any:
    if hasattr(item, "to_dict"):
        return item.to_dict()
    if isinstance(item, np.generic):
        return item.item()
    if isinstance(item, np.ndarray):
        return item.tolist()
    if isinstance(item, (set, frozenset)):
        return sorted(item)
    raise TypeError(f"cannot serialize {type(item).__name__}")


def dump_json(obj: Any, path: str | Path | None = None) -> str:
    """
    JSON text of any value type exposing ``to_dict`` (or a list of them); written to ``path`` when given.
    """
    if isinstance(obj, Iterable) and not isinstance(obj, (dict, str)) and not hasattr(obj, "to_dict"):
        obj = [_plain(item) if hasattr(item, "to_dict") else item for item in obj]
    text = json.dumps(obj, default=_plain, indent=2, ensure_ascii=False)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text
