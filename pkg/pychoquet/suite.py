"""Round trip from a generating model through the axioms, the fit and uniqueness transforms."""
from __future__ import annotations

__all__ = [
    "SINGLE_CLIQUE_TOLERANCE",
    "roundtrip_suite",
    "roundtrip_trials",
    "smallest_gap",
]

from typing import Sequence

import numpy as np

from pychoquet.axioms import GATING_AXIOMS, AxiomChecker
from pychoquet.capacity import capacity_of, choquet_many, classify_special, cliques_from_mobius, validate_capacity
from pychoquet.logging_utils import get_seeded_logger
from pychoquet.product import enumerate_grid, induced_order, random_model
from pychoquet.representation import RepresentationEngine

# Models
from pychoquet.models.capacity_model import MobiusRep
from pychoquet.models.fit_model import FitProblem
from pychoquet.models.options_model import CheckerOptions, EngineOptions
from pychoquet.models.product_model import ProductModel
from pychoquet.models.report_model import AxiomStatus
from pychoquet.models.suite_model import StageResult, SuiteReport, SuiteStage

SINGLE_CLIQUE_TOLERANCE: float = 1e-12


def smallest_gap(values: np.ndarray, tolerance: float) -> float | None:
    """Smallest difference above ``tolerance`` between sorted values, None if every value ties."""
    ordered = np.sort(np.asarray(values, dtype=float).reshape(-1))
    gaps = np.diff(ordered)
    gaps = gaps[gaps > tolerance]
    return float(gaps.min()) if gaps.size else None


def roundtrip_suite(
    model: ProductModel,
    m: MobiusRep | None = None,
    seed: int = 0,
    checker_options: CheckerOptions | None = None,
    engine_options: EngineOptions | None = None,
    axioms: Sequence[str] | None = None,
    transforms: int = 10,
) -> SuiteReport:
    """
    Run every stage on the preferences ``m`` induces on the full grid of ``model``.

    Stages: validate the model and capacity, induce the order, run the axiom
    battery, fit a capacity, check the refit reproduces the ranks, then apply
    ``transforms`` random clique transforms and check the ranks after each.
    With a single clique the transformed coefficients must also equal the
    original ones. The run stops at the first failing stage. A8 and A9 are
    reported but never fail the run.

    Args:
        model (ProductModel): Model with values.
        m (MobiusRep | None): Generating coefficients, ``model.capacity`` by default.
        seed (int): Seed of the clique transforms and of any subsampling.
        transforms (int): Number of random clique transforms.
    """
    engine_options = engine_options or EngineOptions(seed=seed)
    checker_options = checker_options or CheckerOptions(seed=seed, tolerance=engine_options.tolerance)
    m = model.capacity if m is None else m
    report = SuiteReport(seed)
    tau = engine_options.tolerance
    rng = np.random.default_rng(seed)
    log = get_seeded_logger("suite", seed=seed)

    def stage(name: SuiteStage, passed: bool, **details) -> bool:
        report.stages.append(StageResult(name, passed, details))
        log.info("stage=%s passed=%s", name.value, passed)
        return passed

    problems = model.validate()
    if m is None:
        problems.append("model carries no capacity")
    else:
        problems.extend(validate_capacity(capacity_of(m), tau))
    if not model.has_values:
        problems.append("model scales carry no values")
    if not stage(SuiteStage.VALIDATE, not problems, problems=problems):
        return report

    prefs = induced_order(m, model, tolerance=tau, grid_cap=checker_options.grid_cap)
    generator_values = choquet_many(m, model.value_matrix(enumerate_grid(model, checker_options.grid_cap)))
    stage(SuiteStage.INDUCE, True, classes=int(prefs.ranks.max()), alternatives=len(prefs))

    reports = AxiomChecker(checker_options).run(prefs, axioms)
    gating = [r for r in reports if r.axiom in GATING_AXIOMS]
    statuses = {r.axiom: r.status.value for r in reports}
    failing = [r.axiom for r in gating if r.status not in (AxiomStatus.PASS, AxiomStatus.NOT_APPLICABLE)]
    if not stage(SuiteStage.AXIOMS, not failing, statuses=statuses, failing=failing):
        return report

    engine = RepresentationEngine(engine_options)
    epsilon = engine.default_epsilon(model)
    gap = smallest_gap(generator_values, tau)
    if gap is not None:
        epsilon = min(epsilon, gap / 2)
    fit = engine.fit_capacity(FitProblem(model, prefs, epsilon, engine_options))
    if not stage(SuiteStage.FIT, fit.feasible, **fit.to_dict()):
        return report

    grouping = max(tau, min(1e-7, epsilon / 4))
    refit = induced_order(fit.mobius, model, tolerance=grouping, grid_cap=checker_options.grid_cap)
    validation = engine.verify_representation(fit.mobius, model, prefs, tolerance=grouping)
    same_ranks = bool(np.array_equal(refit.ranks, prefs.ranks))
    if not stage(
        SuiteStage.VERIFY,
        same_ranks and validation.ok,
        same_ranks=same_ranks,
        mismatches=validation.mismatches[:10],
        fitted_case=classify_special(fit.mobius, grouping).value,
    ):
        return report

    cliques = cliques_from_mobius(m, tau)
    moves = []
    drift = None
    unchanged = True
    for _ in range(transforms):
        transform = engine.random_transform(cliques, rng)
        moved, moved_model = engine.apply_uniqueness_transform(m, model, transform)
        moved_prefs = induced_order(moved, moved_model, tolerance=tau, grid_cap=checker_options.grid_cap)
        same = bool(np.array_equal(moved_prefs.ranks, prefs.ranks))
        if len(cliques) == 1:
            change = float(np.max(np.abs(moved.coeffs - m.coeffs)))
            drift = change if drift is None else max(drift, change)
            same = same and change <= SINGLE_CLIQUE_TOLERANCE
        if not same:
            log.warning("Transform changed the generator transform=%s", transform.to_dict())
        unchanged = unchanged and same
        moves.append(transform.to_dict())
    stage(SuiteStage.TRANSFORM, unchanged, transforms=moves, single_clique_drift=drift)
    return report


def roundtrip_trials(
    n: int = 3,
    levels: int = 3,
    trials: int = 20,
    seed: int = 0,
    family: str = "random",
    duplicate_values: bool = False,
    checker_options: CheckerOptions | None = None,
    engine_options: EngineOptions | None = None,
    axioms: Sequence[str] | None = None,
    transforms: int = 10,
) -> list[SuiteReport]:
    """Round trips on ``trials`` generated models; trial ``k`` uses seed ``seed + k``."""
    results = []
    for trial in range(trials):
        trial_seed = seed + trial
        model = random_model(n, levels, np.random.default_rng(trial_seed), family, duplicate_values)
        result = roundtrip_suite(
            model,
            seed=trial_seed,
            checker_options=checker_options,
            engine_options=engine_options,
            axioms=axioms,
            transforms=transforms,
        )
        results.append(result)
        if not result.passed:
            get_seeded_logger("suite", seed=trial_seed, trial=trial).warning(
                "Trial failed family=%s stage=%s", family, result.failed_stage.value
            )
    return results
