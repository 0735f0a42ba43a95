"""Capacity identification, representation checks and uniqueness transforms."""
from __future__ import annotations

__all__ = [
    "RepresentationEngine",
]

import math
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from pychoquet.capacity import capacity_of, choquet_many, clique_integrals, cliques_from_mobius, subset_minima, weights_for_ordering
from pychoquet.logging_utils import get_logger

# Exceptions
from pychoquet.exceptions import (
    CliqueIncompatibility,
    CriterionLimitExceeded,
    LemmaPreconditionError,
    RelationIncomplete,
    SolverError,
    StructuralError,
)

# Models
from pychoquet.models.capacity_model import Capacity, MobiusRep, subset_bits, subset_members
from pychoquet.models.fit_model import CliqueTransform, FitProblem, FitResult, FitStatus
from pychoquet.models.options_model import EngineOptions
from pychoquet.models.preference_model import PreferenceKind, PreferenceStructure
from pychoquet.models.product_model import ProductModel
from pychoquet.models.relation_model import ConeRelationTable
from pychoquet.models.report_model import ValidationReport

# scipy.optimize.linprog status codes
_LP_OPTIMAL = 0
_LP_INFEASIBLE = 2

DEFAULT_RELATIVE_EPSILON: float = 1e-3


def _value_span(model: ProductModel) -> float:
    values = np.concatenate([scale.values for scale in model.scales])
    return float(values.max() - values.min()) if values.size else 0.0


def _monotonicity_rows(n: int) -> sparse.csr_matrix:
    # one row per (A, i ∈ A): ν(A) − ν(A∖{i}) = Σ_{B⊆A, i∈B} m(B)
    bits = np.arange(1, 1 << n)
    rows, cols = [], []
    row = 0
    for a in bits:
        inside = bits[(bits & ~a) == 0]
        for i in subset_members(int(a)):
            members = inside[(inside >> i) & 1 == 1]
            rows.append(np.full(members.size, row))
            cols.append(members - 1)
            row += 1
    rows_array, cols_array = np.concatenate(rows), np.concatenate(cols)
    data = np.ones(rows_array.size)
    return sparse.csr_matrix((data, (rows_array, cols_array)), shape=(row, bits.size))


class RepresentationEngine:
    """
    Fits a capacity to preferences and checks Choquet representations.

    The fit is a linear program over the Möbius coefficients of every nonempty
    subset with fixed value functions. It maximises the smallest slack ``t``
    of the strict preference constraints ``D·m − ε ≥ t`` under normalisation
    and monotonicity, and is FEASIBLE when ``t* ≥ 0`` up to the solver tolerance.

    Attributes:
        options (EngineOptions): Margin, solver tolerance, limits and seed.

    Example:
        .. code-block:: python

            >>> engine = RepresentationEngine()
            >>> result = engine.fit_capacity(FitProblem(model, prefs))
            >>> result.status
            <FitStatus.FEASIBLE: 'FEASIBLE'>
    """

    def __init__(self, options: EngineOptions | None = None) -> None:
        """Initialize the instance."""
        self.options = options or EngineOptions()
        self.logger = get_logger("representation")

    def default_epsilon(self, model: ProductModel) -> float:
        """Configured margin, or 1e-3 of the model's value span."""
        if self.options.epsilon is not None:
            return self.options.epsilon
        span = _value_span(model)
        return DEFAULT_RELATIVE_EPSILON * (span if span > 0 else 1.0)

    def _difference_rows(self, prefs: PreferenceStructure, minima: np.ndarray) -> tuple[list, list]:
        strict, equal = [], []
        if prefs.kind is PreferenceKind.RANKED:
            representatives: dict[int, int] = {}
            for index, rank in enumerate(prefs.ranks.tolist()):
                if rank in representatives:
                    equal.append(minima[index] - minima[representatives[rank]])
                else:
                    representatives[rank] = index
            classes = sorted(representatives)
            for better, worse in zip(classes, classes[1:]):
                strict.append(minima[representatives[better]] - minima[representatives[worse]])
        else:
            for statement in prefs.pairs:
                row = minima[statement.better] - minima[statement.worse]
                (strict if statement.strict else equal).append(row)
        return strict, equal

    def fit_capacity(self, problem: FitProblem) -> FitResult:
        """
        Identify Möbius coefficients reproducing the preferences with the given values.

        Raises:
            CriterionLimitExceeded: More criteria than ``options.criterion_limit``.
            MissingValueFunctions: A scale has no values.
            CollapsedLevels: Two levels of a scale share a value.
            SolverError: The solver stopped without an optimal or infeasible verdict.
        """
        model, prefs = problem.model, problem.prefs
        n = model.n
        limit = problem.options.criterion_limit
        if n > limit:
            raise CriterionLimitExceeded(n, limit)
        model.raise_for_collapsed()

        epsilon = problem.epsilon if problem.epsilon is not None else self.default_epsilon(model)
        tolerance = problem.options.solver_tolerance
        span = _value_span(model)
        size = (1 << n) - 1

        minima = subset_minima(model.value_matrix(prefs.alternatives))[:, 1:] if len(prefs) else np.zeros((0, size))
        strict, equal = self._difference_rows(prefs, minima)

        monotone = _monotonicity_rows(n)
        blocks = [sparse.hstack([-monotone, sparse.csr_matrix((monotone.shape[0], 1))])]
        bounds_ub = [np.zeros(monotone.shape[0])]
        if strict:
            rows = np.asarray(strict)
            blocks.append(sparse.csr_matrix(np.hstack([-rows, np.ones((rows.shape[0], 1))])))
            bounds_ub.append(np.full(rows.shape[0], -epsilon))

        a_eq = [np.append(np.ones(size), 0.0)]
        b_eq = [1.0]
        for row in equal:
            a_eq.append(np.append(row, 0.0))
            b_eq.append(0.0)

        objective = np.zeros(size + 1)
        objective[-1] = -1.0
        solver_options: dict = {
            "primal_feasibility_tolerance": tolerance,
            "dual_feasibility_tolerance": tolerance,
        }
        if problem.options.max_iterations is not None:
            solver_options["maxiter"] = problem.options.max_iterations

        self.logger.info(
            "Fitting capacity n=%s variables=%s strict=%s equal=%s epsilon=%.3g",
            n,
            size,
            len(strict),
            len(equal),
            epsilon,
        )
        res = linprog(
            objective,
            A_ub=sparse.vstack(blocks).tocsr(),
            b_ub=np.concatenate(bounds_ub),
            A_eq=np.asarray(a_eq),
            b_eq=np.asarray(b_eq),
            bounds=[(None, None)] * size + [(None, max(span, 1.0))],
            method="highs",
            options=solver_options,
        )

        if res.status == _LP_INFEASIBLE:
            self.logger.info("Fit infeasible n=%s message=%s", n, res.message)
            return FitResult(FitStatus.INFEASIBLE, max_violation=math.inf, epsilon=epsilon, message=res.message)
        if res.status != _LP_OPTIMAL:
            raise SolverError(f"linear program stopped with status {res.status}: {res.message}")

        slack_star = float(res.x[-1])
        active = int(np.sum(np.abs(res.slack) <= tolerance)) if res.slack is not None else 0
        mobius = MobiusRep(np.concatenate(([0.0], res.x[:-1])), n=n)
        if slack_star < -tolerance:
            status, fitted = FitStatus.INFEASIBLE, None
        else:
            status, fitted = FitStatus.FEASIBLE, mobius

        result = FitResult(
            status,
            mobius=fitted,
            max_violation=max(0.0, -slack_star),
            active_constraints=active,
            min_slack=slack_star,
            epsilon=epsilon,
            message=res.message,
        )
        self.logger.info("Fit done status=%s min_slack=%.3g active=%s", status.value, slack_star, active)
        return result

    def verify_representation(
        self,
        m: MobiusRep,
        model: ProductModel,
        prefs: PreferenceStructure,
        tolerance: float | None = None,
    ) -> ValidationReport:
        """
        Compare every stated comparison with the sign of the integral difference.

        Strict preferences need a difference above ``tolerance``, indifferences
        one within it. Ranked data is checked class by class: members of a class
        stay within ``tolerance`` of each other and every class sits strictly
        above the next one.
        """
        tau = self.options.tolerance if tolerance is None else tolerance
        values = choquet_many(m, model.value_matrix(prefs.alternatives)) if len(prefs) else np.zeros(0)
        alts = prefs.alternatives
        mismatches: list[dict] = []

        if prefs.kind is PreferenceKind.RANKED:
            checked = len(alts) * (len(alts) - 1) // 2
            classes = sorted(set(prefs.ranks.tolist()))
            members = {rank: np.flatnonzero(prefs.ranks == rank) for rank in classes}
            for rank in classes:
                group = values[members[rank]]
                if group.max() - group.min() > tau:
                    high, low = members[rank][np.argmax(group)], members[rank][np.argmin(group)]
                    mismatches.append(
                        {"stated": "~", "x": list(alts[high]), "y": list(alts[low]), "difference": float(group.max() - group.min())}
                    )
            for better, worse in zip(classes, classes[1:]):
                low = members[better][np.argmin(values[members[better]])]
                high = members[worse][np.argmax(values[members[worse]])]
                difference = float(values[low] - values[high])
                if difference <= tau:
                    mismatches.append({"stated": ">", "x": list(alts[low]), "y": list(alts[high]), "difference": difference})
        else:
            checked = len(prefs.pairs)
            for statement in prefs.pairs:
                difference = float(values[statement.better] - values[statement.worse])
                broken = difference <= tau if statement.strict else abs(difference) > tau
                if broken:
                    mismatches.append(
                        {
                            "stated": ">" if statement.strict else "~",
                            "x": list(alts[statement.better]),
                            "y": list(alts[statement.worse]),
                            "difference": difference,
                        }
                    )

        report = ValidationReport(checked, mismatches)
        self.logger.info("Verified representation checked=%s mismatches=%s", checked, len(mismatches))
        return report

    def apply_uniqueness_transform(
        self,
        m: MobiusRep,
        model: ProductModel,
        t: CliqueTransform,
    ) -> tuple[MobiusRep, ProductModel]:
        """
        Rescale values clique by clique and adjust the Möbius coefficients to match.

        New values are ``g_i = (f_i − β_A) / α_A`` and
        ``m'(B) = α_A m(B) / Σ_C α_C Σ_{∅≠B'⊆C} m(B')`` for ``B ⊆ A``.
        The new integral is a positive affine function of the old one.

        Raises:
            CliqueIncompatibility: A subset with nonzero mass straddles two cliques.
        """
        m.check_length()
        if not t.covers(m.n):
            raise StructuralError(f"cliques {t.describe()} do not partition the {m.n} criteria")

        tau = self.options.tolerance
        owner = np.full(len(m), -1)
        masks = [subset_bits(clique) for clique in t.cliques]
        bits = np.arange(len(m))
        for index, mask in enumerate(masks):
            owner[((bits & ~mask) == 0) & (bits != 0)] = index

        straddling = np.flatnonzero((owner < 0) & (bits != 0) & (np.abs(m.coeffs) > tau))
        if straddling.size:
            bad = int(straddling[0])
            raise CliqueIncompatibility(frozenset(subset_members(bad)), float(m.coeffs[bad]))

        alpha = np.asarray(t.alpha)
        scale = np.where(owner >= 0, alpha[np.maximum(owner, 0)], 0.0)
        weighted = scale * m.coeffs
        denominator = float(weighted.sum())
        if denominator <= 0:
            raise StructuralError(f"transform denominator {denominator:.6g} is not positive")

        transformed = MobiusRep(weighted / denominator, n=m.n)
        values = []
        for i, scale_i in enumerate(model.scales):
            clique = t.clique_of(i)
            values.append((scale_i.values - t.beta[clique]) / t.alpha[clique])

        self.logger.debug("Applied clique transform %s denominator=%.6g", t, denominator)
        return transformed, model.with_values(values, capacity=transformed)

    def random_transform(self, cliques: Iterable[Iterable[int]], rng: np.random.Generator) -> CliqueTransform:
        """Scales drawn from ``U[0.2, 5]`` and shifts from ``U[−2, 2]``, one per clique."""
        listed = [frozenset(clique) for clique in cliques]
        return CliqueTransform(listed, rng.uniform(0.2, 5.0, len(listed)), rng.uniform(-2.0, 2.0, len(listed)))

    def choquet_via_relations(
        self,
        m: MobiusRep,
        model: ProductModel,
        x: Sequence[int],
        table: ConeRelationTable,
    ) -> float:
        """
        ``Σ_A m(A) φ_i(x_i)`` with ``i`` minimal in ``A`` for the relation ``R^x``.

        When several coordinates qualify, one whose comparisons all come from
        informative cones is preferred, then the lowest index.

        Raises:
            RelationIncomplete: Some subset with mass has no minimal coordinate at ``x``.
        """
        m.check_length()
        alternative = model.check_alternative(x)
        point = table.point_index(alternative)
        relation = table.r[point]
        informative = table.informative[point] | np.eye(m.n, dtype=bool)
        scores = model.value_matrix([alternative])[0]

        total = 0.0
        for bits in m.support(0.0):
            members = subset_members(bits)
            candidates = [i for i in members if all(relation[j, i] for j in members if j != i)]
            if not candidates:
                raise RelationIncomplete(f"no minimal criterion of {{{','.join(str(i + 1) for i in members)}}} at {alternative}")
            sure = [i for i in candidates if all(informative[j, i] for j in members)]
            chosen = (sure or candidates)[0]
            total += m[bits] * float(scores[chosen])
        return total

    def check_A_NA(
        self,
        m: MobiusRep,
        c: Capacity | None,
        ordering_a: Sequence[float],
        ordering_b: Sequence[float],
        subset: Iterable[int],
    ) -> bool:
        """
        Two coordinate orderings that agree across the boundary of ``subset`` give it the same total weight.

        Orderings are per-criterion scores, higher meaning a larger value.

        Raises:
            LemmaPreconditionError: The orderings disagree on a pair with one criterion inside ``subset``.
        """
        capacity = capacity_of(m) if c is None else c
        inside = sorted(set(int(i) for i in subset))
        outside = [j for j in range(capacity.n) if j not in inside]
        first = np.asarray(ordering_a, dtype=float)
        second = np.asarray(ordering_b, dtype=float)

        for i in inside:
            for j in outside:
                if (first[i] >= first[j]) != (second[i] >= second[j]) or (first[j] >= first[i]) != (second[j] >= second[i]):
                    raise LemmaPreconditionError(
                        f"orderings disagree on criteria {i + 1} and {j + 1} across the subset boundary"
                    )

        total_a = float(weights_for_ordering(capacity, first)[inside].sum())
        total_b = float(weights_for_ordering(capacity, second)[inside].sum())
        return abs(total_a - total_b) <= self.options.tolerance

    def sub_capacity_decomposition(
        self,
        m: MobiusRep,
        f: Sequence[float],
        cliques: Sequence[Iterable[int]] | None = None,
    ) -> np.ndarray:
        """Per-clique integrals of ``f``; cliques default to the finest ones ``m`` allows."""
        blocks = cliques_from_mobius(m, self.options.tolerance) if cliques is None else list(cliques)
        return clique_integrals(m, f, blocks)

    def fit_over_candidates(
        self,
        model: ProductModel,
        prefs: PreferenceStructure,
        candidates: Sequence[Sequence[Sequence[float]]],
        epsilon: float | None = None,
    ) -> tuple[ProductModel, FitResult]:
        """
        Fit the capacity for every candidate value assignment and keep the best one.

        A feasible fit with the largest smallest slack wins; without any feasible
        fit the smallest violation is returned. Candidates whose values are not
        strictly increasing are skipped.
        """
        best: tuple[ProductModel, FitResult] | None = None
        for index, values in enumerate(candidates):
            candidate = model.with_values(values)
            problems = candidate.validate()
            if problems:
                self.logger.warning("Skipping candidate=%s reason=%s", index, problems[0])
                continue

            result = self.fit_capacity(FitProblem(candidate, prefs, epsilon, self.options))
            self.logger.debug("candidate=%s status=%s min_slack=%.3g", index, result.status.value, result.min_slack)
            if best is None or _better_fit(result, best[1]):
                best = (candidate, result)

        if best is None:
            raise StructuralError("no candidate value assignment is strictly increasing on every scale")
        return best


def _better_fit(result: FitResult, incumbent: FitResult) -> bool:
    if result.feasible != incumbent.feasible:
        return result.feasible
    if result.feasible:
        return result.min_slack > incumbent.min_slack
    return result.max_violation < incumbent.max_violation
