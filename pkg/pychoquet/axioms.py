"""Brute-force audits of the Choquet preference axioms on finite data."""
from __future__ import annotations

__all__ = [
    "AxiomChecker",
    "AXIOM_IDS",
    "GATING_AXIOMS",
]

from itertools import combinations, permutations
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from pychoquet.logging_utils import get_logger
from pychoquet.product import grid_coordinates, marginal_order
from pychoquet.relations import (
    audit_cone,
    build_partition,
    cancellation_witness,
    cliques_from_table,
    cone_levels,
    cone_matrix,
    essential_criteria,
    independence_witness,
)

# Exceptions
from pychoquet.exceptions import GridCapExceeded, RelationUndetermined

# Models
from pychoquet.models.options_model import CheckerOptions
from pychoquet.models.preference_model import PreferenceKind, PreferenceStructure
from pychoquet.models.relation_model import CellPartition, ConeRelationTable, ConeSpec, PartitionCell
from pychoquet.models.report_model import AxiomReport, AxiomStatus

AXIOM_IDS: tuple[str, ...] = (
    "A1",
    "A2",
    "A3",
    "A3-ACYCL",
    "COVERAGE",
    "A4",
    "A5",
    "A6",
    "A7",
    "A8",
    "A9",
    "MONO",
)

# A8 and A9 have no exact finite counterpart and never gate a verdict
GATING_AXIOMS: tuple[str, ...] = tuple(axiom for axiom in AXIOM_IDS if axiom not in ("A8", "A9"))

_NO_SCORES = "preferences are not a complete weak order on the whole grid"


def _context(shape: tuple[int, ...], i: int, flat: int) -> list[int]:
    others = shape[:i] + shape[i + 1:]
    return [int(c) for c in np.unravel_index(flat, others)] if others else []


def _fibers(grid: np.ndarray, i: int) -> np.ndarray:
    return np.moveaxis(grid, i, 0).reshape(grid.shape[i], -1)


def _pair_mask(inside: np.ndarray) -> np.ndarray:
    rows, cols = inside.shape
    return (inside[:, None, :, None] & inside[None, :, None, :]).reshape(rows * rows, cols * cols)


class AxiomChecker:
    """
    Audits axioms A1 to A9 and the derived coordinate relations.

    Every check spends at most ``options.budget`` relation lookups. Above it,
    work units are drawn in a seeded random order until the budget is spent
    and the report becomes UNDETERMINED with the covered share, unless a
    violation was already found.

    Attributes:
        options (CheckerOptions): Budget, seed and limits.

    Example:
        .. code-block:: python

            >>> checker = AxiomChecker(CheckerOptions(seed=7))
            >>> table = checker.build_relation_table(prefs)
            >>> checker.check_A3(table).status
            <AxiomStatus.PASS: 'PASS'>
    """

    def __init__(self, options: CheckerOptions | None = None) -> None:
        """Initialize the instance."""
        self.options = options or CheckerOptions()
        self.logger = get_logger("axioms")

    # Plumbing

    def _schedule(self, costs: Sequence[float], label: str) -> tuple[np.ndarray, float]:
        weights = np.asarray(costs, dtype=float)
        total = float(weights.sum())
        if total <= self.options.budget:
            return np.arange(weights.size), 1.0

        rng = np.random.default_rng(self.options.seed)
        order = rng.permutation(weights.size)
        taken = order[np.cumsum(weights[order]) <= self.options.budget]
        coverage = float(weights[taken].sum() / total)
        self.logger.warning(
            "Budget exceeded check=%s cost=%s budget=%s coverage=%.4f seed=%s",
            label,
            int(total),
            self.options.budget,
            coverage,
            self.options.seed,
        )
        return np.sort(taken), coverage

    def _report(
        self,
        axiom: str,
        witnesses: list,
        checked: int,
        violated: int,
        coverage: float = 1.0,
        undetermined: list | None = None,
        notes: list[str] | None = None,
    ) -> AxiomReport:
        limit = self.options.max_witnesses
        if violated:
            status, shown = AxiomStatus.FAIL, witnesses[:limit]
        elif undetermined or coverage < 1.0:
            status, shown = AxiomStatus.UNDETERMINED, (undetermined or [])[:limit]
        else:
            status, shown = AxiomStatus.PASS, []

        report = AxiomReport(
            axiom,
            status,
            witnesses=shown,
            checked=int(checked),
            violated=int(violated),
            coverage=coverage,
            seed=self.options.seed,
            notes=notes,
        )
        self.logger.info(
            "axiom=%s status=%s checked=%s violated=%s coverage=%.3f",
            axiom,
            report.status.value,
            report.checked,
            report.violated,
            report.coverage,
        )
        return report

    def _undetermined(self, axiom: str, reason: str) -> AxiomReport:
        self.logger.info("axiom=%s status=UNDETERMINED reason=%s", axiom, reason)
        return AxiomReport(axiom, AxiomStatus.UNDETERMINED, coverage=0.0, seed=self.options.seed, notes=[reason])

    def _scores(self, prefs: PreferenceStructure) -> np.ndarray | None:
        if prefs.model.grid_size > self.options.grid_cap:
            raise GridCapExceeded(prefs.model.grid_size, self.options.grid_cap)
        return prefs.score_tensor()

    def _cells(
        self,
        cells: CellPartition | Sequence[PartitionCell],
        scores: np.ndarray,
    ) -> list[PartitionCell]:
        listed = list(cells)
        for cell in listed:
            if cell.essential is None:
                cell.essential = essential_criteria(scores, cell.mask)
        return listed

    # A1, A2

    def check_weak_order(self, prefs: PreferenceStructure) -> AxiomReport:
        """
        A1: completeness and transitivity of the stated relation.

        RANKED data passes by construction. PAIRS data is read as a directed
        graph of weak statements: a strict statement inside a strongly
        connected component lies on a cycle and fails, with the cycle as
        witness. A pair the transitive closure leaves unordered is undetermined.
        """
        k = len(prefs)
        pairs = k * (k - 1) // 2
        if prefs.kind is PreferenceKind.RANKED:
            return self._report("A1", [], pairs, 0, notes=["ranked data is a weak order by construction"])

        weak, strict = prefs.relation_matrices()
        alts = prefs.alternatives
        graph = nx.DiGraph()
        graph.add_nodes_from(range(k))
        graph.add_edges_from((int(x), int(y)) for x, y in np.argwhere(weak) if x != y)

        component: dict[int, int] = {}
        for label, nodes in enumerate(nx.strongly_connected_components(graph)):
            component.update((node, label) for node in nodes)

        witnesses: list[dict] = []
        reported: set[int] = set()
        violated = 0
        for x, y in np.argwhere(strict):
            x, y = int(x), int(y)
            if component[x] != component[y]:
                continue
            violated += 1
            if component[x] in reported:
                continue
            reported.add(component[x])
            back = nx.shortest_path(graph, y, x) if x != y else [x]
            witnesses.append({"cycle": [list(alts[node]) for node in [x] + back[:-1]]})

        closure = nx.transitive_closure(graph, reflexive=True)
        reach = nx.to_numpy_array(closure, nodelist=list(range(k)), dtype=bool, weight=None)
        missing = ~(reach | reach.T)
        undetermined = [{"pair": [list(alts[x]), list(alts[y])]} for x, y in np.argwhere(np.triu(missing, k=1))]
        return self._report("A1", witnesses, pairs, violated, undetermined=undetermined)

    def check_weak_separability(self, prefs: PreferenceStructure) -> AxiomReport:
        """
        A2: a strict preference between two levels of ``i`` in one context is never reversed in another.
        """
        order = marginal_order(prefs, self.options.grid_cap)
        shape = prefs.model.shape
        checked = sum(size * (size - 1) // 2 * (prefs.model.grid_size // size) for size in shape)
        undetermined = [{"criterion": i + 1, "levels": [a, b]} for i, a, b in order.undetermined]
        return self._report("A2", order.failures, checked, len(order.failures), undetermined=undetermined)

    # Cones and relations

    def check_3C_on_cone(self, prefs: PreferenceStructure, cone: ConeSpec) -> AxiomReport:
        """ij-triple cancellation on a single cone; FAIL carries the eight levels involved."""
        scores = self._scores(prefs)
        order = marginal_order(prefs, self.options.grid_cap)
        if scores is None or not order.ok:
            return self._undetermined("ij-3C", "marginal orders unavailable" if scores is not None else _NO_SCORES)

        rows, cols = cone_levels(order.ranks[cone.i], order.ranks[cone.j], cone.z[cone.i], cone.z[cone.j], cone.side)
        holds, informative, witness = audit_cone(scores, order.ranks, cone)
        notes = [] if informative else ["degenerate cone, the condition holds vacuously"]
        checked = (rows.size * cols.size) ** 4 if informative else 0
        return self._report("ij-3C", [witness] if witness else [], checked, 0 if holds else 1, notes=notes)

    def check_independence_on_cone(self, prefs: PreferenceStructure, cone: ConeSpec) -> AxiomReport:
        """Independence of ``i`` from ``j`` inside one cone."""
        scores = self._scores(prefs)
        order = marginal_order(prefs, self.options.grid_cap)
        if scores is None or not order.ok:
            return self._undetermined("IND", "marginal orders unavailable" if scores is not None else _NO_SCORES)

        rows, cols = cone_levels(order.ranks[cone.i], order.ranks[cone.j], cone.z[cone.i], cone.z[cone.j], cone.side)
        found = independence_witness(cone_matrix(scores, cone.z, cone.i, cone.j, rows, cols))
        witnesses = []
        if found is not None:
            a, b, p, q = found
            witnesses.append(
                {
                    "z": list(cone.z),
                    "i": cone.i + 1,
                    "j": cone.j + 1,
                    "i_levels": [int(rows[a]), int(rows[b])],
                    "j_levels": [int(cols[p]), int(cols[q])],
                }
            )
        return self._report("IND", witnesses, rows.size**2 * cols.size**2, len(witnesses))

    def build_relation_table(self, prefs: PreferenceStructure) -> ConeRelationTable:
        """
        Audit ij-triple cancellation on the SE cone of every point and ordered pair.

        The condition quantifies over every context ``z_{-ij}``, so one work
        unit is a pair with two levels ``(z_i, z_j)``: its cones are audited in
        every context and a failure in any of them clears ``i R j`` at all
        points sharing those two levels.

        Raises:
            RelationUndetermined: The data is not a complete weak order on the grid
                or the marginal orders cannot be derived.
        """
        scores = self._scores(prefs)
        if scores is None:
            raise RelationUndetermined(_NO_SCORES)
        order = marginal_order(prefs, self.options.grid_cap)
        if not order.ok:
            raise RelationUndetermined("marginal orders unavailable: weak separability fails or is undetermined")

        shape, n = scores.shape, scores.ndim
        coords = grid_coordinates(shape)
        ranks = order.ranks
        size = coords.shape[0]
        units = [
            (i, j, a, p)
            for i, j in permutations(range(n), 2)
            for a in range(shape[i])
            for p in range(shape[j])
        ]
        costs = []
        for i, j, a, p in units:
            rows = int(np.sum(ranks[i] >= ranks[i][a]))
            cols = int(np.sum(ranks[j] <= ranks[j][p]))
            costs.append(size // (shape[i] * shape[j]) * (rows * cols) ** 2)
        selected, coverage = self._schedule(costs, "relations")

        r = np.ones((size, n, n), dtype=bool)
        informative = np.zeros((size, n, n), dtype=bool)
        determined = np.zeros((size, n, n), dtype=bool)
        determined[:, np.arange(n), np.arange(n)] = True
        witnesses: dict[tuple[int, int, int], dict] = {}
        failing = 0

        for unit in selected:
            i, j, a, p = units[unit]
            points = np.flatnonzero((coords[:, i] == a) & (coords[:, j] == p))
            holds, useful, witness = True, False, None
            for point in points:
                holds, useful, witness = audit_cone(scores, ranks, ConeSpec(tuple(int(c) for c in coords[point]), i, j))
                if not holds or not useful:
                    break
            r[points, i, j] = holds
            informative[points, i, j] = useful
            determined[points, i, j] = True
            if witness is not None:
                failing += 1
                for point in points:
                    witnesses[(int(point), i, j)] = witness

        self.logger.info(
            "Built relation table points=%s pairs=%s failing_level_pairs=%s coverage=%.3f",
            size,
            n * (n - 1),
            failing,
            coverage,
        )
        return ConeRelationTable(shape, r, informative, determined, ranks, coverage, witnesses)

    def check_A3(self, table: ConeRelationTable) -> AxiomReport:
        """A3: triple cancellation holds on the SE or on the NW cone, at every point, for every pair."""
        witnesses, undetermined = [], []
        checked = 0
        for point in range(table.size):
            for i, j in combinations(range(table.n), 2):
                known_ij, known_ji = table.determined[point, i, j], table.determined[point, j, i]
                holds_ij = known_ij and table.r[point, i, j]
                holds_ji = known_ji and table.r[point, j, i]
                if holds_ij or holds_ji:
                    checked += 1
                elif known_ij and known_ji:
                    checked += 1
                    witnesses.append(
                        {
                            "z": list(table.alternative(point)),
                            "i": i + 1,
                            "j": j + 1,
                            "SE": table.witnesses.get((point, i, j)),
                            "NW": table.witnesses.get((point, j, i)),
                        }
                    )
                else:
                    undetermined.append({"z": list(table.alternative(point)), "i": i + 1, "j": j + 1})
        return self._report("A3", witnesses, checked, len(witnesses), table.coverage, undetermined)

    def check_acyclicity(self, table: ConeRelationTable) -> AxiomReport:
        """A3-ACYCL: the strict coordinate order ``S^z`` has no cycle at any point."""
        strict = table.s & table.determined.transpose(0, 2, 1)
        witnesses = []
        for point in range(table.size):
            graph = nx.DiGraph()
            graph.add_edges_from((int(i), int(j)) for i, j in zip(*np.nonzero(strict[point])) if i != j)
            try:
                cycle = nx.find_cycle(graph)
            except nx.NetworkXNoCycle:
                continue
            witnesses.append({"z": list(table.alternative(point)), "cycle": [edge[0] + 1 for edge in cycle]})
        return self._report("A3-ACYCL", witnesses, table.size, len(witnesses), table.coverage)

    def partition_cells(self, table: ConeRelationTable, prefs: PreferenceStructure | None = None) -> CellPartition:
        """
        Cells ``X^{S_a}`` of the maximal observed coordinate orders.

        With ``prefs`` the essential criteria of every cell are filled in.
        """
        scores = None if prefs is None else self._scores(prefs)
        partition = build_partition(table, scores)
        self.logger.info(
            "Partitioned grid cells=%s orders=%s uncovered=%s",
            len(partition),
            [cell.order_id for cell in partition],
            len(partition.uncovered),
        )
        return partition

    def check_coverage(self, partition: CellPartition) -> AxiomReport:
        """Every grid point lies in some cell."""
        witnesses = [{"z": list(point)} for point in partition.uncovered]
        size = int(np.prod(partition.shape))
        return self._report("COVERAGE", witnesses, size, len(witnesses))

    def interaction_cliques_from_prefs(self, table: ConeRelationTable) -> list[frozenset[int]]:
        """Connected groups of criteria that are strictly ordered against each other somewhere."""
        cliques = cliques_from_table(table)
        self.logger.info("Interaction cliques=%s", [sorted(i + 1 for i in clique) for clique in cliques])
        return cliques

    # A4, A5, A6

    def check_A4(
        self,
        prefs: PreferenceStructure,
        cells: CellPartition | Sequence[PartitionCell],
    ) -> AxiomReport:
        """
        A4: intra-coordinate trade-off consistency.

        Proviso (a) puts all eight points in one cell. Proviso (b) splits the
        first and last two relations between two cells; its measuring rods vary
        along one coordinate ``l`` and both ``i`` and ``l`` are essential on the
        first cell. Proviso (c) splits the rods between two cells with ``i``
        essential on the first.
        """
        notes = [
            "proviso (a) does not require i to be essential on the cell",
            "proviso (b) uses measuring rods along a single coordinate essential on the first cell",
        ]
        scores = self._scores(prefs)
        if scores is None:
            return self._undetermined("A4", _NO_SCORES)

        listed = self._cells(cells, scores)
        shape, n = scores.shape, scores.ndim
        units: list[tuple] = []
        for i in range(n):
            others = [l for l in range(n) if l != i]
            for c, cell in enumerate(listed):
                units.append(("a", i, c, c, None))
            for (c, first), (k, _) in ((a, b) for a in enumerate(listed) for b in enumerate(listed)):
                if i not in first.essential:
                    continue
                for position, l in enumerate(others):
                    if l in first.essential:
                        units.append(("b", i, c, k, position))
                units.append(("c", i, c, k, None))

        costs = [shape[unit[1]] ** 2 * (scores.size // shape[unit[1]]) ** 2 for unit in units]
        selected, coverage = self._schedule(costs, "A4")

        prepared: dict[int, tuple] = {}
        witnesses: list[dict] = []
        violated = 0
        for unit in selected:
            proviso, i, c, k, position = units[unit]
            if i not in prepared:
                prepared[i] = self._a4_tables(scores, i, listed)
            le, ge, inside, rods = prepared[i]
            first, second = inside[c], inside[k]
            rod = np.ones(le.shape[1], dtype=bool) if position is None else rods[position]

            if proviso == "a":
                lhs, mid, probe, negated = le & first, ge & first, ge & first, ~ge & first
            elif proviso == "b":
                lhs, mid = le & first & rod, ge & first & rod
                probe, negated = ge & second & rod, ~ge & second & rod
            else:
                lhs, mid, probe, negated = le & first, ge & second, ge & first, ~ge & second

            found, count = cancellation_witness(lhs, mid, probe, negated)
            if found is None:
                continue
            violated += count
            witnesses.append(self._a4_witness(shape, i, proviso, listed[c], listed[k], found))

        return self._report("A4", witnesses, sum(costs[u] for u in selected), violated, coverage, notes=notes)

    @staticmethod
    def _a4_tables(scores: np.ndarray, i: int, cells: list[PartitionCell]) -> tuple:
        fibers = _fibers(scores, i)
        rows, contexts = fibers.shape
        left = fibers[:, None, :, None]
        right = fibers[None, :, None, :]
        le = (left <= right).reshape(rows * rows, contexts * contexts)
        ge = (left >= right).reshape(rows * rows, contexts * contexts)
        inside = [_pair_mask(_fibers(cell.grid_mask(), i)) for cell in cells]

        other_shape = scores.shape[:i] + scores.shape[i + 1:]
        coords = grid_coordinates(other_shape)
        differs = coords[:, None, :] != coords[None, :, :]
        count = differs.sum(axis=2)
        rods = [((count == 0) | ((count == 1) & differs[:, :, position])).reshape(-1) for position in range(len(other_shape))]
        return le, ge, inside, rods

    @staticmethod
    def _a4_witness(shape, i, proviso, first, second, found) -> dict:
        rows = shape[i]
        contexts = int(np.prod(shape)) // rows
        ab, pq, rs, cd = found
        a, b = divmod(ab, rows)
        c, d = divmod(cd, rows)
        x, y = divmod(pq, contexts)
        w, z = divmod(rs, contexts)
        return {
            "proviso": proviso,
            "i": i + 1,
            "cells": [first.order_id, second.order_id],
            "levels": [a, b, c, d],
            "x": _context(shape, i, x),
            "y": _context(shape, i, y),
            "w": _context(shape, i, w),
            "z": _context(shape, i, z),
        }

    def check_A5(
        self,
        prefs: PreferenceStructure,
        cells: CellPartition | Sequence[PartitionCell],
    ) -> AxiomReport:
        """
        A5 through standard sequences.

        A standard sequence on ``i`` inside a cell steps from ``g`` to ``g'`` when
        ``g y1 z ∼ g' y0 z`` with ``g' ≻_i g``, for a rod ``y0 ≺ y1`` on another
        coordinate and a fixed context ``z``. Two sequences whose ``y0`` points
        are indifferent at two consecutive positions must stay indifferent at
        every shared position, whichever criteria the two sequences run along.
        """
        scores = self._scores(prefs)
        order = marginal_order(prefs, self.options.grid_cap)
        if scores is None or not order.ok:
            return self._undetermined("A5", "marginal orders unavailable" if scores is not None else _NO_SCORES)

        listed = self._cells(cells, scores)
        sequences = []
        for cell in listed:
            sequences.extend(self._standard_sequences(scores, order.ranks, cell))

        flat = scores.reshape(-1)
        pairs = list(combinations(range(len(sequences)), 2))
        costs = [len(sequences[g]["points"]) * len(sequences[h]["points"]) for g, h in pairs]
        selected, coverage = self._schedule(costs, "A5")

        witnesses: list[dict] = []
        violated = 0
        checked = 0
        for unit in selected:
            first, second = (sequences[index] for index in pairs[unit])
            values_g, values_h = flat[first["points"]], flat[second["points"]]
            for offset in range(-(values_g.size - 3), values_h.size - 2):
                start = max(0, -offset)
                stop = min(values_g.size, values_h.size - offset)
                if stop - start < 3:
                    continue
                checked += 1
                equal = values_g[start:stop] == values_h[start + offset:stop + offset]
                if np.any(equal[:-1] & equal[1:]) and not np.all(equal):
                    violated += 1
                    step = start + int(np.flatnonzero(~equal)[0])
                    witnesses.append(
                        {
                            "first": self._sequence_view(first, scores.shape),
                            "second": self._sequence_view(second, scores.shape),
                            "offset": offset,
                            "position": step,
                        }
                    )

        notes = [f"{len(sequences)} standard sequences of length 3 to {self.options.sequence_length}"]
        return self._report("A5", witnesses, checked, violated, coverage, notes=notes)

    def _standard_sequences(self, scores: np.ndarray, ranks: list[np.ndarray], cell: PartitionCell) -> list[dict]:
        shape, n = scores.shape, scores.ndim
        inside = cell.grid_mask()
        limit = self.options.sequence_length
        found = []
        for i in sorted(cell.essential):
            for l in range(n):
                if l == i:
                    continue
                rest = [axis for axis in range(n) if axis not in (i, l)]
                for context in np.ndindex(*[shape[axis] for axis in rest]):
                    for y0 in range(shape[l]):
                        for y1 in range(shape[l]):
                            if ranks[l][y1] <= ranks[l][y0]:
                                continue
                            found.extend(
                                self._chains(scores, inside, ranks[i], i, l, rest, context, y0, y1, limit)
                            )
        return found

    @staticmethod
    def _chains(scores, inside, rank_i, i, l, rest, context, y0, y1, limit) -> list[dict]:
        n = scores.ndim
        size = scores.shape[i]

        def point(level: int, rod: int) -> tuple[int, ...]:
            coords = [0] * n
            coords[i], coords[l] = level, rod
            for axis, value in zip(rest, context):
                coords[axis] = value
            return tuple(coords)

        usable = [g for g in range(size) if inside[point(g, y0)] and inside[point(g, y1)]]
        graph = nx.DiGraph()
        graph.add_nodes_from(usable)
        for g in usable:
            for h in usable:
                if rank_i[h] > rank_i[g] and scores[point(g, y1)] == scores[point(h, y0)]:
                    graph.add_edge(g, h)

        chains = []
        sources = [g for g in graph.nodes if graph.in_degree(g) == 0 and graph.out_degree(g) > 0]
        sinks = [g for g in graph.nodes if graph.out_degree(g) == 0]
        for source in sources:
            for path in nx.all_simple_paths(graph, source, sinks):
                windows = [path] if len(path) <= limit else [path[k:k + limit] for k in range(len(path) - limit + 1)]
                for window in windows:
                    if len(window) < 3:
                        continue
                    points = [np.ravel_multi_index(point(g, y0), scores.shape) for g in window]
                    chains.append(
                        {"i": i, "l": l, "rod": (y0, y1), "levels": window, "points": np.asarray(points, dtype=np.int64)}
                    )
        return chains

    @staticmethod
    def _sequence_view(sequence: dict, shape: tuple[int, ...]) -> dict:
        return {
            "i": sequence["i"] + 1,
            "rod_criterion": sequence["l"] + 1,
            "rod": list(sequence["rod"]),
            "points": [[int(c) for c in np.unravel_index(p, shape)] for p in sequence["points"]],
        }

    def check_A6(
        self,
        prefs: PreferenceStructure,
        cells: CellPartition | Sequence[PartitionCell],
    ) -> AxiomReport:
        """
        A6, bi-independence: inside a cell, once ``i`` separates two levels at
        context ``x``, every pair of levels strictly ordered somewhere is strictly
        ordered at ``x`` too.
        """
        scores = self._scores(prefs)
        if scores is None:
            return self._undetermined("A6", _NO_SCORES)

        listed = self._cells(cells, scores)
        shape = scores.shape
        units = [(c, i) for c in range(len(listed)) for i in range(scores.ndim)]
        costs = [shape[i] ** 2 * (scores.size // shape[i]) for _, i in units]
        selected, coverage = self._schedule(costs, "A6")

        witnesses: list[dict] = []
        violated = 0
        for unit in selected:
            c, i = units[unit]
            fibers = _fibers(scores, i)
            inside = _fibers(listed[c].grid_mask(), i)
            above = fibers[:, None, :] > fibers[None, :, :]
            somewhere = above.any(axis=2)

            high = np.where(inside, fibers, -np.inf).max(axis=0)
            low = np.where(inside, fibers, np.inf).min(axis=0)
            separated = (inside.sum(axis=0) >= 2) & (high > low)

            broken = (
                separated[None, None, :]
                & inside[:, None, :]
                & inside[None, :, :]
                & somewhere[:, :, None]
                & ~above
            )
            hits = np.argwhere(broken)
            violated += len(hits)
            for cc, dd, x in hits[: self.options.max_witnesses]:
                column = np.where(inside[:, x], fibers[:, x], np.nan)
                y = int(np.flatnonzero(above[cc, dd])[0])
                witnesses.append(
                    {
                        "cell": listed[c].order_id,
                        "i": i + 1,
                        "separated": [int(np.nanargmax(column)), int(np.nanargmin(column))],
                        "levels": [int(cc), int(dd)],
                        "x": _context(shape, i, int(x)),
                        "y": _context(shape, i, y),
                    }
                )

        return self._report("A6", witnesses, sum(costs[u] for u in selected), violated, coverage)

    # A7, A8, A9, monotonicity

    def check_essentiality(
        self,
        prefs: PreferenceStructure,
        cells: CellPartition | Sequence[PartitionCell] | None = None,
    ) -> AxiomReport:
        """
        A7: every criterion is essential on the grid.

        With cells, their essential sets are stored on them and strong
        monotonicity is audited inside each: for ``i`` essential on the cell,
        ``a ≻_i b`` implies ``a x ≻ b x`` at every context keeping both in the cell.
        """
        scores = self._scores(prefs)
        n = prefs.model.n
        if scores is None:
            essential = self._essential_from_statements(prefs)
            missing = [i for i in range(n) if i not in essential]
            undetermined = [{"criterion": i + 1} for i in missing]
            return self._report("A7", [], n, 0, undetermined=undetermined, notes=["no full-grid data, essentiality taken from statements"])

        essential = essential_criteria(scores)
        witnesses = [{"criterion": i + 1, "scope": "X"} for i in range(n) if i not in essential]
        notes = []
        checked = n
        if cells is not None:
            order = marginal_order(prefs, self.options.grid_cap)
            for cell in self._cells(cells, scores):
                notes.append(f"cell {cell.order_id}: essential {sorted(i + 1 for i in cell.essential)}")
                if not order.ok:
                    continue
                for i in sorted(cell.essential):
                    fibers = _fibers(scores, i)
                    inside = _fibers(cell.grid_mask(), i)
                    better = order.ranks[i][:, None] > order.ranks[i][None, :]
                    broken = (
                        better[:, :, None]
                        & inside[:, None, :]
                        & inside[None, :, :]
                        & ~(fibers[:, None, :] > fibers[None, :, :])
                    )
                    checked += int((better[:, :, None] & inside[:, None, :] & inside[None, :, :]).sum())
                    for a, b, x in np.argwhere(broken)[: self.options.max_witnesses]:
                        witnesses.append(
                            {
                                "criterion": i + 1,
                                "scope": cell.order_id,
                                "levels": [int(a), int(b)],
                                "x": _context(scores.shape, i, int(x)),
                            }
                        )

        return self._report("A7", witnesses, checked, len(witnesses), notes=notes)

    @staticmethod
    def _essential_from_statements(prefs: PreferenceStructure) -> set[int]:
        essential = set()
        alts = prefs.alternatives
        _, strict = prefs.relation_matrices()
        for x, y in np.argwhere(strict):
            differs = [i for i, (a, b) in enumerate(zip(alts[x], alts[y])) if a != b]
            if len(differs) == 1:
                essential.add(differs[0])
        return essential

    def check_restricted_solvability(self, prefs: PreferenceStructure) -> AxiomReport:
        """
        A8, informational: counts sandwiches ``a x ≽ y ≽ b x`` and those with an exact ``c x ∼ y``.

        PASS when every sandwich is solvable or none exists, NOT_APPLICABLE
        otherwise; finite grids generically fail A8.
        """
        scores = self._scores(prefs)
        if scores is None:
            return AxiomReport("A8", AxiomStatus.NOT_APPLICABLE, seed=self.options.seed, notes=[_NO_SCORES])

        everything = np.sort(scores.reshape(-1))
        total = solvable = 0
        for i in range(scores.ndim):
            fibers = _fibers(scores, i)
            low = np.searchsorted(everything, fibers.min(axis=0), side="left")
            high = np.searchsorted(everything, fibers.max(axis=0), side="right")
            total += int((high - low).sum())
            for column in fibers.T:
                levels = np.unique(column)
                solvable += int(
                    (np.searchsorted(everything, levels, side="right") - np.searchsorted(everything, levels, side="left")).sum()
                )

        status = AxiomStatus.PASS if solvable == total else AxiomStatus.NOT_APPLICABLE
        report = AxiomReport(
            "A8",
            status,
            checked=total,
            violated=total - solvable,
            seed=self.options.seed,
            notes=[f"{solvable} of {total} sandwiches have an exact solution"],
        )
        self.logger.info("axiom=A8 status=%s sandwiches=%s solvable=%s", status.value, total, solvable)
        return report

    def check_archimedean(self) -> AxiomReport:
        """A9 has no finite counterpart: every standard sequence on a finite grid is bounded and finite."""
        return AxiomReport(
            "A9",
            AxiomStatus.NOT_APPLICABLE,
            seed=self.options.seed,
            notes=["every standard sequence on a finite grid is bounded and finite; not testable"],
        )

    def check_monotonicity(self, prefs: PreferenceStructure) -> AxiomReport:
        """
        Pointwise monotonicity in the declared level order: dominating alternatives are weakly preferred.
        """
        scores = self._scores(prefs)
        witnesses: list[dict] = []
        if scores is not None:
            checked = 0
            for i in range(scores.ndim):
                steps = np.diff(scores, axis=i)
                checked += steps.size
                for index in np.argwhere(steps < 0):
                    lower = [int(c) for c in index]
                    upper = list(lower)
                    upper[i] += 1
                    witnesses.append({"dominating": upper, "dominated": lower})
            return self._report("MONO", witnesses, checked, len(witnesses))

        alts = prefs.alternatives
        for statement in prefs.pairs:
            better, worse = np.array(alts[statement.better]), np.array(alts[statement.worse])
            dominated = np.all(better <= worse) and np.any(better < worse)
            if dominated and statement.strict:
                witnesses.append({"dominating": worse.tolist(), "dominated": better.tolist()})
        return self._report("MONO", witnesses, len(prefs.pairs), len(witnesses))

    # Battery

    def run(self, prefs: PreferenceStructure, axioms: Iterable[str] | None = None) -> list[AxiomReport]:
        """
        Run the selected axioms (all by default) and return their reports in a fixed order.
        """
        wanted = [axiom.upper() for axiom in (axioms or AXIOM_IDS)]
        unknown = [axiom for axiom in wanted if axiom not in AXIOM_IDS]
        if unknown:
            raise ValueError(f"unknown axioms {unknown}, expected some of {list(AXIOM_IDS)}")

        self.logger.info("Running axioms=%s alternatives=%s seed=%s", wanted, len(prefs), self.options.seed)
        reports: dict[str, AxiomReport] = {}
        if "A1" in wanted:
            reports["A1"] = self.check_weak_order(prefs)
        if "A2" in wanted:
            reports["A2"] = self.check_weak_separability(prefs)
        if "A8" in wanted:
            reports["A8"] = self.check_restricted_solvability(prefs)
        if "A9" in wanted:
            reports["A9"] = self.check_archimedean()
        if "MONO" in wanted:
            reports["MONO"] = self.check_monotonicity(prefs)

        needs_table = {"A3", "A3-ACYCL", "COVERAGE", "A4", "A5", "A6", "A7"} & set(wanted)
        if needs_table:
            try:
                table = self.build_relation_table(prefs)
            except RelationUndetermined as exc:
                for axiom in needs_table - {"A7"}:
                    reports[axiom] = self._undetermined(axiom, str(exc))
                if "A7" in wanted:
                    reports["A7"] = self.check_essentiality(prefs)
            else:
                self._run_on_table(prefs, table, wanted, reports)

        return [reports[axiom] for axiom in AXIOM_IDS if axiom in reports]

    def _run_on_table(
        self,
        prefs: PreferenceStructure,
        table: ConeRelationTable,
        wanted: list[str],
        reports: dict[str, AxiomReport],
    ) -> None:
        if "A3" in wanted:
            reports["A3"] = self.check_A3(table)
        if "A3-ACYCL" in wanted:
            reports["A3-ACYCL"] = self.check_acyclicity(table)

        cell_axioms = {"COVERAGE", "A4", "A5", "A6", "A7"} & set(wanted)
        if not cell_axioms:
            return
        try:
            partition = self.partition_cells(table, prefs)
        except RelationUndetermined as exc:
            for axiom in cell_axioms - {"A7"}:
                reports[axiom] = self._undetermined(axiom, str(exc))
            if "A7" in wanted:
                reports["A7"] = self.check_essentiality(prefs)
            return

        if "COVERAGE" in wanted:
            reports["COVERAGE"] = self.check_coverage(partition)
        if "A4" in wanted:
            reports["A4"] = self.check_A4(prefs, partition)
        if "A5" in wanted:
            reports["A5"] = self.check_A5(prefs, partition)
        if "A6" in wanted:
            reports["A6"] = self.check_A6(prefs, partition)
        if "A7" in wanted:
            reports["A7"] = self.check_essentiality(prefs, partition)
