"""Triple cancellation on cones, coordinate relations, cells and interaction cliques."""
from __future__ import annotations

__all__ = [
    "cancellation_violations",
    "cancellation_witness",
    "comparison_matrices",
    "triple_cancellation_witness",
    "independence_witness",
    "cone_levels",
    "cone_matrix",
    "audit_cone",
    "se_sets",
    "observed_orders",
    "cell_mask",
    "essential_criteria",
    "build_partition",
    "interacting_pairs",
    "cliques_from_table",
    "crossing_levels",
]

from typing import Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from pychoquet.logging_utils import get_logger
from pychoquet.product import grid_coordinates

# Exceptions
from pychoquet.exceptions import RelationUndetermined

# Models
from pychoquet.models.relation_model import (
    CellPartition,
    ConeRelationTable,
    ConeSide,
    ConeSpec,
    PartitionCell,
)

logger = get_logger("relations")


def cancellation_violations(
    lhs: np.ndarray,
    mid: np.ndarray,
    probe: np.ndarray,
    negated: np.ndarray,
) -> np.ndarray:
    """
    Generic cancellation search over row pairs and column pairs.

    The premise ``lhs[ab, pq] ∧ mid[ab, rs] ∧ probe[cd, pq]`` must imply the
    conclusion at ``(cd, rs)``; ``negated`` marks where the conclusion fails.

    Returns:
        np.ndarray: Boolean ``[cd, rs]`` matrix of violations.
    """
    link = (lhs.T.astype(np.float64) @ mid.astype(np.float64)) > 0
    reach = (probe.astype(np.float64) @ link.astype(np.float64)) > 0
    return reach & negated


def cancellation_witness(
    lhs: np.ndarray,
    mid: np.ndarray,
    probe: np.ndarray,
    negated: np.ndarray,
) -> tuple[tuple[int, int, int, int] | None, int]:
    """First violating ``(ab, pq, rs, cd)`` index tuple and the number of violating ``(cd, rs)``."""
    violations = cancellation_violations(lhs, mid, probe, negated)
    count = int(violations.sum())
    if not count:
        return None, 0

    cd, rs = (int(v) for v in np.argwhere(violations)[0])
    linked = np.any(lhs & mid[:, rs][:, None], axis=0)
    pq = int(np.flatnonzero(probe[cd] & linked)[0])
    ab = int(np.flatnonzero(lhs[:, pq] & mid[:, rs])[0])
    return (ab, pq, rs, cd), count


def comparison_matrices(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    ``le[(a,b),(p,q)] = M[a,p] <= M[b,q]`` and the matching ``ge``.

    Row pair ``(a, b)`` has index ``a * rows + b``, column pairs likewise.
    """
    rows, cols = matrix.shape
    left = matrix[:, None, :, None]
    right = matrix[None, :, None, :]
    le = (left <= right).reshape(rows * rows, cols * cols)
    ge = (left >= right).reshape(rows * rows, cols * cols)
    return le, ge


def triple_cancellation_witness(matrix: np.ndarray) -> tuple[tuple[int, ...] | None, int]:
    """
    Search ``M`` (rows: levels of i, columns: levels of j) for a triple cancellation failure.

    Returns:
        The violating local indices ``(a, b, c, d, p, q, r, s)`` or None, and the
        number of violating ``(c, d, r, s)`` combinations.
    """
    rows, cols = matrix.shape
    if rows < 2 or cols < 2:
        return None, 0

    le, ge = comparison_matrices(matrix)
    found, count = cancellation_witness(le, ge, ge, ~ge)
    if found is None:
        return None, 0

    ab, pq, rs, cd = found
    a, b = divmod(ab, rows)
    c, d = divmod(cd, rows)
    p, q = divmod(pq, cols)
    r, s = divmod(rs, cols)
    return (a, b, c, d, p, q, r, s), count


def independence_witness(matrix: np.ndarray) -> tuple[int, int, int, int] | None:
    """First ``(a, b, p, q)`` with ``M[a,p] >= M[b,p]`` but ``M[a,q] < M[b,q]``."""
    weakly = matrix[:, None, :] >= matrix[None, :, :]
    broken = weakly[:, :, :, None] & ~weakly[:, :, None, :]
    hits = np.argwhere(broken)
    if not hits.size:
        return None
    a, b, p, q = (int(v) for v in hits[0])
    return a, b, p, q


def cone_levels(
    ranks_i: np.ndarray,
    ranks_j: np.ndarray,
    z_i: int,
    z_j: int,
    side: ConeSide = ConeSide.SE,
) -> tuple[np.ndarray, np.ndarray]:
    """Levels of ``i`` and ``j`` spanning the cone at ``(z_i, z_j)``."""
    if ConeSide(side) is ConeSide.SE:
        return np.flatnonzero(ranks_i >= ranks_i[z_i]), np.flatnonzero(ranks_j <= ranks_j[z_j])
    return np.flatnonzero(ranks_i <= ranks_i[z_i]), np.flatnonzero(ranks_j >= ranks_j[z_j])


def cone_matrix(
    scores: np.ndarray,
    z: Sequence[int],
    i: int,
    j: int,
    rows: np.ndarray,
    cols: np.ndarray,
) -> np.ndarray:
    """Scores of the cone points, rows indexed by ``i`` levels and columns by ``j`` levels."""
    index: list = [int(c) for c in z]
    index[i] = slice(None)
    index[j] = slice(None)
    plane = scores[tuple(index)]
    if i > j:
        plane = plane.T
    return plane[rows[:, None], cols[None, :]]


def audit_cone(
    scores: np.ndarray,
    ranks: Sequence[np.ndarray],
    cone: ConeSpec,
) -> tuple[bool, bool, dict | None]:
    """
    Audit ij-triple cancellation on one cone.

    Returns:
        ``(holds, informative, witness)``; degenerate cones hold and are not informative.
    """
    rows, cols = cone_levels(ranks[cone.i], ranks[cone.j], cone.z[cone.i], cone.z[cone.j], cone.side)
    if rows.size < 2 or cols.size < 2:
        return True, False, None

    found, _ = triple_cancellation_witness(cone_matrix(scores, cone.z, cone.i, cone.j, rows, cols))
    if found is None:
        return True, True, None

    a, b, c, d, p, q, r, s = found
    witness = {
        "z": list(cone.z),
        "i": cone.i + 1,
        "j": cone.j + 1,
        "side": ConeSide(cone.side).value,
        "i_levels": [int(rows[a]), int(rows[b]), int(rows[c]), int(rows[d])],
        "j_levels": [int(cols[p]), int(cols[q]), int(cols[r]), int(cols[s])],
    }
    return False, True, witness


def _switches_downward(flags: np.ndarray, positions: np.ndarray) -> bool:
    # some x ≽ y with the relation at x and not at y
    held, lost = positions[flags], positions[~flags]
    return held.size > 0 and lost.size > 0 and held.max() >= lost.min()


def _switches_upward(flags: np.ndarray, positions: np.ndarray) -> bool:
    # some y ≽ x with the relation at x and not at y
    held, lost = positions[flags], positions[~flags]
    return held.size > 0 and lost.size > 0 and held.min() <= lost.max()


def se_sets(table: ConeRelationTable) -> np.ndarray:
    """
    Membership of every grid point in ``SE_ij`` for every ordered pair.

    Away from extreme levels a point belongs to ``SE_ij`` iff ``i R j`` there.
    When ``z_i`` is maximal (``z_j`` minimal) the point belongs unless
    ``j R i`` switches off along the levels of ``j`` below ``z_j`` (of ``i``
    above ``z_i``). Only non-degenerate cones take part in that search.
    ``NW_ij`` equals ``SE_ji``.

    Returns:
        np.ndarray: Boolean ``(n, n, points)``; the diagonal is all True.

    Raises:
        RelationUndetermined: Some cone was not audited.
    """
    if not table.complete:
        raise RelationUndetermined(f"relation table covers {table.coverage:.3f} of its cones")

    n, shape = table.n, table.shape
    coords = grid_coordinates(shape)
    ranks = table.marginal_ranks
    member = np.ones((n, n, table.size), dtype=bool)

    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for point, z in enumerate(coords):
                i_top = ranks[i][z[i]] == ranks[i].max()
                j_bottom = ranks[j][z[j]] == ranks[j].min()
                if not i_top and not j_bottom:
                    member[i, j, point] = table.r[point, i, j]
                    continue

                inside = False
                if i_top:
                    levels = np.flatnonzero(ranks[j] <= ranks[j][z[j]])
                    inside |= not _extreme_switch(table, z, j, levels, (j, i), ranks[j], downward=True)
                if j_bottom:
                    levels = np.flatnonzero(ranks[i] >= ranks[i][z[i]])
                    inside |= not _extreme_switch(table, z, i, levels, (j, i), ranks[i], downward=False)
                member[i, j, point] = inside

    return member


def _extreme_switch(
    table: ConeRelationTable,
    z: np.ndarray,
    axis: int,
    levels: np.ndarray,
    pair: tuple[int, int],
    rank: np.ndarray,
    downward: bool,
) -> bool:
    points = []
    for level in levels:
        moved = z.copy()
        moved[axis] = level
        points.append(np.ravel_multi_index(tuple(moved), table.shape))
    points = np.asarray(points, dtype=np.int64)

    useful = table.informative[points, pair[0], pair[1]]
    flags = table.r[points, pair[0], pair[1]][useful]
    positions = rank[levels][useful]
    if downward:
        return _switches_downward(flags, positions)
    return _switches_upward(flags, positions)


def observed_orders(
    table: ConeRelationTable,
    members: np.ndarray | None = None,
) -> list[frozenset[tuple[int, int]]]:
    """
    Distinct maximal orders ``S^z`` over the grid.

    An order contained in another observed order is dropped: its cell is a
    subset of the larger order's cell. With ``members`` from :func:`se_sets`
    the order at ``z`` is read as ``i S j ⟺ z ∉ SE_ji``, which settles points
    at extreme levels where the cone itself is degenerate.
    """
    s = table.s if members is None else ~members.transpose(2, 1, 0)
    distinct: set[frozenset[tuple[int, int]]] = set()
    for point in range(table.size):
        distinct.add(frozenset((int(i), int(j)) for i, j in zip(*np.nonzero(s[point])) if i != j))

    maximal = [order for order in distinct if not any(order < other for other in distinct)]
    return sorted(maximal, key=lambda order: sorted(order))


def cell_mask(order: frozenset[tuple[int, int]], members: np.ndarray) -> np.ndarray:
    """``X^{S_a}``: intersection of ``SE_kj`` over all ``k R_a j``."""
    n = members.shape[0]
    mask = np.ones(members.shape[2], dtype=bool)
    for k in range(n):
        for j in range(n):
            if k != j and (j, k) not in order:
                mask &= members[k, j]
    return mask


def essential_criteria(scores: np.ndarray, mask: np.ndarray | None = None) -> frozenset[int]:
    """Criteria ``i`` with two points of the set differing only in ``i`` and strictly ordered."""
    grid_mask = np.ones(scores.shape, dtype=bool) if mask is None else np.asarray(mask).reshape(scores.shape)
    essential = set()
    for i, size in enumerate(scores.shape):
        fibers = np.moveaxis(scores, i, 0).reshape(size, -1)
        inside = np.moveaxis(grid_mask, i, 0).reshape(size, -1)
        high = np.where(inside, fibers, -np.inf).max(axis=0)
        low = np.where(inside, fibers, np.inf).min(axis=0)
        if np.any((inside.sum(axis=0) >= 2) & (high > low)):
            essential.add(i)
    return frozenset(essential)


def build_partition(table: ConeRelationTable, scores: np.ndarray | None = None) -> CellPartition:
    """
    Cells ``X^{S_a}`` for the maximal observed orders, with essential sets when scores are given.

    Orders are read from the ``SE`` memberships, so every point lies in the
    cell of any maximal order containing its own.
    """
    members = se_sets(table)
    cells = []
    for order in observed_orders(table, members):
        mask = cell_mask(order, members)
        essential = None if scores is None else essential_criteria(scores, mask)
        cells.append(PartitionCell(order, mask, table.shape, essential))

    partition = CellPartition(cells, [], table.shape)
    partition.uncovered = [table.alternative(int(point)) for point in np.flatnonzero(~partition.union_mask())]
    if partition.uncovered:
        logger.warning(
            "Cells leave grid points uncovered count=%s first=%s",
            len(partition.uncovered),
            partition.uncovered[0],
        )
    return partition


def interacting_pairs(table: ConeRelationTable) -> list[tuple[int, int]]:
    """Pairs ``i < j`` with ``i S j`` or ``j S i`` somewhere on the grid."""
    strict = table.s.any(axis=0)
    strict = strict | strict.T
    return [(i, j) for i in range(table.n) for j in range(i + 1, table.n) if strict[i, j]]


def cliques_from_table(table: ConeRelationTable) -> list[frozenset[int]]:
    """Interaction cliques: connected components of the interacting pairs."""
    components = DisjointSet(range(table.n))
    for i, j in interacting_pairs(table):
        components.merge(i, j)
    return sorted((frozenset(block) for block in components.subsets()), key=min)


def crossing_levels(table: ConeRelationTable, i: int, j: int, context: Sequence[int]) -> list[tuple[int, int]]:
    """
    Points ``(a_i, p_j)`` of one ``(i, j)`` plane where ``i E j`` holds.

    ``context`` fixes the other coordinates; its entries at ``i`` and ``j`` are ignored.
    """
    e = table.e
    found = []
    base = np.array(context, dtype=np.int64)
    for a in range(table.shape[i]):
        for p in range(table.shape[j]):
            base[i], base[j] = a, p
            if e[table.point_index(base), i, j]:
                found.append((a, p))
    return found
