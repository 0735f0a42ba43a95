from __future__ import annotations

import logging

import numpy as np
import pytest

from pychoquet.axioms import AXIOM_IDS, GATING_AXIOMS, AxiomChecker
from pychoquet.capacity import cliques_from_mobius
from pychoquet.exceptions import RelationUndetermined
from pychoquet.product import induced_order, random_model
from pychoquet.models.options_model import CheckerOptions
from pychoquet.models.relation_model import ConeRelationTable, ConeSpec, PartitionCell
from pychoquet.models.report_model import AxiomStatus, aggregate_status

from tests.conftest import value_storage


def statuses(reports) -> dict[str, AxiomStatus]:
    return {report.axiom: report.status for report in reports}


def test_additive_grid_passes_every_gating_axiom(checker, additive_model) -> None:
    prefs = induced_order(additive_model.capacity, additive_model)

    reports = checker.run(prefs)

    assert [report.axiom for report in reports] == list(AXIOM_IDS)
    for report in reports:
        if report.axiom in GATING_AXIOMS:
            assert report.status is AxiomStatus.PASS, report
    assert statuses(reports)["A9"] is AxiomStatus.NOT_APPLICABLE


def test_min_grid_passes_every_gating_axiom(checker, min_model) -> None:
    prefs = induced_order(min_model.capacity, min_model)

    reports = checker.run(prefs)

    assert aggregate_status(report for report in reports if report.axiom in GATING_AXIOMS) is AxiomStatus.PASS


def test_min_grid_splits_into_two_cells(checker, min_model) -> None:
    prefs = induced_order(min_model.capacity, min_model)
    table = checker.build_relation_table(prefs)

    partition = checker.partition_cells(table, prefs)

    assert len(partition) == 2
    assert partition.covers_grid
    assert sorted(sorted(cell.essential) for cell in partition) == [[0], [1]]


def test_triple_cancellation_counterexample_fails_A3(checker, grid_prefs) -> None:
    prefs = grid_prefs(value_storage.a3_counterexample)

    reports = statuses(checker.run(prefs, ["A2", "A3"]))
    table = checker.build_relation_table(prefs)
    a3 = checker.check_A3(table)

    assert reports["A2"] is AxiomStatus.PASS
    assert reports["A3"] is AxiomStatus.FAIL
    assert a3.violated >= len(a3.witnesses) > 0
    failing = next(witness for witness in a3.witnesses if witness["z"] == [1, 1])
    assert failing["SE"] is not None and failing["NW"] is not None


def test_single_cone_checks(checker, grid_prefs, additive_model) -> None:
    counterexample = grid_prefs(value_storage.a3_counterexample)

    broken = checker.check_3C_on_cone(counterexample, ConeSpec((1, 1), 0, 1))
    degenerate = checker.check_3C_on_cone(counterexample, ConeSpec((2, 0), 0, 1))
    independent = checker.check_independence_on_cone(
        induced_order(additive_model.capacity, additive_model), ConeSpec((1, 2), 0, 1)
    )

    assert broken.status is AxiomStatus.FAIL
    assert broken.witnesses[0]["i"] == 1
    assert degenerate.status is AxiomStatus.PASS
    assert degenerate.checked == 0
    assert independent.status is AxiomStatus.PASS


def test_tradeoff_counterexample_fails_A4(checker, grid_prefs) -> None:
    prefs = grid_prefs(value_storage.a4_counterexample)

    reports = checker.run(prefs, ["A2", "A4"])
    a4 = reports[-1]

    assert statuses(reports)["A2"] is AxiomStatus.PASS
    assert a4.status is AxiomStatus.FAIL
    assert any(witness["proviso"] == "a" for witness in a4.witnesses)
    assert len(a4.notes) == 2


def test_standard_sequence_counterexample_fails_A5(checker, grid_prefs) -> None:
    prefs = grid_prefs(value_storage.a5_counterexample)

    reports = statuses(checker.run(prefs, ["A2", "A5"]))

    assert reports["A2"] is AxiomStatus.PASS
    assert reports["A5"] is AxiomStatus.FAIL


def test_bi_independence_counterexample_fails_A6(checker, grid_prefs) -> None:
    prefs = grid_prefs(value_storage.a6_counterexample)

    reports = checker.run(prefs, ["A6"])

    assert reports[0].status is AxiomStatus.FAIL
    assert any(
        witness["i"] == 1 and witness["levels"] == [1, 0] and witness["x"] == [1] for witness in reports[0].witnesses
    )


def test_irrelevant_criterion_fails_A7(checker, grid_prefs) -> None:
    prefs = grid_prefs(np.add.outer(np.arange(3.0), np.zeros(3)))

    report = checker.check_essentiality(prefs)

    assert report.status is AxiomStatus.FAIL
    assert report.witnesses == [{"criterion": 2, "scope": "X"}]


def test_strictly_monotone_models_satisfy_the_necessary_axioms() -> None:
    checker = AxiomChecker(CheckerOptions(seed=1))
    rng = np.random.default_rng(2024)
    for _ in range(5):
        model = random_model(3, 3, rng)
        prefs = induced_order(model.capacity, model)

        reports = checker.run(prefs, ["A1", "A2", "A3", "A3-ACYCL", "A6", "A7", "MONO"])

        for report in reports:
            assert report.status is AxiomStatus.PASS, report


def test_tight_budget_is_undetermined_and_logged(caplog, additive_model) -> None:
    caplog.set_level(logging.WARNING, logger="pychoquet")
    checker = AxiomChecker(CheckerOptions(budget=1, seed=3))
    prefs = induced_order(additive_model.capacity, additive_model)

    report = checker.run(prefs, ["A3"])[0]

    assert report.status is AxiomStatus.UNDETERMINED
    assert report.coverage < 1.0
    assert report.seed == 3
    messages = [record.getMessage() for record in caplog.records if record.name.startswith("pychoquet")]
    assert any("Budget exceeded" in message for message in messages)


def test_subsampling_is_reproducible(additive_model) -> None:
    prefs = induced_order(additive_model.capacity, additive_model)
    first = AxiomChecker(CheckerOptions(budget=40, seed=9)).build_relation_table(prefs)
    second = AxiomChecker(CheckerOptions(budget=40, seed=9)).build_relation_table(prefs)

    assert np.array_equal(first.determined, second.determined)
    assert first.coverage == second.coverage


def test_relation_table_needs_full_grid_data(checker, pairs_prefs) -> None:
    prefs = pairs_prefs((2, 2), [(0, 0), (1, 1)], [(1, 0, True)])

    with pytest.raises(RelationUndetermined):
        checker.build_relation_table(prefs)

    reports = statuses(checker.run(prefs, ["A3", "A4"]))
    assert reports == {"A3": AxiomStatus.UNDETERMINED, "A4": AxiomStatus.UNDETERMINED}


def test_coordinate_cycle_fails_acyclicity(checker) -> None:
    r = np.ones((1, 3, 3), dtype=bool)
    r[0, 1, 0] = False
    r[0, 2, 1] = False
    r[0, 0, 2] = False
    table = ConeRelationTable.from_flags((1, 1, 1), r)

    report = checker.check_acyclicity(table)

    assert report.status is AxiomStatus.FAIL
    assert sorted(report.witnesses[0]["cycle"]) == [1, 2, 3]


def test_interaction_cliques(checker, block_model, min3_model) -> None:
    block = checker.build_relation_table(induced_order(block_model.capacity, block_model))
    minimum = checker.build_relation_table(induced_order(min3_model.capacity, min3_model))

    assert checker.interaction_cliques_from_prefs(block) == [frozenset({0, 1}), frozenset({2})]
    assert checker.interaction_cliques_from_prefs(minimum) == [frozenset({0, 1, 2})]


def test_pairs_cycle_fails_A1(checker, pairs_prefs) -> None:
    prefs = pairs_prefs((2, 2), [(0, 0), (0, 1), (1, 0)], [(0, 1, True), (1, 2, True), (2, 0, True)])

    report = checker.check_weak_order(prefs)

    assert report.status is AxiomStatus.FAIL
    assert len(report.witnesses[0]["cycle"]) == 3


def test_silent_pairs_leave_A1_undetermined(checker, pairs_prefs) -> None:
    prefs = pairs_prefs((2, 2), [(0, 0), (0, 1), (1, 1)], [(1, 0, True)])

    report = checker.check_weak_order(prefs)

    assert report.status is AxiomStatus.UNDETERMINED
    assert report.witnesses


def test_reversed_levels_fail_A2(checker, pairs_prefs) -> None:
    prefs = pairs_prefs((2, 2), [(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1, True), (2, 3, True)])

    report = checker.check_weak_separability(prefs)

    assert report.status is AxiomStatus.FAIL
    assert report.witnesses[0]["criterion"] == 1


def test_dominated_preference_fails_monotonicity(checker, pairs_prefs) -> None:
    prefs = pairs_prefs((2, 2), [(0, 0), (1, 1)], [(0, 1, True)])

    report = checker.check_monotonicity(prefs)

    assert report.status is AxiomStatus.FAIL
    assert report.witnesses == [{"dominating": [1, 1], "dominated": [0, 0]}]


def test_restricted_solvability_is_informational(checker, grid_prefs) -> None:
    solvable = checker.check_restricted_solvability(grid_prefs(np.add.outer(np.arange(3.0), np.arange(3.0))))
    gapped = checker.check_restricted_solvability(grid_prefs(np.array([[0.0, 3.0], [1.0, 4.0]])))

    assert solvable.status is AxiomStatus.PASS
    assert gapped.status is AxiomStatus.NOT_APPLICABLE
    assert gapped.violated > 0
    assert checker.check_archimedean().status is AxiomStatus.NOT_APPLICABLE


def test_run_orders_reports_and_rejects_unknown_ids(checker, additive_model) -> None:
    prefs = induced_order(additive_model.capacity, additive_model)

    reports = checker.run(prefs, ["mono", "a1"])

    assert [report.axiom for report in reports] == ["A1", "MONO"]
    with pytest.raises(ValueError):
        checker.run(prefs, ["A10"])


def test_four_cycle_fails_A1(checker, pairs_prefs) -> None:
    prefs = pairs_prefs(
        (2, 2),
        [(0, 0), (0, 1), (1, 0), (1, 1)],
        [(0, 1, True), (1, 2, True), (2, 3, True), (3, 0, True)],
    )

    report = checker.check_weak_order(prefs)

    assert report.status is AxiomStatus.FAIL
    assert report.violated == 4
    assert len(report.witnesses) == 1
    assert len(report.witnesses[0]["cycle"]) == 4


def test_sequences_on_different_criteria_are_compared(grid_prefs) -> None:
    scores = np.add.outer(np.add.outer(np.arange(3.0), np.arange(2.0)), np.arange(3.0))
    scores[0, 0, 2] = 2.5
    scores[0, 1, 1] = 2.5
    prefs = grid_prefs(scores)
    checker = AxiomChecker(CheckerOptions(seed=7, max_witnesses=1000))

    report = checker.check_A5(prefs, [PartitionCell.whole_grid(scores.shape)])

    assert report.status is AxiomStatus.FAIL
    assert any(witness["first"]["i"] != witness["second"]["i"] for witness in report.witnesses)


def test_rotating_crossings_fail_acyclicity(checker, grid_prefs) -> None:
    low = np.array([0.0, 1.0, 3.5, 5.0])
    high = np.array([0.0, 2.0, 3.0, 4.0])
    x1, x2, x3 = np.meshgrid(np.arange(4), np.arange(4), np.arange(4), indexing="ij")
    scores = np.minimum(high[x1], low[x2]) + np.minimum(high[x2], low[x3]) + np.minimum(high[x3], low[x1])
    prefs = grid_prefs(scores)

    table = checker.build_relation_table(prefs)
    reports = statuses(checker.run(prefs, ["A2", "A3", "A3-ACYCL"]))

    assert table.strict_pairs(table.point_index((1, 1, 1))) == {(0, 1), (1, 2), (2, 0)}
    assert reports == {"A2": AxiomStatus.PASS, "A3": AxiomStatus.PASS, "A3-ACYCL": AxiomStatus.FAIL}


@pytest.mark.parametrize("seed", range(50))
def test_general_capacities_satisfy_the_necessary_axioms(seed) -> None:
    model = random_model(3, 3 + seed % 2, np.random.default_rng(seed), family="general")
    prefs = induced_order(model.capacity, model)

    reports = AxiomChecker(CheckerOptions(seed=seed)).run(prefs, ["A1", "A2", "A3", "A3-ACYCL", "COVERAGE", "A5", "A6", "A7", "MONO"])

    for report in reports:
        assert report.status in (AxiomStatus.PASS, AxiomStatus.NOT_APPLICABLE), report


@pytest.mark.parametrize("seed", range(50))
def test_block_minimum_models_pass_every_gating_axiom(seed) -> None:
    model = random_model(3, 3 + seed % 2, np.random.default_rng(seed), family="blocks")
    prefs = induced_order(model.capacity, model)

    reports = AxiomChecker(CheckerOptions(seed=seed)).run(prefs, GATING_AXIOMS)

    for report in reports:
        assert report.status in (AxiomStatus.PASS, AxiomStatus.NOT_APPLICABLE), report


@pytest.mark.parametrize("seed", range(50))
def test_interaction_cliques_match_the_generating_blocks(seed) -> None:
    model = random_model(3, 3 + seed % 2, np.random.default_rng(seed), family="blocks")
    checker = AxiomChecker(CheckerOptions(seed=seed))

    table = checker.build_relation_table(induced_order(model.capacity, model))

    assert checker.interaction_cliques_from_prefs(table) == cliques_from_mobius(model.capacity)
