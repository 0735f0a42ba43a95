from __future__ import annotations

import logging

from pychoquet.axioms import AxiomChecker
from pychoquet.logging_utils import get_seeded_logger
from pychoquet.product import induced_order
from pychoquet.suite import roundtrip_suite, roundtrip_trials
from pychoquet.models.options_model import CheckerOptions


def pychoquet_messages(caplog) -> list[str]:
    return [record.getMessage() for record in caplog.records if record.name.startswith("pychoquet")]


def test_checker_verbose_logging_emits_readable_axiom_messages(caplog, additive_model) -> None:
    checker = AxiomChecker(CheckerOptions(seed=3, verbose=True))
    caplog.set_level(logging.DEBUG, logger="pychoquet")

    checker.run(induced_order(additive_model.capacity, additive_model), ["A2", "A3", "A3-ACYCL"])

    log_messages = pychoquet_messages(caplog)
    assert any("Running axioms=['A2', 'A3', 'A3-ACYCL'] alternatives=16 seed=3" in message for message in log_messages)
    assert any("Built relation table points=16 pairs=2 failing_level_pairs=0" in message for message in log_messages)
    assert any(message.startswith("axiom=A3 status=PASS") for message in log_messages)
    assert any(message.startswith("axiom=A3-ACYCL status=PASS") for message in log_messages)


def test_suite_stages_carry_the_seed(caplog, additive_model) -> None:
    caplog.set_level(logging.INFO, logger="pychoquet")

    roundtrip_suite(additive_model, seed=5, axioms=["A1", "A2"], transforms=2)

    log_messages = pychoquet_messages(caplog)
    assert "[seed=5] stage=validate passed=True" in log_messages
    assert "[seed=5] stage=transform passed=True" in log_messages


def test_failed_trials_name_their_seed_and_trial(caplog) -> None:
    caplog.set_level(logging.WARNING, logger="pychoquet")

    roundtrip_trials(n=2, levels=3, trials=2, seed=3, family="additive", duplicate_values=True)

    log_messages = pychoquet_messages(caplog)
    assert "[seed=3 trial=0] Trial failed family=additive stage=validate" in log_messages
    assert "[seed=4 trial=1] Trial failed family=additive stage=validate" in log_messages


def test_seeded_logger_renders_extra_context(caplog) -> None:
    caplog.set_level(logging.INFO, logger="pychoquet")

    get_seeded_logger("suite", seed=11, trial=2, family="min").info("stage=%s passed=%s", "fit", False)

    record = caplog.records[-1]
    assert record.name == "pychoquet.suite"
    assert record.getMessage() == "[seed=11 trial=2 family=min] stage=fit passed=False"
