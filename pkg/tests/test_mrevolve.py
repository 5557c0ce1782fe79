import math

import pytest

from ckpsched.core import CheckpointType, DomainError, SchemeInfo
from ckpsched.executor import execute
from ckpsched.mrevolve import (
    Strategy,
    crossover_steps,
    modified_cost,
    modified_schedule,
    select_strategy,
)
from ckpsched.revolve import revolve_cost, revolve_schedule


def test_cost_examples():
    assert modified_cost(10, 3) == 6
    assert modified_cost(5, 10) == 0  # t = 1 regime needs no recomputation
    assert modified_cost(10, 3) == revolve_cost(10, 3) - 9


def test_cost_relation_grid():
    for m in range(2, 151):
        for s in range(1, 16):
            assert modified_cost(m, s) == revolve_cost(m, s) - (m - 1), (m, s)


def test_schedule_fig2():
    sa2 = SchemeInfo(2, True)
    sched = modified_schedule(10, 3, sa2)
    metrics = execute(sched)
    assert metrics.recomputations == 6
    assert metrics.peak_units == 6  # 3 combined checkpoints of 2 units
    assert [s for s, _ in sched.first_sweep_stores()] == [1, 5, 8]
    kinds = {k for _, k in sched.first_sweep_stores()}
    assert kinds == {CheckpointType.SOLUTION_WITH_STAGES}


def test_schedule_shift_property():
    # combined store positions are the classical ones shifted by one
    for m, s in ((10, 3), (17, 4), (25, 2), (9, 9)):
        classical = sorted(revolve_schedule(m, s).store_steps())
        shifted = sorted(x + 1 for x in classical)
        combined = sorted(modified_schedule(m, s, SchemeInfo(2, False)).store_steps())
        assert combined == shifted, (m, s)


def test_schedule_single_step():
    sched = modified_schedule(1, 1, SchemeInfo(3, False))
    assert execute(sched).recomputations == 0
    assert len(sched.actions) == 2


def test_schedule_measured_equals_cost():
    for m in range(2, 30):
        for s in (1, 2, 4):
            for scheme in (SchemeInfo(2, True), SchemeInfo(2, False), SchemeInfo(4, False)):
                sched = modified_schedule(m, s, scheme)
                met = execute(sched)
                assert met.recomputations == modified_cost(m, s), (m, s, scheme)


def test_select_strategy_examples():
    # 12 units, combined checkpoint of 3 units (2-stage general scheme)
    g2 = SchemeInfo(2, False)
    assert select_strategy(40, 12, g2).strategy is Strategy.MODIFIED
    assert select_strategy(42, 12, g2).strategy is Strategy.CLASSICAL
    # 12 units, combined checkpoint of 4 units (3-stage general scheme):
    # classical from the crossover at 13 onward (cost tie resolves classical)
    g3 = SchemeInfo(3, False)
    assert select_strategy(13, 12, g3).strategy is Strategy.CLASSICAL
    assert select_strategy(12, 12, g3).strategy is Strategy.MODIFIED
    choice = select_strategy(40, 12, g2)
    assert choice.modified_checkpoints == 4
    assert choice.classical_cost == revolve_cost(40, 12)
    assert choice.modified_cost == modified_cost(40, 4)


def test_select_strategy_tiny_budget():
    g3 = SchemeInfo(3, False)
    choice = select_strategy(10, 2, g3)  # no combined checkpoint fits
    assert choice.strategy is Strategy.CLASSICAL
    assert math.isinf(choice.modified_cost)


def test_crossover_examples():
    assert crossover_steps(12, 1) == 41
    assert crossover_steps(12, 2) == 13
    assert crossover_steps(4, 1) == 4  # scan-verified small case
    with pytest.raises(DomainError):
        crossover_steps(2, 1)
