import math

import pytest

from ckpsched.core import CheckpointType, SchemeInfo
from ckpsched.mrevolve import modified_cost
from ckpsched.oracle import BruteForceSearch, InstanceTooLargeError, brute_force
from ckpsched.revolve import revolve_cost

SOL = CheckpointType.SOLUTION
SV = CheckpointType.STAGE_VALUES
SWS = CheckpointType.SOLUTION_WITH_STAGES


def test_paper_fig4_values():
    sa2 = SchemeInfo(2, True)
    gen2 = SchemeInfo(2, False)
    assert brute_force(10, 3, SchemeInfo(1), [SOL]) == 15
    assert brute_force(10, 6, gen2, [SOL]) == 12
    assert brute_force(10, 6, sa2, [SOL, SWS]) == 6
    assert brute_force(10, 6, gen2, [SOL, SV, SWS]) == 8


def test_solution_only_matches_closed_form():
    for s in range(1, 6):
        search = BruteForceSearch(s, SchemeInfo(1), [SOL])
        for m in range(1, 12):
            assert search.solve(m) == revolve_cost(m, s), (m, s)


def test_combined_only_matches_modified_cost():
    for ell in (1, 2):
        scheme = SchemeInfo(ell, False)
        per = ell + 1
        for s_cp in (1, 2):
            for m in range(2, 10):
                got = brute_force(m, s_cp * per, scheme, [SWS])
                assert got == modified_cost(m, s_cp), (m, s_cp, ell)


def test_combined_only_feasibility():
    gen2 = SchemeInfo(2, False)
    assert brute_force(3, 3, gen2, [SWS]) == 1  # exactly one 3-unit record fits
    assert math.isinf(brute_force(3, 2, gen2, [SWS]))


def test_infeasible_sentinel():
    assert math.isinf(brute_force(3, 0, SchemeInfo(1), [SOL]))


def test_instance_limits():
    with pytest.raises(InstanceTooLargeError):
        brute_force(15, 3, SchemeInfo(1), [SOL])
    with pytest.raises(InstanceTooLargeError):
        brute_force(5, 9, SchemeInfo(1), [SOL])
    with pytest.raises(InstanceTooLargeError):
        brute_force(5, 3, SchemeInfo(4, False), [SOL])


def test_stage_values_normalize_for_stiffly_accurate():
    # stages of a stiffly accurate scheme include the solution, so plain
    # stage records are the combined record under another name
    sa2 = SchemeInfo(2, True)
    a = brute_force(6, 4, sa2, [SOL, SV])
    b = brute_force(6, 4, sa2, [SOL, SWS])
    assert a == b
