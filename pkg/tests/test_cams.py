import io
import math

import pytest

from ckpsched.cams import (
    CamsVariant,
    InvalidQueryError,
    build_gen_tables,
    build_sa_tables,
    build_tables,
    cams_query,
    cams_schedule,
    dump_cost_csv,
    gen_total_cost,
    sa_total_cost,
    total_cost,
)
from ckpsched.core import CheckpointType, SchemeInfo
from ckpsched.executor import execute
from ckpsched.mrevolve import modified_cost
from ckpsched.oracle import BruteForceSearch
from ckpsched.revolve import revolve_cost

SOL = CheckpointType.SOLUTION
SV = CheckpointType.STAGE_VALUES
SWS = CheckpointType.SOLUTION_WITH_STAGES
SA2 = SchemeInfo(2, True)
GEN2 = SchemeInfo(2, False)


def test_sa_paper_values():
    tabs = build_sa_tables(10, 6, SA2)
    assert sa_total_cost(tabs) == 6
    assert sa_total_cost(tabs, 1, 2) == 0
    big = build_sa_tables(300, 30, SA2)
    assert sa_total_cost(big, 300, 30) == 357  # 211 fewer than revolve's 568


def test_sa_requires_stiffly_accurate():
    with pytest.raises(Exception):
        build_sa_tables(5, 3, GEN2)


def test_sa_zero_recompute_regime():
    for m in range(1, 11):
        tabs = build_sa_tables(m, 2 * m, SA2)
        assert sa_total_cost(tabs) == 0, m


def test_sa_oracle_value():
    tabs = build_sa_tables(10, 4, SA2)
    assert sa_total_cost(tabs) == 11  # brute-force-verified


def test_gen_paper_values():
    tabs = build_gen_tables(10, 6, GEN2)
    assert gen_total_cost(tabs) == 8
    big = build_gen_tables(300, 30, GEN2)
    assert gen_total_cost(big, 300, 30) == 358  # 210 fewer than revolve's 568


def test_gen_infeasible_sentinel():
    tabs = build_gen_tables(4, 1, SchemeInfo(3, False))
    # one unit holds the seed solution only; triangular strategy still works
    assert gen_total_cost(tabs, 4, 1) == 6
    t0 = build_gen_tables(3, 2, SchemeInfo(3, False))
    assert math.isfinite(gen_total_cost(t0, 3, 2))


def test_totals_match_oracle_small_grid():
    # the full AC7 grid runs in the acceptance suite; spot-check here
    for ell in (1, 2):
        sa = SchemeInfo(ell, True)
        gen = SchemeInfo(ell, False)
        for s in (2, 4):
            sa_search = BruteForceSearch(s, sa, [SOL, SWS])
            gen_search = BruteForceSearch(s, gen, [SOL, SV, SWS])
            t_sa = build_sa_tables(9, s, sa)
            t_gen = build_gen_tables(9, s, gen)
            for m in range(1, 10):
                assert sa_total_cost(t_sa, m, s) == sa_search.solve(m), (m, s, ell, "sa")
                assert gen_total_cost(t_gen, m, s) == gen_search.solve(m), (m, s, ell, "gen")


def test_query_paper_examples():
    assert cams_query(-1, None, 6, 10, SA2, CamsVariant.SA) == (1, SWS)
    assert cams_query(-1, None, 6, 10, GEN2, CamsVariant.GEN) == (0, SOL)


def test_query_idempotent():
    tabs = build_sa_tables(10, 6, SA2)
    a = cams_query(1, SWS, 6, 10, SA2, CamsVariant.SA, tabs)
    b = cams_query(1, SWS, 6, 10, SA2, CamsVariant.SA, tabs)
    assert a == b == (5, SWS)


def test_query_walk_reconstructs_first_sweep():
    # chain the query along the forward sweep: positions and kinds match
    # the schedule's first-sweep stores
    for scheme, variant, s in ((SA2, CamsVariant.SA, 6), (GEN2, CamsVariant.GEN, 6)):
        tabs = build_tables(10, s, scheme, variant)
        sched = cams_schedule(10, s, scheme, variant, tabs)
        walk = []
        nxt = cams_query(-1, None, s, 10, scheme, variant, tabs)
        free = s
        while nxt is not None:
            walk.append(nxt)
            step, kind = nxt
            nxt = cams_query(step, kind, free, 10, scheme, variant, tabs)
            free -= _units(kind, scheme)
        assert walk == sched.first_sweep_stores()


def _units(kind, scheme):
    from ckpsched.core import unit_cost

    return unit_cost(kind, scheme)


def test_query_invalid_states():
    tabs = build_gen_tables(10, 6, GEN2)
    with pytest.raises(InvalidQueryError):
        cams_query(-1, SOL, 6, 10, GEN2, CamsVariant.GEN, tabs)
    with pytest.raises(InvalidQueryError):
        cams_query(3, None, 6, 10, GEN2, CamsVariant.GEN, tabs)
    with pytest.raises(InvalidQueryError):
        cams_query(0, SOL, 99, 10, GEN2, CamsVariant.GEN, tabs)
    with pytest.raises(InvalidQueryError):
        cams_query(11, SOL, 6, 10, GEN2, CamsVariant.GEN, tabs)


def test_schedule_measured_matches_tables():
    sched = cams_schedule(10, 6, SA2, CamsVariant.SA)
    met = execute(sched)
    assert met.recomputations == 6
    assert met.peak_units <= 6
    assert [s for s, _ in sched.first_sweep_stores()] == [1, 5, 8]

    sched = cams_schedule(10, 6, GEN2, CamsVariant.GEN)
    met = execute(sched)
    assert met.recomputations == 8
    assert met.peak_units <= 6
    stores = sched.first_sweep_stores()
    assert stores[0] == (0, SOL)
    assert (9, SV) in stores  # the final stage record of the figure


def test_schedule_replay_grid():
    for ell in (1, 2, 3):
        for sa_flag, variant in ((True, CamsVariant.SA), (False, CamsVariant.GEN)):
            scheme = SchemeInfo(ell, sa_flag)
            for s in (1, 2, 4, 6):
                tabs = build_tables(12, s, scheme, variant)
                for m in range(1, 13):
                    tot = total_cost(tabs, m, s)
                    if math.isinf(tot):
                        continue
                    met = execute(cams_schedule(m, s, scheme, variant, tabs))
                    assert met.recomputations == tot, (m, s, ell, variant)
                    assert met.peak_units <= s, (m, s, ell, variant)


def test_schedule_invalid_budget():
    # one unit always suffices (the seed plus triangular recomputation),
    # so the only rejected budget is the empty one
    with pytest.raises(Exception):
        cams_schedule(5, 0, GEN2, CamsVariant.GEN)
    for s in (1, 2):
        assert math.isfinite(total_cost(build_gen_tables(6, s, GEN2), 6, s))


def test_dominance_over_binomial_schemes():
    gen = GEN2
    sa = SA2
    t_sa = build_sa_tables(60, 12, sa)
    t_gen = build_gen_tables(60, 12, gen)
    for m in range(2, 61):
        for s in range(1, 13):
            r = revolve_cost(m, s)
            s_mod_gen = s // 3
            s_mod_sa = s // 2
            mr_gen = modified_cost(m, s_mod_gen) if s_mod_gen else math.inf
            mr_sa = modified_cost(m, s_mod_sa) if s_mod_sa else math.inf
            assert gen_total_cost(t_gen, m, s) <= r
            assert gen_total_cost(t_gen, m, s) <= mr_gen
            assert sa_total_cost(t_sa, m, s) <= r
            assert sa_total_cost(t_sa, m, s) <= mr_sa


def test_table_monotone_in_budget():
    t = build_gen_tables(40, 10, GEN2)
    for m in range(1, 41):
        for s in range(2, 11):
            assert gen_total_cost(t, m, s) <= gen_total_cost(t, m, s - 1)


def test_cost_csv_dump():
    tabs = build_sa_tables(4, 4, SA2)
    buf = io.StringIO()
    dump_cost_csv(buf, tabs, cells=[(4, 4), (2, 1)])
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "m,s,l,variant,cost"
    assert lines[1].startswith("4,4,2,cams-sa,")
    assert len(lines) == 3


def test_table_is_monotone_in_both_arguments():
    # cost never rises with more budget and never falls with more steps
    import numpy as np

    for scheme, build in ((SA2, build_sa_tables), (GEN2, build_gen_tables)):
        t = build(25, 8, scheme)
        p = t.table_is
        for i in range(2, 26):
            for j in range(1, 9):
                if np.isfinite(p[i, j]) and np.isfinite(p[i, j - 1]):
                    assert p[i, j] <= p[i, j - 1], (i, j, scheme)
                if np.isfinite(p[i, j]) and np.isfinite(p[i - 1, j]):
                    assert p[i, j] >= p[i - 1, j], (i, j, scheme)
