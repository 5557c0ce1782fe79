"""Acceptance criteria, one test per criterion, one printed line each.

Run as `pytest -v -s tests/test_acceptance.py` to see the lines; the whole
module stays within a few minutes on a laptop.
"""
import math
import random
import time

import numpy as np
import pytest

from ckpsched.adjoint import (
    RK4,
    finite_difference_gradient,
    gradient_via_policy,
    reaction_1d_problem,
)
from ckpsched.cams import (
    CamsVariant,
    build_gen_tables,
    build_sa_tables,
    build_tables,
    gen_total_cost,
    sa_total_cost,
    total_cost,
)
from ckpsched.consultant import Policy, consultant_run, predicted_cost
from ckpsched.core import CheckpointType, SchemeInfo, unit_cost
from ckpsched.executor import CountingEngine, execute
from ckpsched.mrevolve import crossover_steps, modified_cost
from ckpsched.oracle import BruteForceSearch
from ckpsched.revolve import RevolveTables, revolve_cost, revolve_schedule

SOL = CheckpointType.SOLUTION
SV = CheckpointType.STAGE_VALUES
SWS = CheckpointType.SOLUTION_WITH_STAGES


def report(name, ok, detail=""):
    print(f"{name}: {'PASS' if ok else 'FAIL'}{' - ' + detail if detail else ''}")
    assert ok, f"{name} failed: {detail}"


def test_ac1_closed_form_vs_dp():
    t0 = time.monotonic()
    tables = RevolveTables(150, 15)
    bad = [
        (m, s)
        for s in range(1, 16)
        for m in range(1, 151)
        if tables.cost(m, s) != revolve_cost(m, s)
    ]
    elapsed = time.monotonic() - t0
    report("AC1 closed-form == DP on m<=150, s<=15", not bad and elapsed < 10,
           f"{len(bad)} mismatches, {elapsed:.1f}s")


def test_ac2_fig1_replay():
    sched = revolve_schedule(10, 3)
    metrics = execute(sched, CountingEngine())
    stores = [s for s, _ in sched.first_sweep_stores()]
    ok = metrics.recomputations == 15 and stores == [0, 4, 7]
    report("AC2 reversal of 10 steps, 3 checkpoints", ok,
           f"measured {metrics.recomputations}, first-sweep stores {stores}")


def test_ac3_fig4_triple():
    sa2, gen2 = SchemeInfo(2, True), SchemeInfo(2, False)
    r = execute(revolve_schedule(10, 6)).recomputations
    sa = consultant_run(10, 6, sa2, Policy.CAMS_SA).recomputations
    gen = consultant_run(10, 6, gen2, Policy.CAMS_GEN).recomputations
    ok = (r, sa, gen) == (12, 6, 8)
    report("AC3 10 steps / 6 units triple (12, 6, 8)", ok, f"got {(r, sa, gen)}")


def test_ac4_shifted_cost_relation():
    bad = [
        (m, s)
        for m in range(2, 151)
        for s in range(1, 16)
        if modified_cost(m, s) != revolve_cost(m, s) - (m - 1)
    ]
    report("AC4 modified == classical - (m-1) on grid", not bad, f"{len(bad)} mismatches")


def test_ac5_crossovers():
    c1 = crossover_steps(12, 1)
    c2 = crossover_steps(12, 2)
    ok = (c1, c2) == (41, 13)
    report("AC5 crossovers at 12 units (41, 13)", ok, f"got {(c1, c2)}")


def test_ac6_300_step_deltas():
    sa2, gen2 = SchemeInfo(2, True), SchemeInfo(2, False)
    t_sa = build_sa_tables(300, 60, sa2)
    t_gen = build_gen_tables(300, 60, gen2)
    deltas = {
        "sa@30": revolve_cost(300, 30) - sa_total_cost(t_sa, 300, 30),
        "gen@30": revolve_cost(300, 30) - gen_total_cost(t_gen, 300, 30),
        "sa@60": revolve_cost(300, 60) - sa_total_cost(t_sa, 300, 60),
        "gen@60": revolve_cost(300, 60) - gen_total_cost(t_gen, 300, 60),
    }
    want = {"sa@30": 211, "gen@30": 210, "sa@60": 269, "gen@60": 261}
    ok = all(deltas[k] == want[k] for k in want)
    # Known honest failure: gen@60 computes 264 (cost 274), beating the
    # published 261 (cost 277); the oracle-validated tables are strictly
    # better than the reference implementation here.  See decisions ledger.
    report("AC6 300-step deltas (211, 210, 269, 261)", ok,
           f"got {({k: int(v) for k, v in deltas.items()})}")


def test_ac7_oracle_optimality():
    t0 = time.monotonic()
    failures = []
    for ell in (1, 2, 3):
        gen = SchemeInfo(ell, False)
        sa = SchemeInfo(ell, True)
        combined = unit_cost(SWS, gen)
        for s in range(1, 7):
            search_sol = BruteForceSearch(s, gen, [SOL])
            search_sws = BruteForceSearch(s, gen, [SWS])
            search_sa = BruteForceSearch(s, sa, [SOL, SWS])
            search_gen = BruteForceSearch(s, gen, [SOL, SV, SWS])
            t_sa = build_sa_tables(12, s, sa)
            t_gen = build_gen_tables(12, s, gen)
            for m in range(1, 13):
                if revolve_cost(m, s) != search_sol.solve(m):
                    failures.append(("revolve", m, s, ell))
                s_mod = s // combined
                if s_mod >= 1:
                    want_mr = modified_cost(m, s_mod)
                elif m == 1:
                    want_mr = 0  # a lone step reverses from trailing memory
                else:
                    want_mr = math.inf
                got_mr = search_sws.solve(m)
                if not (want_mr == got_mr or (math.isinf(want_mr) and math.isinf(got_mr))):
                    failures.append(("mrevolve", m, s, ell))
                if sa_total_cost(t_sa, m, s) != search_sa.solve(m):
                    failures.append(("cams-sa", m, s, ell))
                if gen_total_cost(t_gen, m, s) != search_gen.solve(m):
                    failures.append(("cams-gen", m, s, ell))
    elapsed = time.monotonic() - t0
    report("AC7 predicted == brute force (m<=12, s<=6, l<=3)", not failures and elapsed < 300,
           f"{len(failures)} mismatches {failures[:4]}, {elapsed:.0f}s")


def test_ac8_dominance_and_zero_regime():
    failures = []
    for ell in (1, 2, 3):
        gen = SchemeInfo(ell, False)
        sa = SchemeInfo(ell, True)
        combined_gen = unit_cost(SWS, gen)
        combined_sa = unit_cost(SWS, sa)
        t_sa = build_sa_tables(150, 15, sa)
        t_gen = build_gen_tables(150, 15, gen)
        for m in range(1, 151):
            for s in range(1, 16):
                r = revolve_cost(m, s)
                s_gen = s // combined_gen
                s_sa = s // combined_sa
                mr_gen = modified_cost(m, s_gen) if s_gen >= 1 else math.inf
                mr_sa = modified_cost(m, s_sa) if s_sa >= 1 else math.inf
                if not (gen_total_cost(t_gen, m, s) <= r and gen_total_cost(t_gen, m, s) <= mr_gen):
                    failures.append(("gen", m, s, ell))
                if not (sa_total_cost(t_sa, m, s) <= r and sa_total_cost(t_sa, m, s) <= mr_sa):
                    failures.append(("sa", m, s, ell))
        for m in range(1, 21):
            s = ell * m
            t_sa_z = build_sa_tables(m, s, sa)
            t_gen_z = build_gen_tables(m, s, gen)
            if sa_total_cost(t_sa_z, m, s) != 0:
                failures.append(("sa-zero", m, s, ell))
            if gen_total_cost(t_gen_z, m, s) != 0:
                failures.append(("gen-zero", m, s, ell))
    report("AC8 dominance + zero-recompute regime", not failures,
           f"{len(failures)} failures {failures[:4]}")


def test_ac9_gradient_correctness():
    t0 = time.monotonic()
    prob = reaction_1d_problem(cells=16, steps=30)
    assert prob.dimension == 32
    fd = finite_difference_gradient(prob, RK4)
    denom = float(np.max(np.abs(fd)))
    base, base_met = gradient_via_policy(prob, RK4, Policy.FULL_STORAGE)
    results = {"full-storage": (base, base_met)}
    for policy, s in ((Policy.REVOLVE, 4), (Policy.MODIFIED_REVOLVE, 2), (Policy.CAMS_GEN, 9)):
        results[policy.value] = gradient_via_policy(prob, RK4, policy, s)
    rel_errs = {
        name: float(np.max(np.abs(g - fd))) / denom for name, (g, _) in results.items()
    }
    bitwise = all(np.array_equal(g, base) for g, _ in results.values())
    ok = bitwise and all(err <= 1e-5 for err in rel_errs.values())
    elapsed = time.monotonic() - t0
    report("AC9 gradients: FD rel err <= 1e-5, bitwise across policies", ok and elapsed < 30,
           f"max rel err {max(rel_errs.values()):.2e}, bitwise={bitwise}, {elapsed:.0f}s")


def test_ac10_predicted_equals_measured_randomized():
    rng = random.Random(2024)
    failures = []
    tested = 0
    while tested < 200:
        m = rng.randint(1, 100)
        ell = rng.randint(1, 3)
        policy = rng.choice(
            [Policy.REVOLVE, Policy.MODIFIED_REVOLVE, Policy.CAMS_SA, Policy.CAMS_GEN]
        )
        sa_flag = policy is Policy.CAMS_SA or rng.random() < 0.5
        scheme = SchemeInfo(ell, sa_flag)
        s = rng.randint(1, 15)
        want = predicted_cost(m, s, scheme, policy)
        if math.isinf(want):
            continue
        tested += 1
        got = consultant_run(m, s, scheme, policy).recomputations
        if got != want:
            failures.append((m, s, ell, policy.value, got, want))
    report("AC10 consultant runs == predicted (200 random tuples)", not failures,
           f"{len(failures)} failures {failures[:3]}")
