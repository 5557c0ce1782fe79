"""Optimal checkpointing for multistage time steppers via dynamic programming.

Checkpoints may hold a solution (1 unit), the stage values of one step
(one unit per stage), or both.  Two variants: the stiffly-accurate one
(the last stage doubles as the solution, so stage records can also seed
recomputation) and the general one, where plain stage records only allow
reversing their own step and a double dynamic program over two
intertwined cost tables is needed.

Cost-table convention: ``table_is[i, j]`` is the minimal number of extra
forward steps to reverse i steps given the subrange's initial solution
held in memory, where j counts the units available to the subrange
*including* the one holding that initial solution.  ``table_sv[i, j]``
(general variant) is the same with the stage values of the subrange's
first step held instead, j including those stage units.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import IO, Optional, Tuple

import numpy as np

from .core import (
    Advance,
    CheckpointRecord,
    CheckpointType,
    DomainError,
    InfeasibleScheduleError,
    Restore,
    ReverseStep,
    Schedule,
    SchemeInfo,
    Store,
    make_record,
    unit_cost,
)

INFEASIBLE = math.inf


class CamsVariant(Enum):
    SA = "cams-sa"
    GEN = "cams-gen"


class InvalidQueryError(DomainError):
    """The queried (last checkpoint, budget, target) state is not reachable."""


@dataclass
class CamsTables:
    """Memoized cost tables plus per-cell argmin path data.

    path arrays: ``case_is[i, j]`` is 0 (base, no split), 1 (next
    checkpoint is a solution) or 2 (next checkpoint carries stage values),
    with split point ``split_is[i, j]``.  For the general variant
    ``branch_sv[i, j]`` is 1 when the range following a stage record opens
    with a solution checkpoint and 2 when it opens with another stage
    record.

    Built once, then read-only: queries are safe from any number of
    threads.
    """

    m: int
    s: int
    scheme: SchemeInfo
    variant: CamsVariant
    table_is: np.ndarray
    split_is: np.ndarray
    case_is: np.ndarray
    table_sv: Optional[np.ndarray] = None
    branch_sv: Optional[np.ndarray] = None


def build_sa_tables(m: int, s: int, scheme: SchemeInfo) -> CamsTables:
    """Fill the stiffly-accurate cost table bottom-up.

    For i >= 2 and j >= 1:
      case 1 (solution after mt steps):      mt   + P(mt, j)   + P(i-mt, j-1)
      case 2 (stages of step mt, ell units): mt-1 + P(mt-1, j) + P(i-mt, j-ell)
    Ties prefer case 2 (a stage record saves the turn's recomputation),
    then the smallest split.
    """
    if not scheme.stiffly_accurate:
        raise DomainError("build_sa_tables needs a stiffly accurate scheme")
    _check_dims(m, s)
    ell = scheme.num_stages
    p = np.full((m + 1, s + 1), INFEASIBLE)
    split = np.zeros((m + 1, s + 1), dtype=np.int64)
    case = np.zeros((m + 1, s + 1), dtype=np.int64)
    p[0, :] = 0.0
    if m >= 1:
        p[1, :] = 0.0
    for i in range(2, m + 1):
        mt1 = np.arange(1, i)
        for j in range(1, s + 1):
            c1 = mt1 + p[mt1, j] + p[i - mt1, j - 1]
            k1 = int(np.argmin(c1))
            best1, split1 = c1[k1], int(mt1[k1])
            # the stage record itself always occupies ell units, so the
            # subrange it seeds needs a unit left for it: j - ell >= 1
            if j - ell >= 1:
                c2 = (mt1 - 1) + p[mt1 - 1, j] + p[i - mt1, j - ell]
                k2 = int(np.argmin(c2))
                best2, split2 = c2[k2], int(mt1[k2])
            else:
                best2, split2 = INFEASIBLE, 0
            if best2 <= best1 and best2 < INFEASIBLE:
                p[i, j], split[i, j], case[i, j] = best2, split2, 2
            elif best1 < INFEASIBLE:
                p[i, j], split[i, j], case[i, j] = best1, split1, 1
    return CamsTables(m, s, scheme, CamsVariant.SA, p, split, case)


def build_gen_tables(m: int, s: int, scheme: SchemeInfo) -> CamsTables:
    """Fill both general-variant tables with the double dynamic program.

    For i >= 2 and j >= 1:
      P_is case 1: mt in [1, i-1]: mt   + P_is(mt, j)   + P_is(i-mt, j-1)
      P_is case 2: mt in [1, i-1]: mt-1 + P_is(mt-1, j) + P_sv(i-mt+1, j-1)
      P_sv:        min(P_is(i-1, j-ell), P_sv(i-1, j-ell))
    The split ranges include the boundary splits (a trailing subrange of
    one step needs no checkpoint at all, and a stage record may open the
    whole remaining range), which the tight budget cases require.
    """
    _check_dims(m, s)
    ell = scheme.num_stages
    # fusing the solution into a stage record costs one extra unit unless
    # the scheme is stiffly accurate (the last stage already is the solution)
    fuse = unit_cost(CheckpointType.SOLUTION_WITH_STAGES, scheme) - 1
    p_is = np.full((m + 1, s + 1), INFEASIBLE)
    p_sv = np.full((m + 1, s + 1), INFEASIBLE)
    split = np.zeros((m + 1, s + 1), dtype=np.int64)
    case = np.zeros((m + 1, s + 1), dtype=np.int64)
    branch = np.zeros((m + 1, s + 1), dtype=np.int64)
    p_is[0, :] = 0.0
    p_sv[0, :] = 0.0
    if m >= 1:
        p_is[1, :] = 0.0
        p_sv[1, :] = 0.0
    for i in range(2, m + 1):
        for j in range(ell, s + 1):
            a = p_is[i - 1, j - fuse] if j - fuse >= 0 else INFEASIBLE
            b = p_sv[i - 1, j - ell]
            # prefer chaining stage records on ties: a tied solution child
            # could itself open with a stage chain that never reads it
            if b <= a and b < INFEASIBLE:
                p_sv[i, j], branch[i, j] = b, 2
            elif a < INFEASIBLE:
                p_sv[i, j], branch[i, j] = a, 1
        mt1 = np.arange(1, i)
        for j in range(1, s + 1):
            c1 = mt1 + p_is[mt1, j] + p_is[i - mt1, j - 1]
            k1 = int(np.argmin(c1))
            best1, split1 = c1[k1], int(mt1[k1])
            c2 = (mt1 - 1) + p_is[mt1 - 1, j] + p_sv[i - mt1 + 1, j - 1]
            k2 = int(np.argmin(c2))
            best2, split2 = c2[k2], int(mt1[k2])
            # case 2 preferred on ties (see above: keeps every stored
            # solution on some future restore path)
            if best2 <= best1 and best2 < INFEASIBLE:
                p_is[i, j], split[i, j], case[i, j] = best2, split2, 2
            elif best1 < INFEASIBLE:
                p_is[i, j], split[i, j], case[i, j] = best1, split1, 1
    return CamsTables(m, s, scheme, CamsVariant.GEN, p_is, split, case, p_sv, branch)


def build_tables(m: int, s: int, scheme: SchemeInfo, variant: CamsVariant) -> CamsTables:
    if variant is CamsVariant.SA:
        return build_sa_tables(m, s, scheme)
    return build_gen_tables(m, s, scheme)


def _check_dims(m, s):
    if m < 1 or s < 1:
        raise DomainError(f"need m >= 1 and s >= 1, got m={m}, s={s}")


def sa_total_cost(tables: CamsTables, m: int | None = None, s: int | None = None) -> float:
    """Stage records seed recomputation here, so the whole problem is
    min(P(m, s), P(m-1, s-ell+1)): either checkpoint the initial solution
    or the first step's stages (whose last stage is that step's solution).
    """
    m = tables.m if m is None else m
    s = tables.s if s is None else s
    ell = tables.scheme.num_stages
    best = tables.table_is[m, s]
    if s >= ell:
        best = min(best, tables.table_is[m - 1, s - ell + 1])
    return float(best)


def gen_total_cost(tables: CamsTables, m: int | None = None, s: int | None = None) -> float:
    """min(P_is(m, s), P_sv(m, s)): open with the initial solution stored
    or with the first step's stage values stored."""
    m = tables.m if m is None else m
    s = tables.s if s is None else s
    return float(min(tables.table_is[m, s], tables.table_sv[m, s]))


def total_cost(tables: CamsTables, m: int | None = None, s: int | None = None) -> float:
    if tables.variant is CamsVariant.SA:
        return sa_total_cost(tables, m, s)
    return gen_total_cost(tables, m, s)


def _sv_head(tables: CamsTables, i: int, j: int) -> Optional[CheckpointType]:
    """Kind of the record opening a general-variant stage range of i steps.

    A one-step range is the trailing step (no record); a two-step range
    stores plain stage values; a longer range opening with a solution
    fuses it with the stages into a combined record.
    """
    if i <= 1:
        return None
    if tables.branch_sv[i, j] == 1 and i >= 3:
        return CheckpointType.SOLUTION_WITH_STAGES
    return CheckpointType.STAGE_VALUES


def _seed_budget(tables: CamsTables, kind: CheckpointType, s: int) -> int:
    """Convert a query budget (units available to the subrange, counting
    the anchor record) into the cost-table convention where the seed
    contributes one unit."""
    ell = tables.scheme.num_stages
    if kind is CheckpointType.SOLUTION:
        return s
    if kind is CheckpointType.SOLUTION_WITH_STAGES:
        return s - ell + 1 if tables.scheme.stiffly_accurate else s - ell
    raise InvalidQueryError(f"{kind} cannot seed recomputation for this scheme")


def cams_query(
    last_step: int,
    last_kind: Optional[CheckpointType],
    s: int,
    m: int,
    scheme: SchemeInfo,
    variant: CamsVariant,
    tables: Optional[CamsTables] = None,
) -> Optional[Tuple[int, CheckpointType]]:
    """Position and kind of the next checkpoint on the optimal path.

    `last_step`/`last_kind` name the last checkpoint stored or restored
    (-1/None before any exists), `s` the units available to the remaining
    subproblem including that record's own, and `m` the index of the last
    step the current reversal still has to cover.  Pure function of its
    arguments; returns None when no further checkpoint is needed before
    step m.  Raises InvalidQueryError for states off every optimal path.
    """
    if tables is None:
        tables = build_tables(m, s, scheme, variant)
    if tables.scheme != scheme or tables.variant is not variant:
        raise InvalidQueryError("tables do not match the queried scheme/variant")
    if m > tables.m or s > tables.s or s < 0:
        raise InvalidQueryError(f"query (m={m}, s={s}) outside built tables")

    if last_step == -1:
        if last_kind is not None:
            raise InvalidQueryError("last_step=-1 must come with last_kind=None")
        return _initial_checkpoint(tables, m, s)

    if last_step < 0 or last_step > m:
        raise InvalidQueryError(f"last_step {last_step} outside [0, {m}]")
    if last_kind is None:
        raise InvalidQueryError("a stored checkpoint needs a kind")
    i = m - last_step
    if i == 0:
        return None
    if last_kind is CheckpointType.STAGE_VALUES and not tables.scheme.stiffly_accurate:
        # the record can only reverse its own step, so the remaining range
        # still includes it: the stage-table cell (m - last + 1, s) governs
        return _next_in_stage_range(tables, last_step, i + 1, s)
    seed_kind = last_kind
    if seed_kind is CheckpointType.STAGE_VALUES:
        seed_kind = CheckpointType.SOLUTION_WITH_STAGES
    j = _seed_budget(tables, seed_kind, s)
    if j < 0 or not np.isfinite(tables.table_is[i, j]):
        raise InvalidQueryError(f"no feasible schedule from step {last_step} with {s} units")
    return _first_store(tables, last_step, i, j)


def _next_in_stage_range(tables, last_step, i_sv, j_sv):
    """Next record after a plain stage record at `last_step` heading a
    general-variant stage range of i_sv steps under j_sv units."""
    if i_sv <= 2:
        return None
    ell = tables.scheme.num_stages
    if j_sv < 0 or not np.isfinite(tables.table_sv[i_sv, j_sv]):
        raise InvalidQueryError(f"no feasible stage range of {i_sv} steps with {j_sv} units")
    if tables.branch_sv[i_sv, j_sv] == 1:
        # the optimal range here fuses the solution into the head record;
        # a plain stage record at its head is off every optimal path
        raise InvalidQueryError(
            f"a plain stage record at step {last_step} is not on an optimal path"
        )
    kind = _sv_head(tables, i_sv - 1, j_sv - ell)
    if kind is None:
        return None
    return (last_step + 1, kind)


def _initial_checkpoint(tables, m, s):
    """Resolve which record opens the whole problem (the total-cost min)."""
    ell = tables.scheme.num_stages
    if m == 1:
        return None
    opt_is = tables.table_is[m, s]
    if tables.variant is CamsVariant.SA:
        opt_sv = tables.table_is[m - 1, s - ell + 1] if s >= ell else INFEASIBLE
        if opt_sv <= opt_is and opt_sv < INFEASIBLE:
            return (1, CheckpointType.SOLUTION_WITH_STAGES)
        if opt_is < INFEASIBLE:
            return (0, CheckpointType.SOLUTION)
    else:
        opt_sv = tables.table_sv[m, s]
        if opt_is <= opt_sv and opt_is < INFEASIBLE:
            return (0, CheckpointType.SOLUTION)
        if opt_sv < INFEASIBLE:
            kind = _sv_head(tables, m, s)
            if kind is None:
                return None
            return (1, kind)
    raise InvalidQueryError(f"reversing {m} steps with {s} units is infeasible")


def _first_store(tables, base, i, j):
    """First checkpoint the sweep from `base` toward `base + i` stores."""
    if i <= 1:
        return None
    case = int(tables.case_is[i, j])
    mt = int(tables.split_is[i, j])
    if case == 0:
        return None
    if case == 1:
        if i - mt == 1:
            return None
        return (base + mt, CheckpointType.SOLUTION)
    if tables.variant is CamsVariant.SA:
        return (base + mt, CheckpointType.SOLUTION_WITH_STAGES)
    kind = _sv_head(tables, i - mt + 1, j - 1)
    assert kind is not None
    return (base + mt, kind)


def cams_schedule(
    m: int,
    s: int,
    scheme: SchemeInfo,
    variant: CamsVariant,
    tables: Optional[CamsTables] = None,
) -> Schedule:
    """Full schedule extracted from the argmin path; executor-measured
    recomputations equal the table total."""
    _check_dims(m, s)
    if tables is None:
        tables = build_tables(m, s, scheme, variant)
    if m == 1:
        return Schedule(1, s, scheme, (Advance(0, 1), ReverseStep(1)))
    total = total_cost(tables, m, s)
    if not np.isfinite(total):
        raise InfeasibleScheduleError(f"reversing {m} steps with {s} units is infeasible")
    actions: list = []
    first = _initial_checkpoint(tables, m, s)
    ell = scheme.num_stages
    if first == (0, CheckpointType.SOLUTION):
        seed = make_record(0, CheckpointType.SOLUTION, scheme)
        actions.append(Store(seed))
        _emit_is(actions, tables, 0, m, s, seed, need_restore=False)
    elif tables.variant is CamsVariant.SA:
        seed = make_record(1, CheckpointType.SOLUTION_WITH_STAGES, scheme)
        actions.append(Advance(0, 1))
        actions.append(Store(seed))
        _emit_is(actions, tables, 1, m - 1, s - ell + 1, seed, need_restore=False)
        actions.append(Restore(seed, discard=True))
        actions.append(ReverseStep(1))
    else:
        actions.append(Advance(0, 1))
        _emit_sv(actions, tables, 1, m, s)
    return Schedule(m, s, scheme, tuple(actions))


def _emit_is(actions, tables, a, i, j, seed, need_restore):
    """Reverse steps a+1 .. a+i seeded by `seed` (a solution-bearing record
    at index a).  Solution-only seeds are discarded by their last restore
    here; combined seeds stay live for the caller's own backward step."""
    scheme = tables.scheme
    owns = seed.kind is CheckpointType.SOLUTION
    if i == 1:
        if need_restore:
            actions.append(Restore(seed, discard=owns))
        actions.append(Advance(a, a + 1))
        actions.append(ReverseStep(a + 1))
        return
    case = int(tables.case_is[i, j])
    mt = int(tables.split_is[i, j])
    if case == 0:
        raise InfeasibleScheduleError(f"no path for range of {i} steps with budget {j}")
    if need_restore:
        actions.append(Restore(seed, discard=(owns and case == 2 and mt == 1)))
    if case == 1:
        if i - mt == 1:
            actions.append(Advance(a, a + i))
            actions.append(ReverseStep(a + i))
        else:
            rec = make_record(a + mt, CheckpointType.SOLUTION, scheme)
            actions.append(Advance(a, a + mt))
            actions.append(Store(rec))
            _emit_is(actions, tables, a + mt, i - mt, j - 1, rec, need_restore=False)
        _emit_is(actions, tables, a, mt, j, seed, need_restore=True)
        return
    # case 2: a stage-bearing record at a+mt covers its own step directly
    actions.append(Advance(a, a + mt))
    if tables.variant is CamsVariant.SA:
        ell = scheme.num_stages
        rec = make_record(a + mt, CheckpointType.SOLUTION_WITH_STAGES, scheme)
        actions.append(Store(rec))
        if i - mt >= 1:
            _emit_is(actions, tables, a + mt, i - mt, j - ell, rec, need_restore=False)
        actions.append(Restore(rec, discard=True))
        actions.append(ReverseStep(a + mt))
    else:
        _emit_sv(actions, tables, a + mt, i - mt + 1, j - 1)
    if mt - 1 >= 1:
        _emit_is(actions, tables, a, mt - 1, j, seed, need_restore=True)


def _emit_sv(actions, tables, r, i, j):
    """General variant: reverse steps r .. r+i-1, the sweep having just
    arrived at r.  Step r is covered by a stage record stored now (fused
    with the solution when the following range recomputes from it); the
    whole range is consumed before anything outside it is touched."""
    scheme = tables.scheme
    ell = scheme.num_stages
    if i == 1:
        actions.append(ReverseStep(r))
        return
    branch = int(tables.branch_sv[i, j])
    if branch == 0:
        raise InfeasibleScheduleError(f"no stage-range path for {i} steps with budget {j}")
    if branch == 1 and i >= 3:
        fuse = unit_cost(CheckpointType.SOLUTION_WITH_STAGES, scheme) - 1
        rec = make_record(r, CheckpointType.SOLUTION_WITH_STAGES, scheme)
        actions.append(Store(rec))
        _emit_is(actions, tables, r, i - 1, j - fuse, rec, need_restore=False)
    elif branch == 1:  # i == 2: solution part elided, trailing covers step r+1
        rec = make_record(r, CheckpointType.STAGE_VALUES, scheme)
        actions.append(Store(rec))
        actions.append(Advance(r, r + 1))
        actions.append(ReverseStep(r + 1))
    else:
        rec = make_record(r, CheckpointType.STAGE_VALUES, scheme)
        actions.append(Store(rec))
        actions.append(Advance(r, r + 1))
        _emit_sv(actions, tables, r + 1, i - 1, j - ell)
    actions.append(Restore(rec, discard=True))
    actions.append(ReverseStep(r))


def dump_cost_csv(stream: IO[str], tables: CamsTables, cells=None) -> None:
    """Write `m,s,l,variant,cost` rows for the queried cells (all by default)."""
    writer = csv.writer(stream)
    writer.writerow(["m", "s", "l", "variant", "cost"])
    ell = tables.scheme.num_stages
    if cells is None:
        cells = ((i, j) for i in range(1, tables.m + 1) for j in range(1, tables.s + 1))
    for i, j in cells:
        cost = total_cost(tables, i, j)
        text = "inf" if not np.isfinite(cost) else str(int(cost))
        writer.writerow([i, j, ell, tables.variant.value, text])
