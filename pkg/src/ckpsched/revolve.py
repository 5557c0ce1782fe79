"""Classical binomial checkpointing with solution-only checkpoints.

Provides the closed-form recomputation count, the equivalent dynamic
program with argmin path extraction, schedule generation, and a
consultant cursor that replays a schedule as the classic action
nomenclature (takeshot / advance / restore / firsturn / youturn).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .core import (
    Advance,
    CheckpointType,
    DomainError,
    Restore,
    ReverseStep,
    Schedule,
    SchemeInfo,
    Store,
    make_record,
)

INFEASIBLE = math.inf


def repetition_number(m: int, s: int) -> int:
    """The unique t with C(s+t-1, t-1) < m <= C(s+t, t)."""
    if m < 1 or s < 1:
        raise DomainError(f"need m >= 1 and s >= 1, got m={m}, s={s}")
    t = 1
    while math.comb(s + t, t) < m:
        t += 1
    # m = 1 admits no strict lower bound; t = 1 still yields cost 0 there.
    assert m == 1 or math.comb(s + t - 1, t - 1) < m <= math.comb(s + t, t)
    return t


def revolve_cost(m: int, s: int) -> int:
    """Minimal recomputations to reverse m steps with s solution checkpoints."""
    t = repetition_number(m, s)
    return t * m - math.comb(s + t, t - 1)


class RevolveTables:
    """Cost table P[i][j] for reversing i steps with j solution checkpoints
    (the checkpoint holding the subrange's initial state counts toward j),
    plus the argmin split point per cell.

    Recurrence: P(i, j) = min over mt in [1, i-1] of
        mt + P(mt, j) + P(i - mt, j - 1)
    with P(0, j) = P(1, j) = 0 and P(i, 0) infeasible for i >= 2.
    Ties break toward the smallest mt, so schedules are deterministic.
    """

    def __init__(self, m: int, s: int):
        if m < 0 or s < 1:
            raise DomainError(f"need m >= 0 and s >= 1, got m={m}, s={s}")
        self.m = m
        self.s = s
        cost = [[INFEASIBLE] * (s + 1) for _ in range(m + 1)]
        split = [[0] * (s + 1) for _ in range(m + 1)]
        for j in range(s + 1):
            cost[0][j] = 0
            if m >= 1:
                cost[1][j] = 0
        for i in range(2, m + 1):
            for j in range(1, s + 1):
                best = INFEASIBLE
                best_mt = 0
                for mt in range(1, i):
                    val = mt + cost[mt][j] + cost[i - mt][j - 1]
                    if val < best:
                        best = val
                        best_mt = mt
                cost[i][j] = best
                split[i][j] = best_mt
        self._cost = cost
        self._split = split

    def cost(self, i: int, j: int) -> float:
        return self._cost[i][j]

    def split(self, i: int, j: int) -> int:
        return self._split[i][j]


def revolve_dp_cost(m: int, s: int, tables: RevolveTables | None = None) -> float:
    """DP evaluation of the recomputation count; equals revolve_cost for m >= 1."""
    if m < 0 or s < 1:
        raise DomainError(f"need m >= 0 and s >= 1, got m={m}, s={s}")
    if tables is None or tables.m < m or tables.s < s:
        tables = RevolveTables(m, s)
    return tables.cost(m, s)


def revolve_schedule(m: int, s: int, scheme: SchemeInfo = SchemeInfo(1)) -> Schedule:
    """Optimal solution-only schedule; measured recomputations equal revolve_cost(m, s).

    The first sweep stores the initial state and the split points of the
    cost table; later sweeps fill freed slots along the extracted path.
    """
    if m < 1 or s < 1:
        raise DomainError(f"need m >= 1 and s >= 1, got m={m}, s={s}")
    actions: list = []
    if m == 1:
        actions = [Advance(0, 1), ReverseStep(1)]
        return Schedule(1, s, scheme, tuple(actions))
    tables = RevolveTables(m, s)
    actions.append(Store(make_record(0, CheckpointType.SOLUTION, scheme)))
    _emit_solution_range(actions, tables, scheme, 0, m, s, need_restore=False)
    return Schedule(m, s, scheme, tuple(actions))


def _emit_solution_range(actions, tables, scheme, a, i, j, need_restore):
    """Reverse steps a+1 .. a+i given the solution at a stored.

    The last restore of `a` carries discard=True; a size-one right part is
    reversed from the trailing step of the sweep, with no store emitted.
    """
    rec_a = make_record(a, CheckpointType.SOLUTION, scheme)
    if need_restore:
        actions.append(Restore(rec_a, discard=(i == 1)))
    if i == 1:
        actions.append(Advance(a, a + 1))
        actions.append(ReverseStep(a + 1))
        return
    mt = tables.split(i, j)
    if mt == 0:
        raise DomainError(f"no feasible split for range of {i} steps with {j} checkpoints")
    if i - mt == 1:
        actions.append(Advance(a, a + i))
        actions.append(ReverseStep(a + i))
    else:
        actions.append(Advance(a, a + mt))
        actions.append(Store(make_record(a + mt, CheckpointType.SOLUTION, scheme)))
        _emit_solution_range(actions, tables, scheme, a + mt, i - mt, j - 1, need_restore=False)
    _emit_solution_range(actions, tables, scheme, a, mt, j, need_restore=True)


class ActionTag(Enum):
    TAKESHOT = "takeshot"
    ADVANCE = "advance"
    RESTORE = "restore"
    FIRSTURN = "firsturn"
    YOUTURN = "youturn"
    DONE = "done"


@dataclass(frozen=True)
class ConsultantEvent:
    """One consultant instruction.

    ADVANCE carries (start, end).  FIRSTURN/YOUTURN reverse `step`;
    `forward` says whether one forward step (step-1 -> step) precedes the
    reversal (true for solution checkpoints, false when stage values were
    restored).  TAKESHOT/RESTORE carry the record.
    """

    tag: ActionTag
    start: int = -1
    end: int = -1
    step: int = -1
    record: object = None
    discard: bool = False
    forward: bool = False


@dataclass
class RevolveState:
    """Mutable cursor state mirroring the classic parameter names."""

    capo: int
    fine: int
    check: int
    snaps: int
    stepstogo: int = 0
    _events: list = field(default_factory=list, repr=False)
    _pos: int = 0


def events_from_schedule(schedule: Schedule) -> list:
    """Translate a schedule's action list into consultant events.

    An Advance immediately followed by the matching ReverseStep becomes
    ADVANCE (all but the last step) plus a turn; a bare ReverseStep (stages
    restored) becomes a turn with forward=False.  The first turn is
    FIRSTURN, later ones YOUTURN.
    """
    events = []
    acts = schedule.actions
    turned = False
    idx = 0
    while idx < len(acts):
        act = acts[idx]
        nxt = acts[idx + 1] if idx + 1 < len(acts) else None
        if isinstance(act, Store):
            events.append(ConsultantEvent(ActionTag.TAKESHOT, record=act.record))
        elif isinstance(act, Restore):
            events.append(
                ConsultantEvent(ActionTag.RESTORE, record=act.record, discard=act.discard)
            )
        elif isinstance(act, Advance):
            if isinstance(nxt, ReverseStep) and nxt.step == act.end:
                if act.end - 1 > act.start:
                    events.append(
                        ConsultantEvent(ActionTag.ADVANCE, start=act.start, end=act.end - 1)
                    )
                tag = ActionTag.YOUTURN if turned else ActionTag.FIRSTURN
                events.append(ConsultantEvent(tag, step=nxt.step, forward=True))
                turned = True
                idx += 1
            else:
                events.append(ConsultantEvent(ActionTag.ADVANCE, start=act.start, end=act.end))
        elif isinstance(act, ReverseStep):
            tag = ActionTag.YOUTURN if turned else ActionTag.FIRSTURN
            events.append(ConsultantEvent(tag, step=act.step, forward=False))
            turned = True
        idx += 1
    return events


def revolve_state(m: int, s: int, scheme: SchemeInfo = SchemeInfo(1)) -> RevolveState:
    """Fresh cursor over the optimal schedule for (m, s)."""
    schedule = revolve_schedule(m, s, scheme)
    return RevolveState(
        capo=0, fine=m, check=-1, snaps=s, _events=events_from_schedule(schedule)
    )


def revolve_next_action(state: RevolveState) -> ConsultantEvent:
    """Next consultant event; updates capo/fine/check along the way.

    Returns a DONE event once every step has been reversed.
    """
    if state._pos >= len(state._events):
        return ConsultantEvent(ActionTag.DONE)
    event = state._events[state._pos]
    state._pos += 1
    if event.tag is ActionTag.TAKESHOT:
        state.check += 1
    elif event.tag is ActionTag.RESTORE:
        state.capo = event.record.step_index
        if event.discard:
            state.check -= 1
    elif event.tag is ActionTag.ADVANCE:
        state.capo = event.end
        state.stepstogo = event.end - event.start
    elif event.tag in (ActionTag.FIRSTURN, ActionTag.YOUTURN):
        if event.forward:
            state.capo = event.step
        state.fine = event.step - 1
    return event
