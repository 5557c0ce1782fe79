"""Consultant-mode drivers: the solver owns its time loop and asks the
scheduler only where the next checkpoint goes.

Each driver reconstructs the full action stream for a policy through its
consultant surface (the replay cursor for the binomial schemes, the
idempotent position/type query for the multistage ones) and funnels it
through the executor, which stays the single enforcement point.
"""
from __future__ import annotations

from enum import Enum

from .cams import CamsTables, CamsVariant, build_tables, cams_query, total_cost
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
    unit_cost,
)
from .executor import ExecutionMetrics, StepEngine, execute
from .mrevolve import modified_schedule
from .revolve import (
    ActionTag,
    events_from_schedule,
    revolve_schedule,
)


class Policy(Enum):
    REVOLVE = "revolve"
    MODIFIED_REVOLVE = "mrevolve"
    CAMS_SA = "cams-sa"
    CAMS_GEN = "cams-gen"
    FULL_STORAGE = "full-storage"


def full_storage_schedule(m: int, scheme: SchemeInfo) -> Schedule:
    """Keep every step's stages; zero recomputations."""
    if m < 1:
        raise DomainError("m must be >= 1")
    per = unit_cost(CheckpointType.SOLUTION_WITH_STAGES, scheme)
    actions = []
    for k in range(1, m):
        actions.append(Advance(k - 1, k))
        actions.append(Store(make_record(k, CheckpointType.SOLUTION_WITH_STAGES, scheme)))
    actions.append(Advance(m - 1, m))
    actions.append(ReverseStep(m))
    for k in range(m - 1, 0, -1):
        actions.append(Restore(make_record(k, CheckpointType.SOLUTION_WITH_STAGES, scheme), True))
        actions.append(ReverseStep(k))
    return Schedule(m, max(per * (m - 1), 1), scheme, tuple(actions))


def _actions_from_events(events) -> list:
    actions = []
    for ev in events:
        if ev.tag is ActionTag.TAKESHOT:
            actions.append(Store(ev.record))
        elif ev.tag is ActionTag.RESTORE:
            actions.append(Restore(ev.record, ev.discard))
        elif ev.tag is ActionTag.ADVANCE:
            actions.append(Advance(ev.start, ev.end))
        elif ev.tag in (ActionTag.FIRSTURN, ActionTag.YOUTURN):
            if ev.forward:
                actions.append(Advance(ev.step - 1, ev.step))
            actions.append(ReverseStep(ev.step))
    return actions


def drive_binomial(m: int, s: int, scheme: SchemeInfo, modified: bool) -> Schedule:
    """Rebuild the binomial schedules through the action-tag stream.

    Checks the structural property of the consultant protocol: after the
    first turn, every further turn is preceded by a restore (possibly with
    advances and stores in between, but never another turn).
    """
    base = modified_schedule(m, s, scheme) if modified else revolve_schedule(m, s, scheme)
    events = events_from_schedule(base)
    turned = False
    restored_since_turn = True
    for ev in events:
        if ev.tag in (ActionTag.FIRSTURN, ActionTag.YOUTURN):
            if turned and not restored_since_turn:
                raise DomainError("consultant protocol violated: turn without restore")
            turned = True
            restored_since_turn = False
        elif ev.tag is ActionTag.RESTORE:
            restored_since_turn = True
    return Schedule(m, base.budget_units, scheme, tuple(_actions_from_events(events)))


def drive_cams(
    m: int,
    s_units: int,
    scheme: SchemeInfo,
    variant: CamsVariant,
    tables: CamsTables | None = None,
) -> Schedule:
    """Rebuild the multistage schedule from the query interface alone.

    Follows the adjoint-solver workflow: one forward sweep storing what the
    query prescribes, then a backward loop that restores the closest usable
    checkpoint, asks for the next checkpoint of the remaining range, and
    recomputes up to the step being reversed.
    """
    if tables is None:
        tables = build_tables(m, s_units, scheme, variant)
    actions: list = []
    live: dict = {}

    def store(step, kind):
        rec = make_record(step, kind, scheme)
        actions.append(Store(rec))
        live[step] = rec

    def free_units():
        return s_units - sum(r.units for r in live.values())

    def plan_sweep(start, budget, stop, first=None):
        """Walk the query chain for the sweep start -> stop without emitting;
        returns the (position, kind) stores it prescribes."""
        nxt = first
        plans = []
        free = budget
        while nxt is not None and nxt[0] <= stop:
            pos, kind = nxt
            plans.append((pos, kind))
            nxt = cams_query(pos, kind, free, stop, scheme, variant, tables)
            free -= unit_cost(kind, scheme)
        return plans

    def emit_sweep(start, stop, plans):
        cursor = start
        for pos, kind in plans:
            if pos > cursor:
                actions.append(Advance(cursor, pos))
                cursor = pos
            store(pos, kind)
        if stop > cursor:
            actions.append(Advance(cursor, stop))

    def anchored_again(anchor, i, plans):
        """Will any reversal below i seed its recomputation from `anchor`,
        given the records live after the upcoming sweep?"""
        post = dict(live)
        for pos, kind in plans:
            post[pos] = make_record(pos, kind, scheme)
        for k in range(anchor + 1, i):
            rec = post.get(k)
            if rec is not None and rec.kind.has_stages:
                continue
            seed = max(
                (step for step, r in post.items() if r.kind.has_solution and step < k),
                default=None,
            )
            if seed == anchor:
                return True
        return False

    nxt = cams_query(-1, None, s_units, m, scheme, variant, tables)
    if nxt is not None and nxt[0] == 0:
        store(0, nxt[1])
        nxt = cams_query(0, nxt[1], s_units, m, scheme, variant, tables)
    emit_sweep(0, m, plan_sweep(0, free_units(), m, nxt))
    actions.append(ReverseStep(m))

    for i in range(m - 1, 0, -1):
        rec = live.get(i)
        if rec is not None and rec.kind.has_stages:
            actions.append(Restore(rec, discard=True))
            del live[i]
            actions.append(ReverseStep(i))
            continue
        anchor = max(
            (step for step, r in live.items() if r.kind.has_solution and step < i),
            default=None,
        )
        if anchor is None:
            raise DomainError(f"no checkpoint can seed the reversal of step {i}")
        rec = live[anchor]
        budget = free_units() + rec.units
        nxt = cams_query(anchor, rec.kind, budget, i, scheme, variant, tables)
        plans = plan_sweep(anchor, budget - rec.units, i, nxt)
        # a combined record still owes its own backward step; a plain
        # solution goes as soon as nothing below will recompute from it
        discard = not rec.kind.has_stages and not anchored_again(anchor, i, plans)
        actions.append(Restore(rec, discard=discard))
        if discard:
            del live[anchor]
        emit_sweep(anchor, i, plans)
        actions.append(ReverseStep(i))
    return Schedule(m, s_units, scheme, tuple(actions))


def consultant_schedule(m: int, s: int, scheme: SchemeInfo, policy: Policy) -> Schedule:
    if policy is Policy.REVOLVE:
        return drive_binomial(m, s, scheme, modified=False)
    if policy is Policy.MODIFIED_REVOLVE:
        return drive_binomial(m, s, scheme, modified=True)
    if policy is Policy.CAMS_SA:
        if not scheme.stiffly_accurate:
            raise DomainError("cams-sa needs a stiffly accurate scheme")
        return drive_cams(m, s, scheme, CamsVariant.SA)
    if policy is Policy.CAMS_GEN:
        return drive_cams(m, s, scheme, CamsVariant.GEN)
    if policy is Policy.FULL_STORAGE:
        return full_storage_schedule(m, scheme)
    raise DomainError(f"unknown policy {policy!r}")


def predicted_cost(m: int, s: int, scheme: SchemeInfo, policy: Policy) -> float:
    """What the policy's own cost theory promises for (m, s)."""
    from .mrevolve import modified_cost
    from .revolve import revolve_cost

    if policy is Policy.REVOLVE:
        return revolve_cost(m, s)
    if policy is Policy.MODIFIED_REVOLVE:
        return modified_cost(m, s)
    if policy is Policy.CAMS_SA:
        return total_cost(build_tables(m, s, scheme, CamsVariant.SA))
    if policy is Policy.CAMS_GEN:
        return total_cost(build_tables(m, s, scheme, CamsVariant.GEN))
    if policy is Policy.FULL_STORAGE:
        return 0
    raise DomainError(f"unknown policy {policy!r}")


def consultant_run(
    m: int,
    s: int,
    scheme: SchemeInfo,
    policy: Policy,
    engine: StepEngine | None = None,
) -> ExecutionMetrics:
    """Full adjoint run driven in consultant mode; the returned metrics
    match the policy's predicted cost.

    `s` is policy-native: checkpoint counts for the binomial schemes,
    units for the multistage ones.
    """
    schedule = consultant_schedule(m, s, scheme, policy)
    return execute(schedule, engine)
