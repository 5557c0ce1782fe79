"""Deterministic replay of schedules against a pluggable step engine.

The executor is the single enforcement point for the data-availability
rules: a step can be reversed only while its stages are live (just
computed by an advance, or just restored from a stage-bearing record),
an advance must start from a live solution, and the sum of stored units
never exceeds the budget.  The working memory of the most recent step
(its solution and stages) is free and does not count against the budget.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import (
    Advance,
    CheckpointRecord,
    DomainError,
    Restore,
    ReverseStep,
    Schedule,
    Store,
    validate_records,
)


class ValidationError(Exception):
    """A schedule action violated a replay rule."""

    def __init__(self, action_index: int, rule: str):
        self.action_index = action_index
        self.rule = rule
        super().__init__(f"action {action_index}: {rule}")


@dataclass(frozen=True)
class ExecutionMetrics:
    recomputations: int
    first_sweep_steps: int
    stores: int
    restores: int
    peak_units: int

    @property
    def forward_steps(self) -> int:
        return self.recomputations + self.first_sweep_steps


class StepEngine:
    """Callbacks driven by the executor.  Override what you need."""

    def forward_step(self, index: int) -> None:
        """Advance the state from index-1 to index."""

    def reverse_step(self, index: int) -> None:
        """Adjoint the step index -> index-1."""

    def store(self, record: CheckpointRecord) -> None:
        pass

    def restore(self, record: CheckpointRecord) -> None:
        pass

    def discard(self, record: CheckpointRecord) -> None:
        pass


class CountingEngine(StepEngine):
    """Stateless engine that records the call trace."""

    def __init__(self):
        self.trace: list = []

    def forward_step(self, index):
        self.trace.append({"call": "forward", "index": index, "kind": None})

    def reverse_step(self, index):
        self.trace.append({"call": "reverse", "index": index, "kind": None})

    def store(self, record):
        self.trace.append({"call": "store", "index": record.step_index, "kind": record.kind.value})

    def restore(self, record):
        self.trace.append(
            {"call": "restore", "index": record.step_index, "kind": record.kind.value}
        )

    def discard(self, record):
        self.trace.append(
            {"call": "discard", "index": record.step_index, "kind": record.kind.value}
        )

    def trace_json(self) -> str:
        return json.dumps(self.trace)


@dataclass
class _ReplayState:
    solution_at: int | None = 0
    stages_at: int | None = None
    live: dict = field(default_factory=dict)
    used_units: int = 0
    next_reverse: int = -1


def execute(schedule: Schedule, engine: StepEngine | None = None) -> ExecutionMetrics:
    """Replay a schedule, enforcing all validity rules, and return metrics.

    Raises ValidationError on budget overflow, reversing without live
    stages, advancing from a dead state, restoring a non-live record,
    duplicate stores, or out-of-order reversal.
    """
    if engine is None:
        engine = StepEngine()
    try:
        validate_records(schedule.actions, schedule.scheme)
    except DomainError as exc:
        raise ValidationError(-1, str(exc))
    st = _ReplayState(next_reverse=schedule.m)
    forward_total = 0
    stores = 0
    restores = 0
    peak = 0
    for idx, act in enumerate(schedule.actions):
        if isinstance(act, Advance):
            if st.solution_at != act.start:
                raise ValidationError(
                    idx, f"advance from {act.start} but live solution is {st.solution_at}"
                )
            if act.end > schedule.m:
                raise ValidationError(idx, f"advance beyond final step {schedule.m}")
            for k in range(act.start + 1, act.end + 1):
                engine.forward_step(k)
            forward_total += act.end - act.start
            st.solution_at = act.end
            st.stages_at = act.end
        elif isinstance(act, Store):
            rec = act.record
            if rec in st.live:
                raise ValidationError(idx, f"duplicate store of {rec}")
            if rec.kind.has_solution and st.solution_at != rec.step_index:
                raise ValidationError(
                    idx, f"store of solution {rec.step_index} but cursor at {st.solution_at}"
                )
            if rec.kind.has_stages and st.stages_at != rec.step_index:
                raise ValidationError(
                    idx, f"store of stages {rec.step_index} but live stages at {st.stages_at}"
                )
            if st.used_units + rec.units > schedule.budget_units:
                raise ValidationError(
                    idx,
                    f"budget overflow: {st.used_units}+{rec.units} > {schedule.budget_units}",
                )
            st.live[rec] = True
            st.used_units += rec.units
            peak = max(peak, st.used_units)
            stores += 1
            engine.store(rec)
        elif isinstance(act, Restore):
            rec = act.record
            if rec not in st.live:
                raise ValidationError(idx, f"restore of non-live record {rec}")
            if rec.kind.has_solution:
                st.solution_at = rec.step_index
                if not rec.kind.has_stages:
                    st.stages_at = None
            if rec.kind.has_stages:
                st.stages_at = rec.step_index
                if not rec.kind.has_solution:
                    st.solution_at = None
            restores += 1
            engine.restore(rec)
            if act.discard:
                del st.live[rec]
                st.used_units -= rec.units
                engine.discard(rec)
        elif isinstance(act, ReverseStep):
            if act.step != st.next_reverse:
                raise ValidationError(
                    idx, f"reverse of step {act.step}, expected {st.next_reverse}"
                )
            if st.stages_at != act.step:
                raise ValidationError(
                    idx, f"reverse of step {act.step} but live stages at {st.stages_at}"
                )
            engine.reverse_step(act.step)
            st.next_reverse -= 1
            st.stages_at = None
            st.solution_at = None
        else:
            raise ValidationError(idx, f"unknown action {act!r}")
    if st.next_reverse != 0:
        raise ValidationError(
            len(schedule.actions), f"schedule ended with step {st.next_reverse} unreversed"
        )
    return ExecutionMetrics(
        recomputations=forward_total - schedule.m,
        first_sweep_steps=schedule.m,
        stores=stores,
        restores=restores,
        peak_units=peak,
    )
