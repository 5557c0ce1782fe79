"""Shared domain types for checkpoint schedules.

A schedule reverses ``m`` time steps of a multistage integrator under a
budget of checkpointing units.  One unit holds one solution vector (or,
equivalently, one stage vector).  Step indexing: the initial condition is
index 0 and each successful step increments the index, so step ``k`` maps
state ``k-1`` to state ``k``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Union


class SchedulingError(Exception):
    """Base class for scheduling errors."""


class DomainError(SchedulingError):
    """Raised on invalid scheduler arguments (m < 1, s < 1, ...)."""


class InfeasibleScheduleError(SchedulingError):
    """Raised when no schedule fits the unit budget."""


@dataclass(frozen=True)
class SchemeInfo:
    """Stage count and stiffly-accurate flag of the time integrator."""

    num_stages: int
    stiffly_accurate: bool = False

    def __post_init__(self):
        if self.num_stages < 1:
            raise DomainError(f"num_stages must be >= 1, got {self.num_stages}")


class CheckpointType(Enum):
    SOLUTION = "solution"
    STAGE_VALUES = "stage_values"
    SOLUTION_WITH_STAGES = "solution_with_stages"

    @property
    def has_solution(self) -> bool:
        return self in (CheckpointType.SOLUTION, CheckpointType.SOLUTION_WITH_STAGES)

    @property
    def has_stages(self) -> bool:
        return self in (CheckpointType.STAGE_VALUES, CheckpointType.SOLUTION_WITH_STAGES)


def unit_cost(kind: CheckpointType, scheme: SchemeInfo) -> int:
    """Units occupied by one checkpoint of the given kind.

    A solution costs one unit and a stage set costs one unit per stage.
    For a stiffly accurate scheme the last stage *is* the solution, so a
    combined checkpoint does not store it twice.
    """
    ell = scheme.num_stages
    if kind is CheckpointType.SOLUTION:
        return 1
    if kind is CheckpointType.STAGE_VALUES:
        return ell
    if kind is CheckpointType.SOLUTION_WITH_STAGES:
        return ell if scheme.stiffly_accurate else ell + 1
    raise DomainError(f"unknown checkpoint type {kind!r}")


@dataclass(frozen=True)
class CheckpointRecord:
    """One stored checkpoint: (step index, kind, units).

    For SOLUTION the index names the stored state.  For STAGE_VALUES and
    SOLUTION_WITH_STAGES the index names the step whose *ending* state it
    is, i.e. the stages of step ``step_index`` (state index-1 -> index),
    which requires ``step_index >= 1``.
    """

    step_index: int
    kind: CheckpointType
    units: int

    def __post_init__(self):
        if self.step_index < 0:
            raise DomainError(f"step_index must be >= 0, got {self.step_index}")
        if self.kind.has_stages and self.step_index < 1:
            raise DomainError("a stage-bearing record needs step_index >= 1")
        if self.units < 1:
            raise DomainError("units must be positive")


def make_record(step_index: int, kind: CheckpointType, scheme: SchemeInfo) -> CheckpointRecord:
    return CheckpointRecord(step_index, kind, unit_cost(kind, scheme))


@dataclass(frozen=True)
class Advance:
    """Advance the solution from state `start` to state `end` (end - start steps)."""

    start: int
    end: int

    def __post_init__(self):
        if not self.start < self.end:
            raise DomainError(f"Advance requires start < end, got {self.start} -> {self.end}")


@dataclass(frozen=True)
class Store:
    record: CheckpointRecord


@dataclass(frozen=True)
class Restore:
    """Copy a live record back into working memory; `discard` frees its units now."""

    record: CheckpointRecord
    discard: bool = False


@dataclass(frozen=True)
class ReverseStep:
    """Adjoint the step `step` (state step -> step-1).  Valid only while the
    stages of that step are live: just computed, or just restored from a
    stage-bearing record."""

    step: int


Action = Union[Advance, Store, Restore, ReverseStep]


@dataclass(frozen=True)
class Schedule:
    """An executable reversal plan for m steps under `budget_units` units."""

    m: int
    budget_units: int
    scheme: SchemeInfo
    actions: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))

    def store_steps(self, kind: CheckpointType | None = None) -> list:
        """Indices of Store actions, in order, optionally filtered by kind."""
        out = []
        for act in self.actions:
            if isinstance(act, Store) and (kind is None or act.record.kind is kind):
                out.append(act.record.step_index)
        return out

    def first_sweep_stores(self) -> list:
        """(step, kind) pairs stored before the first reversal."""
        out = []
        for act in self.actions:
            if isinstance(act, ReverseStep):
                break
            if isinstance(act, Store):
                out.append((act.record.step_index, act.record.kind))
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "budget_units": self.budget_units,
            "scheme": {
                "stages": self.scheme.num_stages,
                "stiffly_accurate": self.scheme.stiffly_accurate,
            },
            "actions": [_action_to_dict(a) for a in self.actions],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        scheme = SchemeInfo(data["scheme"]["stages"], data["scheme"]["stiffly_accurate"])
        actions = tuple(_action_from_dict(d, scheme) for d in data["actions"])
        return cls(data["m"], data["budget_units"], scheme, actions)

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        return cls.from_dict(json.loads(text))


def _action_to_dict(action: Action) -> dict:
    if isinstance(action, Advance):
        return {"op": "advance", "from": action.start, "to": action.end}
    if isinstance(action, Store):
        r = action.record
        return {"op": "store", "step": r.step_index, "kind": r.kind.value, "units": r.units}
    if isinstance(action, Restore):
        r = action.record
        return {
            "op": "restore",
            "step": r.step_index,
            "kind": r.kind.value,
            "units": r.units,
            "discard": action.discard,
        }
    if isinstance(action, ReverseStep):
        return {"op": "reverse", "step": action.step}
    raise DomainError(f"unknown action {action!r}")


def _action_from_dict(data: dict, scheme: SchemeInfo) -> Action:
    op = data["op"]
    if op == "advance":
        return Advance(data["from"], data["to"])
    if op == "store":
        return Store(CheckpointRecord(data["step"], CheckpointType(data["kind"]), data["units"]))
    if op == "restore":
        rec = CheckpointRecord(data["step"], CheckpointType(data["kind"]), data["units"])
        return Restore(rec, data["discard"])
    if op == "reverse":
        return ReverseStep(data["step"])
    raise DomainError(f"unknown action op {op!r}")


def validate_records(actions: Iterable[Action], scheme: SchemeInfo) -> None:
    """Check that every record's units match the scheme's unit costs."""
    for act in actions:
        rec = getattr(act, "record", None)
        if rec is not None and rec.units != unit_cost(rec.kind, scheme):
            raise DomainError(
                f"record {rec} has {rec.units} units, expected {unit_cost(rec.kind, scheme)}"
            )
