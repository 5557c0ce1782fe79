"""Shifted-checkpoint variant of binomial checkpointing.

Every checkpoint the classical scheme would place at solution index i
becomes a combined record (solution plus stage values) at index i+1,
which lets each backward step start directly from restored stages and
saves exactly one forward step per reversed step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
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
    unit_cost,
)
from .revolve import RevolveTables, repetition_number, revolve_cost

INFEASIBLE = math.inf


def modified_cost(m: int, s: int) -> int:
    """Minimal recomputations with s combined (solution + stages) checkpoints."""
    t = repetition_number(m, s)
    return (t - 1) * m - math.comb(s + t, t - 1) + 1


def modified_schedule(m: int, s: int, scheme: SchemeInfo) -> Schedule:
    """Optimal combined-checkpoint schedule for m steps and s checkpoints.

    Store indices are the classical ones shifted by +1; each record is
    stored right after the step that produced its stages completes.
    Budget is s combined checkpoints, i.e. s * unit_cost(combined) units.
    """
    if m < 1 or s < 1:
        raise DomainError(f"need m >= 1 and s >= 1, got m={m}, s={s}")
    budget = s * unit_cost(CheckpointType.SOLUTION_WITH_STAGES, scheme)
    if m == 1:
        return Schedule(1, budget, scheme, (Advance(0, 1), ReverseStep(1)))
    tables = RevolveTables(m, s)
    actions: list = [
        Advance(0, 1),
        Store(make_record(1, CheckpointType.SOLUTION_WITH_STAGES, scheme)),
    ]
    _emit_combined_range(actions, tables, scheme, 0, m, s, need_restore=False)
    return Schedule(m, budget, scheme, tuple(actions))


def _emit_combined_range(actions, tables, scheme, a, i, j, need_restore):
    """Reverse steps a+1 .. a+i given the combined record at a+1 stored.

    Step a+1 itself is reversed straight from the record's stages at the
    end of the range; that restore discards the record.
    """
    rec = make_record(a + 1, CheckpointType.SOLUTION_WITH_STAGES, scheme)
    if need_restore:
        actions.append(Restore(rec, discard=(i == 1)))
    if i == 1:
        actions.append(ReverseStep(a + 1))
        return
    mt = tables.split(i, j)
    if mt == 0:
        raise DomainError(f"no feasible split for range of {i} steps with {j} checkpoints")
    if i - mt == 1:
        actions.append(Advance(a + 1, a + i))
        actions.append(ReverseStep(a + i))
    else:
        actions.append(Advance(a + 1, a + mt + 1))
        actions.append(Store(make_record(a + mt + 1, CheckpointType.SOLUTION_WITH_STAGES, scheme)))
        _emit_combined_range(actions, tables, scheme, a + mt, i - mt, j - 1, need_restore=False)
    _emit_combined_range(actions, tables, scheme, a, mt, j, need_restore=True)


class Strategy(Enum):
    CLASSICAL = "classical"
    MODIFIED = "modified"


@dataclass(frozen=True)
class StrategyChoice:
    strategy: Strategy
    classical_checkpoints: int
    modified_checkpoints: int
    classical_cost: float
    modified_cost: float


def select_strategy(m: int, total_units: int, scheme: SchemeInfo) -> StrategyChoice:
    """Pick classical vs combined checkpointing for a fixed unit budget.

    Classical fits one solution per unit; the combined variant fits
    floor(total_units / unit_cost(combined)) checkpoints.  Ties resolve to
    classical: once it has caught up, its advantage only grows with m.
    """
    if total_units < 1:
        raise DomainError("total_units must be >= 1")
    s_classic = total_units
    s_mod = total_units // unit_cost(CheckpointType.SOLUTION_WITH_STAGES, scheme)
    cost_classic = revolve_cost(m, s_classic)
    cost_mod = modified_cost(m, s_mod) if s_mod >= 1 else INFEASIBLE
    strategy = Strategy.CLASSICAL if cost_classic <= cost_mod else Strategy.MODIFIED
    return StrategyChoice(strategy, s_classic, s_mod, cost_classic, cost_mod)


def crossover_steps(total_units: int, extra_stages: int, max_steps: int = 1_000_000) -> int:
    """Smallest step count at which classical checkpointing catches up with
    the combined scheme under the same unit budget.

    `extra_stages` counts the stage vectors a combined checkpoint stores
    beyond the one that coincides with a plain solution checkpoint, i.e. a
    combined checkpoint of a general (extra_stages + 1)-stage scheme and a
    cost of extra_stages + 2 units.
    """
    per_checkpoint = extra_stages + 2
    if total_units < per_checkpoint:
        raise DomainError("budget too small for a single combined checkpoint")
    s_classic = total_units
    s_mod = total_units // per_checkpoint
    # m = 1 is free for both schemes; start where the costs can differ.
    for m in range(2, max_steps + 1):
        if revolve_cost(m, s_classic) <= modified_cost(m, s_mod):
            return m
    raise DomainError(f"no crossover found below {max_steps} steps")
