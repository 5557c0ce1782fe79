"""Exhaustive search for the minimal recomputation count on small instances.

Ground truth for every scheduler: enumerates all valid reversal schedules
under the unit budget and the data-availability rules (advance needs a
live solution, a backward step needs the stages of that step) and returns
the exact minimum of forward steps beyond the first sweep.
"""
from __future__ import annotations

import math
from typing import FrozenSet, Iterable, Tuple

from .core import CheckpointType, DomainError, SchemeInfo, unit_cost

INFEASIBLE = math.inf

MAX_STEPS = 14
MAX_UNITS = 8
MAX_STAGES = 3

_Record = Tuple[int, CheckpointType]
_Records = FrozenSet[_Record]


class InstanceTooLargeError(DomainError):
    pass


class BruteForceSearch:
    """Memoized search shared across step counts for one (budget, scheme, kinds).

    States: ("seek", k, records) is about to reverse step k with nothing
    live in working memory; ("walk", pos, k, records) is mid-recomputation
    at state pos heading for step k.  Records are (index, kind) pairs; a
    record is dropped as soon as no remaining reversal can use it.
    """

    def __init__(self, s_units: int, scheme: SchemeInfo, allowed_kinds: Iterable[CheckpointType]):
        if s_units > MAX_UNITS or scheme.num_stages > MAX_STAGES:
            raise InstanceTooLargeError(
                f"limits are s_units <= {MAX_UNITS}, stages <= {MAX_STAGES}"
            )
        self.s_units = s_units
        self.scheme = scheme
        kinds = set(allowed_kinds)
        if scheme.stiffly_accurate:
            # stages include the solution, so plain stage values are the
            # same record as a combined checkpoint
            if CheckpointType.STAGE_VALUES in kinds:
                kinds.discard(CheckpointType.STAGE_VALUES)
                kinds.add(CheckpointType.SOLUTION_WITH_STAGES)
        self.kinds = tuple(sorted(kinds, key=lambda k: k.value))
        self._units = {k: unit_cost(k, scheme) for k in self.kinds}
        self._memo: dict = {}

    def solve(self, m: int) -> float:
        """Minimal recomputations to reverse m steps, or inf if infeasible."""
        if m > MAX_STEPS:
            raise InstanceTooLargeError(f"limits are m <= {MAX_STEPS}")
        if m < 1:
            raise DomainError("m must be >= 1")
        return self._first_sweep(0, m, frozenset())

    def _first_sweep(self, pos: int, m: int, records: _Records) -> float:
        """Walk the free initial sweep 0..m, choosing stores along the way."""
        key = ("first", pos, m, records)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if pos == m:
            result = self._seek(m - 1, self._prune(records, m - 1))
        else:
            best = self._first_sweep(pos + 1, m, records)
            for stored in self._store_options(pos, m, records):
                best = min(best, self._first_sweep(pos + 1, m, stored))
            result = best
        self._memo[key] = result
        return result

    def _seek(self, k: int, records: _Records) -> float:
        """Reverse steps k..1 starting with nothing live in working memory."""
        if k == 0:
            return 0
        key = ("seek", k, records)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        best = INFEASIBLE
        for idx, kind in records:
            if kind.has_stages and idx == k:
                best = min(best, self._seek(k - 1, self._prune(records, k - 1)))
            if kind.has_solution and idx < k:
                best = min(best, self._walk(idx, k, records))
        self._memo[key] = best
        return best

    def _walk(self, pos: int, k: int, records: _Records) -> float:
        """Recompute from state pos toward step k, one store choice per step."""
        if pos == k:
            return self._seek(k - 1, self._prune(records, k - 1))
        key = ("walk", pos, k, records)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        arrive = pos + 1
        best = self._walk(arrive, k, records)
        for stored in self._store_options(arrive, k, records):
            best = min(best, self._walk(arrive, k, stored))
        result = 1 + best
        self._memo[key] = result
        return result

    def _store_options(self, pos: int, k: int, records: _Records):
        """Useful, budget-feasible stores at state pos while heading for step k."""
        used = sum(self._units[kind] for _, kind in records)
        out = []
        for kind in self.kinds:
            if kind.has_stages and pos < 1:
                continue
            # usefulness: a solution can seed recomputation only for
            # reversals strictly beyond it, stages only reverse their own
            # step; step k itself is already covered by the current sweep
            if kind is CheckpointType.SOLUTION and pos > k - 2:
                continue
            if kind.has_stages and pos > k - 1:
                continue
            if (pos, kind) in records:
                continue
            if used + self._units[kind] > self.s_units:
                continue
            out.append(records | {(pos, kind)})
        return out

    def _prune(self, records: _Records, k: int) -> _Records:
        """Drop records that no remaining reversal (steps k..1) can use."""
        keep = []
        for idx, kind in records:
            if kind.has_solution and idx <= k - 1:
                keep.append((idx, kind))
            elif kind.has_stages and idx <= k:
                keep.append((idx, kind))
        return frozenset(keep)


def brute_force(
    m: int,
    s_units: int,
    scheme: SchemeInfo,
    allowed_kinds: Iterable[CheckpointType],
) -> float:
    """Exact minimum of recomputations over all valid schedules.

    Enforced limits: m <= 14, s_units <= 8, stages <= 3.  Returns inf when
    no schedule fits the budget.
    """
    return BruteForceSearch(s_units, scheme, allowed_kinds).solve(m)
