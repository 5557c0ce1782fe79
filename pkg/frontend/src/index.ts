/**
 * Handle-based two-call consultant API in the style of a C binding.
 *
 * Checkpoint kinds cross the boundary as small integers:
 *   -1 none / no further checkpoint
 *    0 solution
 *    1 stage values
 *    2 solution with stages
 *
 * `offline_cams_create` runs the dynamic programs once and returns an
 * opaque integer handle; `offline_cams` is a pure query over the stored
 * tables (idempotent: identical arguments give identical answers);
 * `offline_cams_destroy` frees the handle.
 */
import {
  CamsTables,
  KIND_NONE,
  KIND_SOLUTION,
  KIND_SOLUTION_WITH_STAGES,
  KIND_STAGE_VALUES,
  Scheme,
  buildGenTables,
  buildSaTables,
  hasSolution,
  hasStages,
  nextCheckpoint,
  totalCost,
  unitCost,
} from "./tables.js";

export {
  KIND_NONE,
  KIND_SOLUTION,
  KIND_STAGE_VALUES,
  KIND_SOLUTION_WITH_STAGES,
  totalCost,
  unitCost,
} from "./tables.js";
export type { CamsTables, Scheme } from "./tables.js";

interface HandleState {
  tables: CamsTables;
}

const registry = new Map<number, HandleState>();
let nextHandle = 1;

export function offline_cams_create(
  m: number,
  s: number,
  l: number,
  stifflyaccurate: number,
): number {
  if (!Number.isInteger(m) || m < 1) throw new Error(`m must be a positive integer, got ${m}`);
  if (!Number.isInteger(s) || s < 1) throw new Error(`s must be a positive integer, got ${s}`);
  if (!Number.isInteger(l) || l < 1) throw new Error(`l must be a positive integer, got ${l}`);
  if (stifflyaccurate !== 0 && stifflyaccurate !== 1) {
    throw new Error(`stifflyaccurate must be 0 or 1, got ${stifflyaccurate}`);
  }
  const scheme: Scheme = { stages: l, stifflyAccurate: stifflyaccurate === 1 };
  const tables = scheme.stifflyAccurate
    ? buildSaTables(m, s, scheme)
    : buildGenTables(m, s, scheme);
  if (!Number.isFinite(totalCost(tables))) {
    throw new Error(`reversing ${m} steps with ${s} units is infeasible`);
  }
  const handle = nextHandle++;
  registry.set(handle, { tables });
  return handle;
}

function stateOf(handle: number): HandleState {
  const state = registry.get(handle);
  if (state === undefined) throw new Error(`invalid handle ${handle}`);
  return state;
}

/**
 * Next checkpoint after `lastStep` (kind code `lastKind`), with `s` units
 * available to the remaining subproblem (counting the anchor's own) and
 * `m` the last step the current reversal still covers.  Returns
 * [-1, -1] when nothing more needs to be stored before step m.
 */
export function offline_cams(
  handle: number,
  lastStep: number,
  lastKind: number,
  s: number,
  m: number,
): [number, number] {
  const { tables } = stateOf(handle);
  const out = nextCheckpoint(tables, lastStep, lastKind, s, m);
  return out === null ? [-1, -1] : out;
}

export function offline_cams_destroy(handle: number): void {
  if (!registry.delete(handle)) throw new Error(`invalid handle ${handle}`);
}

export function offline_cams_total(handle: number): number {
  return totalCost(stateOf(handle).tables);
}

interface LiveRecord {
  step: number;
  kind: number;
  units: number;
}

/**
 * Reconstruct the full store sequence of the optimal schedule by driving
 * the adjoint workflow against the query: one forward sweep, then a
 * backward loop that restores the closest usable record, asks for the
 * next checkpoint of the remaining range, and recomputes up to the step
 * being reversed.  Returns [step, kind] pairs in store order.
 */
export function walk_store_sequence(handle: number): Array<[number, number]> {
  const { tables } = stateOf(handle);
  const scheme = tables.scheme;
  const m = tables.m;
  const sUnits = tables.s;
  const stores: Array<[number, number]> = [];
  const live = new Map<number, LiveRecord>();

  const freeUnits = () => {
    let used = 0;
    for (const rec of live.values()) used += rec.units;
    return sUnits - used;
  };
  const store = (step: number, kind: number) => {
    stores.push([step, kind]);
    live.set(step, { step, kind, units: unitCost(kind, scheme) });
  };
  const planSweep = (
    budget: number,
    stop: number,
    first: [number, number] | null,
  ): Array<[number, number]> => {
    const plans: Array<[number, number]> = [];
    let nxt = first;
    let free = budget;
    while (nxt !== null && nxt[0] <= stop) {
      plans.push(nxt);
      const [pos, kind] = nxt;
      const out = offline_cams(handle, pos, kind, free, stop);
      nxt = out[0] === -1 ? null : out;
      free -= unitCost(kind, scheme);
    }
    return plans;
  };
  const anchoredAgain = (anchor: number, i: number, plans: Array<[number, number]>) => {
    const post = new Map(live);
    for (const [pos, kind] of plans) {
      post.set(pos, { step: pos, kind, units: unitCost(kind, scheme) });
    }
    for (let k = anchor + 1; k < i; k++) {
      const rec = post.get(k);
      if (rec !== undefined && hasStages(rec.kind)) continue;
      let seed = -1;
      for (const r of post.values()) {
        if (hasSolution(r.kind) && r.step < k && r.step > seed) seed = r.step;
      }
      if (seed === anchor) return true;
    }
    return false;
  };

  let first = offline_cams(handle, -1, KIND_NONE, sUnits, m);
  let nxt: [number, number] | null = first[0] === -1 ? null : first;
  if (nxt !== null && nxt[0] === 0) {
    store(0, nxt[1]);
    const out = offline_cams(handle, 0, nxt[1], sUnits, m);
    nxt = out[0] === -1 ? null : out;
  }
  for (const [pos, kind] of planSweep(freeUnits(), m, nxt)) {
    store(pos, kind);
  }

  for (let i = m - 1; i >= 1; i--) {
    const direct = live.get(i);
    if (direct !== undefined && hasStages(direct.kind)) {
      live.delete(i);
      continue;
    }
    let anchor = -1;
    for (const r of live.values()) {
      if (hasSolution(r.kind) && r.step < i && r.step > anchor) anchor = r.step;
    }
    if (anchor === -1) throw new Error(`no checkpoint can seed the reversal of step ${i}`);
    const rec = live.get(anchor)!;
    const budget = freeUnits() + rec.units;
    const out = offline_cams(handle, anchor, rec.kind, budget, i);
    const plans = planSweep(budget - rec.units, i, out[0] === -1 ? null : out);
    if (!hasStages(rec.kind) && !anchoredAgain(anchor, i, plans)) {
      live.delete(anchor);
    }
    for (const [pos, kind] of plans) store(pos, kind);
  }
  return stores;
}
