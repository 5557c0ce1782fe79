/**
 * Cost tables for optimal checkpoint placement with multistage time
 * steppers, plus the argmin path data the consultant query reads.
 *
 * Table convention: `tableIs[i][j]` is the minimal number of extra forward
 * steps to reverse i steps given the subrange's initial solution held in
 * memory, where j counts the units available to the subrange including the
 * one holding that seed.  `tableSv[i][j]` (general variant) is the same
 * with the stage values of the subrange's first step held instead, j
 * including those stage units.
 */

export const INFEASIBLE = Number.POSITIVE_INFINITY;

/** Checkpoint kind codes used across the API boundary. */
export const KIND_NONE = -1;
export const KIND_SOLUTION = 0;
export const KIND_STAGE_VALUES = 1;
export const KIND_SOLUTION_WITH_STAGES = 2;

export type Kind =
  | typeof KIND_SOLUTION
  | typeof KIND_STAGE_VALUES
  | typeof KIND_SOLUTION_WITH_STAGES;

export interface Scheme {
  stages: number;
  stifflyAccurate: boolean;
}

export function unitCost(kind: number, scheme: Scheme): number {
  if (kind === KIND_SOLUTION) return 1;
  if (kind === KIND_STAGE_VALUES) return scheme.stages;
  if (kind === KIND_SOLUTION_WITH_STAGES)
    return scheme.stifflyAccurate ? scheme.stages : scheme.stages + 1;
  throw new Error(`unknown checkpoint kind ${kind}`);
}

export function hasSolution(kind: number): boolean {
  return kind === KIND_SOLUTION || kind === KIND_SOLUTION_WITH_STAGES;
}

export function hasStages(kind: number): boolean {
  return kind === KIND_STAGE_VALUES || kind === KIND_SOLUTION_WITH_STAGES;
}

export interface CamsTables {
  m: number;
  s: number;
  scheme: Scheme;
  variant: "cams-sa" | "cams-gen";
  tableIs: number[][];
  splitIs: number[][];
  caseIs: number[][];
  tableSv: number[][] | null;
  branchSv: number[][] | null;
}

function grid(m: number, s: number, fill: number): number[][] {
  return Array.from({ length: m + 1 }, () => new Array<number>(s + 1).fill(fill));
}

/** Stiffly accurate variant: stage records double as recomputation seeds.
 * For i >= 2, j >= 1:
 *   case 1 (solution after mt steps):  mt   + P(mt, j)   + P(i-mt, j-1)
 *   case 2 (stages of step mt):        mt-1 + P(mt-1, j) + P(i-mt, j-ell), j-ell >= 1
 * Ties prefer case 2, then the smallest split. */
export function buildSaTables(m: number, s: number, scheme: Scheme): CamsTables {
  if (!scheme.stifflyAccurate) throw new Error("SA tables need a stiffly accurate scheme");
  checkDims(m, s);
  const ell = scheme.stages;
  const p = grid(m, s, INFEASIBLE);
  const split = grid(m, s, 0);
  const kase = grid(m, s, 0);
  for (let j = 0; j <= s; j++) {
    p[0][j] = 0;
    if (m >= 1) p[1][j] = 0;
  }
  for (let i = 2; i <= m; i++) {
    for (let j = 1; j <= s; j++) {
      let best1 = INFEASIBLE;
      let split1 = 0;
      for (let mt = 1; mt < i; mt++) {
        const v = mt + p[mt][j] + p[i - mt][j - 1];
        if (v < best1) {
          best1 = v;
          split1 = mt;
        }
      }
      let best2 = INFEASIBLE;
      let split2 = 0;
      if (j - ell >= 1) {
        for (let mt = 1; mt < i; mt++) {
          const v = mt - 1 + p[mt - 1][j] + p[i - mt][j - ell];
          if (v < best2) {
            best2 = v;
            split2 = mt;
          }
        }
      }
      if (best2 <= best1 && best2 < INFEASIBLE) {
        p[i][j] = best2;
        split[i][j] = split2;
        kase[i][j] = 2;
      } else if (best1 < INFEASIBLE) {
        p[i][j] = best1;
        split[i][j] = split1;
        kase[i][j] = 1;
      }
    }
  }
  return {
    m,
    s,
    scheme,
    variant: "cams-sa",
    tableIs: p,
    splitIs: split,
    caseIs: kase,
    tableSv: null,
    branchSv: null,
  };
}

/** General variant: double dynamic program over the solution-seeded and
 * stage-seeded tables.  Stage records only reverse their own step. */
export function buildGenTables(m: number, s: number, scheme: Scheme): CamsTables {
  checkDims(m, s);
  const ell = scheme.stages;
  const fuse = unitCost(KIND_SOLUTION_WITH_STAGES, scheme) - 1;
  const pIs = grid(m, s, INFEASIBLE);
  const pSv = grid(m, s, INFEASIBLE);
  const split = grid(m, s, 0);
  const kase = grid(m, s, 0);
  const branch = grid(m, s, 0);
  for (let j = 0; j <= s; j++) {
    pIs[0][j] = 0;
    pSv[0][j] = 0;
    if (m >= 1) {
      pIs[1][j] = 0;
      pSv[1][j] = 0;
    }
  }
  for (let i = 2; i <= m; i++) {
    for (let j = ell; j <= s; j++) {
      const a = j - fuse >= 0 ? pIs[i - 1][j - fuse] : INFEASIBLE;
      const b = pSv[i - 1][j - ell];
      // stage-chain branch preferred on ties (a tied solution child could
      // itself open with a stage chain that never reads it)
      if (b <= a && b < INFEASIBLE) {
        pSv[i][j] = b;
        branch[i][j] = 2;
      } else if (a < INFEASIBLE) {
        pSv[i][j] = a;
        branch[i][j] = 1;
      }
    }
    for (let j = 1; j <= s; j++) {
      let best1 = INFEASIBLE;
      let split1 = 0;
      for (let mt = 1; mt < i; mt++) {
        const v = mt + pIs[mt][j] + pIs[i - mt][j - 1];
        if (v < best1) {
          best1 = v;
          split1 = mt;
        }
      }
      let best2 = INFEASIBLE;
      let split2 = 0;
      for (let mt = 1; mt < i; mt++) {
        const v = mt - 1 + pIs[mt - 1][j] + pSv[i - mt + 1][j - 1];
        if (v < best2) {
          best2 = v;
          split2 = mt;
        }
      }
      // case 2 preferred on ties (keeps every stored solution on a restore path)
      if (best2 <= best1 && best2 < INFEASIBLE) {
        pIs[i][j] = best2;
        split[i][j] = split2;
        kase[i][j] = 2;
      } else if (best1 < INFEASIBLE) {
        pIs[i][j] = best1;
        split[i][j] = split1;
        kase[i][j] = 1;
      }
    }
  }
  return {
    m,
    s,
    scheme,
    variant: "cams-gen",
    tableIs: pIs,
    splitIs: split,
    caseIs: kase,
    tableSv: pSv,
    branchSv: branch,
  };
}

function checkDims(m: number, s: number): void {
  if (!Number.isInteger(m) || !Number.isInteger(s) || m < 1 || s < 1) {
    throw new Error(`need integer m >= 1 and s >= 1, got m=${m}, s=${s}`);
  }
}

export function totalCost(t: CamsTables, m?: number, s?: number): number {
  const mm = m ?? t.m;
  const ss = s ?? t.s;
  const ell = t.scheme.stages;
  if (t.variant === "cams-sa") {
    let best = t.tableIs[mm][ss];
    if (ss >= ell) best = Math.min(best, t.tableIs[mm - 1][ss - ell + 1]);
    return best;
  }
  return Math.min(t.tableIs[mm][ss], t.tableSv![mm][ss]);
}

/** Kind of the record opening a general-variant stage range of i steps. */
function svHead(t: CamsTables, i: number, j: number): number | null {
  if (i <= 1) return null;
  if (t.branchSv![i][j] === 1 && i >= 3) return KIND_SOLUTION_WITH_STAGES;
  return KIND_STAGE_VALUES;
}

function seedBudget(t: CamsTables, kind: number, s: number): number {
  const ell = t.scheme.stages;
  if (kind === KIND_SOLUTION) return s;
  if (kind === KIND_SOLUTION_WITH_STAGES)
    return t.scheme.stifflyAccurate ? s - ell + 1 : s - ell;
  throw new Error(`kind ${kind} cannot seed recomputation for this scheme`);
}

/** Position and kind of the next checkpoint on the optimal path, or null.
 * `s` counts the units available to the remaining subproblem including the
 * anchor record's own; `m` is the last step the reversal still covers. */
export function nextCheckpoint(
  t: CamsTables,
  lastStep: number,
  lastKind: number,
  s: number,
  m: number,
): [number, number] | null {
  if (m > t.m || s > t.s || s < 0) {
    throw new Error(`query (m=${m}, s=${s}) outside built tables`);
  }
  if (lastStep === -1) {
    if (lastKind !== KIND_NONE) throw new Error("lastStep=-1 must come with kind -1");
    return initialCheckpoint(t, m, s);
  }
  if (lastStep < 0 || lastStep > m) throw new Error(`lastStep ${lastStep} outside [0, ${m}]`);
  const i = m - lastStep;
  if (i === 0) return null;
  if (lastKind === KIND_STAGE_VALUES && !t.scheme.stifflyAccurate) {
    return nextInStageRange(t, lastStep, i + 1, s);
  }
  const kind = lastKind === KIND_STAGE_VALUES ? KIND_SOLUTION_WITH_STAGES : lastKind;
  const j = seedBudget(t, kind, s);
  if (j < 0 || !Number.isFinite(t.tableIs[i][j])) {
    throw new Error(`no feasible schedule from step ${lastStep} with ${s} units`);
  }
  return firstStore(t, lastStep, i, j);
}

function initialCheckpoint(t: CamsTables, m: number, s: number): [number, number] | null {
  const ell = t.scheme.stages;
  if (m === 1) return null;
  const optIs = t.tableIs[m][s];
  if (t.variant === "cams-sa") {
    const optSv = s >= ell ? t.tableIs[m - 1][s - ell + 1] : INFEASIBLE;
    if (optSv <= optIs && optSv < INFEASIBLE) return [1, KIND_SOLUTION_WITH_STAGES];
    if (optIs < INFEASIBLE) return [0, KIND_SOLUTION];
  } else {
    const optSv = t.tableSv![m][s];
    if (optIs <= optSv && optIs < INFEASIBLE) return [0, KIND_SOLUTION];
    if (optSv < INFEASIBLE) {
      const kind = svHead(t, m, s);
      return kind === null ? null : [1, kind];
    }
  }
  throw new Error(`reversing ${m} steps with ${s} units is infeasible`);
}

function firstStore(t: CamsTables, base: number, i: number, j: number): [number, number] | null {
  if (i <= 1) return null;
  const kase = t.caseIs[i][j];
  const mt = t.splitIs[i][j];
  if (kase === 0) return null;
  if (kase === 1) {
    if (i - mt === 1) return null;
    return [base + mt, KIND_SOLUTION];
  }
  if (t.variant === "cams-sa") return [base + mt, KIND_SOLUTION_WITH_STAGES];
  const kind = svHead(t, i - mt + 1, j - 1);
  if (kind === null) throw new Error("internal: empty stage range head");
  return [base + mt, kind];
}

function nextInStageRange(
  t: CamsTables,
  lastStep: number,
  iSv: number,
  jSv: number,
): [number, number] | null {
  if (iSv <= 2) return null;
  const ell = t.scheme.stages;
  if (jSv < 0 || !Number.isFinite(t.tableSv![iSv][jSv])) {
    throw new Error(`no feasible stage range of ${iSv} steps with ${jSv} units`);
  }
  if (t.branchSv![iSv][jSv] === 1) {
    throw new Error(`a plain stage record at step ${lastStep} is not on an optimal path`);
  }
  const kind = svHead(t, iSv - 1, jSv - ell);
  return kind === null ? null : [lastStep + 1, kind];
}
