"""Render the comparison figures and their underlying CSV data to files.

Three views, all for a fixed stage count: recomputations vs steps at a
fixed unit budget, recomputations vs units at a fixed step count, and the
classical-vs-combined crossover curves.
"""
from __future__ import annotations

import csv
import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .cams import CamsVariant, build_tables, dump_cost_csv, total_cost
from .core import CheckpointType, SchemeInfo, unit_cost
from .mrevolve import modified_cost
from .revolve import revolve_cost

STYLES = {
    "revolve": dict(color="tab:blue", marker="o"),
    "mrevolve": dict(color="tab:orange", marker="s"),
    "cams-sa": dict(color="tab:green", marker="^"),
    "cams-gen": dict(color="tab:red", marker="v"),
}


def cost_rows(steps, units, stages):
    """(m, s, l, algorithm, recomputations) rows over the grid."""
    gen = SchemeInfo(stages, False)
    sa = SchemeInfo(stages, True)
    m_max, s_max = max(steps), max(units)
    t_sa = build_tables(m_max, s_max, sa, CamsVariant.SA)
    t_gen = build_tables(m_max, s_max, gen, CamsVariant.GEN)
    combined = unit_cost(CheckpointType.SOLUTION_WITH_STAGES, gen)
    rows = []
    for m in steps:
        for s in units:
            s_mod = s // combined
            rows.append((m, s, stages, "revolve", revolve_cost(m, s)))
            rows.append(
                (m, s, stages, "mrevolve", modified_cost(m, s_mod) if s_mod else math.inf)
            )
            rows.append((m, s, stages, "cams-sa", total_cost(t_sa, m, s)))
            rows.append((m, s, stages, "cams-gen", total_cost(t_gen, m, s)))
    return rows


def _write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "s", "l", "algorithm", "recomputations"])
        for m, s, l, alg, cost in rows:
            writer.writerow([m, s, l, alg, "inf" if math.isinf(cost) else int(cost)])


def _plot(rows, x_index, x_label, title, path):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    by_alg = {}
    for row in rows:
        by_alg.setdefault(row[3], []).append(row)
    for alg, data in by_alg.items():
        xs = [r[x_index] for r in data if not math.isinf(r[4])]
        ys = [r[4] for r in data if not math.isinf(r[4])]
        ax.plot(xs, ys, label=alg, markersize=3, linewidth=1.2, **STYLES[alg])
    ax.set_xlabel(x_label)
    ax.set_ylabel("recomputations")
    ax.set_title(title)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report(out_dir: str, stages: int = 2, units_fixed: int = 30, steps_fixed: int = 300):
    """Write the three CSV/figure pairs plus the raw multistage cost-table
    dumps; returns the created paths."""
    os.makedirs(out_dir, exist_ok=True)
    created = []

    for variant, scheme in (
        (CamsVariant.SA, SchemeInfo(stages, True)),
        (CamsVariant.GEN, SchemeInfo(stages, False)),
    ):
        tables = build_tables(steps_fixed, 60, scheme, variant)
        path = os.path.join(out_dir, f"{variant.value}_cells_l{stages}.csv")
        with open(path, "w", newline="") as fh:
            dump_cost_csv(fh, tables, cells=((m, s) for m in range(10, steps_fixed + 1, 10)
                                             for s in range(4, 61, 4)))
        created.append(path)

    steps = list(range(10, 301, 10))
    rows = cost_rows(steps, [units_fixed], stages)
    csv_path = os.path.join(out_dir, f"cost_vs_steps_u{units_fixed}_l{stages}.csv")
    fig_path = os.path.join(out_dir, f"cost_vs_steps_u{units_fixed}_l{stages}.png")
    _write_csv(csv_path, rows)
    _plot(rows, 0, "time steps", f"{units_fixed} units, {stages}-stage scheme", fig_path)
    created += [csv_path, fig_path]

    units = list(range(4, 61, 2))
    rows = cost_rows([steps_fixed], units, stages)
    csv_path = os.path.join(out_dir, f"cost_vs_units_m{steps_fixed}_l{stages}.csv")
    fig_path = os.path.join(out_dir, f"cost_vs_units_m{steps_fixed}_l{stages}.png")
    _write_csv(csv_path, rows)
    _plot(rows, 1, "checkpointing units", f"{steps_fixed} steps, {stages}-stage scheme", fig_path)
    created += [csv_path, fig_path]

    # classical vs combined: the crossover picture for a 12-unit budget
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ms = list(range(2, 61))
    units_budget = 12
    ax.plot(ms, [revolve_cost(m, units_budget) for m in ms], label="classical, 12 units",
            **STYLES["revolve"], markersize=3, linewidth=1.2)
    for extra in (1, 2):
        per = extra + 2
        s_mod = units_budget // per
        ax.plot(
            ms,
            [modified_cost(m, s_mod) for m in ms],
            label=f"combined, {extra} extra stage{'s' if extra > 1 else ''} ({s_mod} ckpts)",
            marker="s" if extra == 1 else "^",
            markersize=3,
            linewidth=1.2,
        )
    ax.set_xlabel("time steps")
    ax.set_ylabel("recomputations")
    ax.set_title("classical vs combined checkpoints, equal memory")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig_path = os.path.join(out_dir, "crossover_u12.png")
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    created.append(fig_path)
    return created
