#!/usr/bin/env python3
"""Render regret figures from harness CSV output.

Reads the exact CSV formats the experiment harness writes:
  sweep:  param,value,algo,seed,final_regret
  traces: algo,seed,task,cum_regret

Each panel shows one line per algorithm (mean over seeds) with a shaded
+-1 standard deviation band (sample std over seeds). Up to four sweep panels
are laid out in one row; missing (algo, x) cells render as gaps with a
warning, never a crash.

Usage:
  plots.py --sweep sweep_N.csv --out fig.png
  plots.py --sweep sweep_N.csv sweep_tau.csv sweep_K.csv sweep_M.csv --out fig.png
  plots.py --sweep sweep_N.csv --traces traces.csv --out fig.png
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SWEEP_HEADER = ["param", "value", "algo", "seed", "final_regret"]
TRACE_HEADER = ["algo", "seed", "task", "cum_regret"]


def read_rows(path: str, expected_header: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != expected_header:
            raise ValueError(f"{path}: expected header {','.join(expected_header)}, got {','.join(header)}")
        return [dict(zip(header, row)) for row in reader]


def aggregate(pairs: list[tuple[float, str, float]]) -> dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """(x, algo, y) rows -> {algo: (xs, mean, std)} with xs the sorted union
    of x values; cells with no observations become NaN (rendered as gaps)."""
    xs = sorted({x for x, _, _ in pairs})
    algos = sorted({a for _, a, _ in pairs})
    cells: dict[tuple[str, float], list[float]] = {}
    for x, algo, y in pairs:
        cells.setdefault((algo, x), []).append(y)
    out = {}
    for algo in algos:
        means, stds = [], []
        for x in xs:
            ys = cells.get((algo, x))
            if not ys:
                warnings.warn(f"no rows for algorithm {algo!r} at x={x}; leaving a gap")
                means.append(math.nan)
                stds.append(math.nan)
            else:
                means.append(float(np.mean(ys)))
                stds.append(float(np.std(ys, ddof=1)) if len(ys) > 1 else 0.0)
        out[algo] = (np.asarray(xs, dtype=float), np.asarray(means), np.asarray(stds))
    return out


def sweep_panel_data(path: str):
    rows = read_rows(path, SWEEP_HEADER)
    params = {r["param"] for r in rows}
    if len(params) > 1:
        raise ValueError(f"{path}: mixed sweep parameters {sorted(params)}")
    param = params.pop() if params else "value"
    pairs = [(float(r["value"]), r["algo"], float(r["final_regret"])) for r in rows]
    return param, aggregate(pairs)


def trace_panel_data(path: str):
    rows = read_rows(path, TRACE_HEADER)
    pairs = [(float(r["task"]), r["algo"], float(r["cum_regret"])) for r in rows]
    return "task", aggregate(pairs)


def draw_panel(ax, xlabel: str, series: dict) -> None:
    for algo, (xs, mean, std) in series.items():
        ax.plot(xs, mean, marker="o", markersize=3, label=algo)
        ax.fill_between(xs, mean - std, mean + std, alpha=0.25)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("cumulative regret")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)


def render(sweeps: list[str], traces: list[str], out: str) -> None:
    panels = [sweep_panel_data(p) for p in sweeps] + [trace_panel_data(p) for p in traces]
    if not panels:
        raise ValueError("nothing to plot: give at least one --sweep or --traces CSV")
    n = len(panels)
    ncols = min(n, 4)
    nrows = math.ceil(n / 4)
    fig, axes = plt.subplots(nrows, ncols, figsize=(4.2 * ncols, 3.4 * nrows), squeeze=False)
    for i, (xlabel, series) in enumerate(panels):
        draw_panel(axes[i // 4][i % 4], xlabel, series)
    for j in range(n, nrows * ncols):
        axes[j // 4][j % 4].axis("off")
    fig.tight_layout()
    fig.savefig(out, format="png", dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--sweep", nargs="*", default=[], help="sweep CSV file(s), one panel each")
    parser.add_argument("--traces", nargs="*", default=[], help="trace CSV file(s), one panel each")
    parser.add_argument("--out", required=True, help="output PNG path")
    args = parser.parse_args(argv)
    render(args.sweep, args.traces, args.out)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
