#!/usr/bin/env python3
# A desk-scale end-to-end experiment: generate a realizable task sequence,
# run the subset-selection algorithms against the per-task oracle baseline and
# the agnostic one, write the harness CSVs, and render a figure with the
# standalone plot script.
#
# Expect a couple of minutes of compute. Shrink n_tasks/tau for a faster look.

import os
import subprocess
import sys

from bss import AdversaryMode, AlgorithmSpec, EnvConfig, GapMode, RunConfig, SweepSpec
from bss.harness import run_sweep, run_to_files, write_sweep_csv

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

env = EnvConfig(
    num_arms=15,
    m=5,
    n_tasks=120,
    tau=600,
    mode=AdversaryMode.STOCHASTIC,
    gap=GapMode.MIN_GAP,
    master_seed=0,
)
cfg = RunConfig(
    env=env,
    algorithms=(
        AlgorithmSpec("optmoss"),
        AlgorithmSpec("gbass", {"c_b": 0.5}),
        AlgorithmSpec("ebass"),
        AlgorithmSpec("moss"),
    ),
    seeds=(0, 1, 2, 3, 4),
    checkpoint_every=5,
    output_dir=OUT,
)

print("running per-task traces ...")
traces_csv = run_to_files(cfg, threads=2)
print(f"  wrote {traces_csv}")

print("sweeping the number of tasks ...")
rows = run_sweep(SweepSpec(parameter="N", values=(40, 80, 120), base=cfg), threads=2)
sweep_csv = os.path.join(OUT, "sweep_N.csv")
write_sweep_csv(sweep_csv, rows)
print(f"  wrote {sweep_csv}")

plot = os.path.join(os.path.dirname(__file__), "..", "frontend", "plots.py")
png = os.path.join(OUT, "figure.png")
subprocess.run([sys.executable, plot, "--sweep", sweep_csv, "--traces", traces_csv, "--out", png], check=True)
print(f"  wrote {png}")

print("\nfinal cumulative regret (seed 0):")
with open(traces_csv) as fh:
    last = {}
    next(fh)
    for line in fh:
        algo, seed, task, cum = line.strip().split(",")
        if seed == "0":
            last[algo] = float(cum)
for algo, cum in sorted(last.items(), key=lambda kv: kv[1]):
    print(f"  {algo:8s} {cum:10.1f}")
