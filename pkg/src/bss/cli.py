"""Command-line entry point: run experiments, sweep parameters, print the
minimax game table, or run the verification suite."""
from __future__ import annotations

import argparse
import os
import sys

from .game import CostTriple, solve_cost_to_go
from .harness import SweepSpec, load_config, run_sweep, run_to_files, write_metadata, write_sweep_csv


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    path = run_to_files(cfg, out_dir=args.out, threads=args.threads)
    print(f"wrote {path}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    values = tuple(int(v) for v in args.values.split(","))
    spec = SweepSpec(parameter=args.param, values=values, base=cfg)
    rows = run_sweep(spec, threads=args.threads)
    out = args.out or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, f"sweep_{args.param}.csv")
    write_sweep_csv(path, rows)
    write_metadata(path.replace(".csv", ".meta.json"), cfg, extra={"sweep": {"param": args.param, "values": list(values)}})
    print(f"wrote {path}")
    return 0


def _cmd_dp(args) -> int:
    costs = CostTriple(c_info=args.cinfo, c_hit=args.chit, c_miss=args.cmiss)
    table = solve_cost_to_go(args.N, args.M, costs)
    G = table.G
    print("n,s,V,G,p,q")
    for n in range(args.N + 1):
        for s in range(args.M + 1):
            g = G[n, s] if s < args.M else 0.0
            print(f"{n},{s},{table.V[n, s]!r},{g!r},{table.P[n, s]!r},{table.Q[n, s]!r}")
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_checks

    results = run_checks(quick=args.quick)
    failed = [r for r in results if not r.passed]
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bss", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config and write trace CSVs")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--threads", type=int, default=1)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one of N, tau, K, M over a value list")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--param", required=True, choices=["N", "tau", "K", "M"])
    p_sweep.add_argument("--values", required=True, help="comma-separated integers")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_dp = sub.add_parser("dp", help="solve the minimax cost-to-go game and print it as CSV")
    p_dp.add_argument("--N", type=int, required=True)
    p_dp.add_argument("--M", type=int, required=True)
    p_dp.add_argument("--cinfo", type=float, required=True)
    p_dp.add_argument("--chit", type=float, required=True)
    p_dp.add_argument("--cmiss", type=float, required=True)
    p_dp.set_defaults(func=_cmd_dp)

    p_verify = sub.add_parser("verify", help="run the acceptance/property suite")
    p_verify.add_argument("--quick", action="store_true", help="reduced trial counts (smoke test)")
    p_verify.set_defaults(func=_cmd_verify)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
