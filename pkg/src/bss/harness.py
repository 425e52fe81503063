"""Experiment harness: seeded runs of the subset-selection algorithms against
generated environments, per-task pseudo-regret traces, parameter sweeps and
CSV emission.

Determinism contract: every (algorithm, seed) run draws from its own RNG
stream derived from (master seed, seed, algorithm key hash); environments
derive from (master seed, seed) only, so all algorithms at a seed face the
same sequence, and results are byte-identical however the runs are scheduled.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .base import MOSSPolicy, make_policy_factory, run_base
from .core import NoiseKind, NoiseModel, RegretTrace, RewardVector, Subset, Task, TaskSequence, best_m_subset, f_max
from .envgen import AdversaryMode, EnvConfig, GapMode, TaskStream
from .meta import Bog, EBass, EwaPm, GBass

_ENV_TAG = 0xE0F
_CAL_TAG = 0xCA1

ALGORITHM_KINDS = {
    "moss": set(),
    "optmoss": set(),
    "bog": {"schedule", "tau_prime", "base", "num_experts"},
    "ogo": {"gamma", "base"},
    "gbass": {"schedule", "c_b", "base", "bai_delta", "bai_first_tolerance"},
    "ebass": {"base", "bai_delta", "bai_first_tolerance", "p"},
    "ewapm": {"mode", "c_b", "base", "bai_delta", "bai_first_tolerance"},
}


@dataclass(frozen=True)
class AlgorithmSpec:
    kind: str
    params: dict = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        if self.kind not in ALGORITHM_KINDS:
            raise ValueError(f"unknown algorithm kind {self.kind!r}; known: {sorted(ALGORITHM_KINDS)}")
        bad = set(self.params) - ALGORITHM_KINDS[self.kind]
        if bad:
            raise ValueError(f"unknown parameters for {self.kind}: {sorted(bad)}")
        if not self.label:
            object.__setattr__(self, "label", self.kind)

    def key(self) -> str:
        return self.label + "|" + self.kind + "|" + json.dumps(self.params, sort_keys=True)


@dataclass(frozen=True)
class RunConfig:
    env: EnvConfig
    algorithms: tuple[AlgorithmSpec, ...]
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    checkpoint_every: int = 1
    output_dir: str = "out"
    noise: NoiseModel = NoiseModel(NoiseKind.UNIFORM)

    def __post_init__(self):
        if not self.algorithms or not self.seeds:
            raise ValueError("need at least one algorithm and one seed")
        if self.checkpoint_every < 1:
            raise ValueError("checkpoint_every must be >= 1")
        labels = [a.label for a in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ValueError("algorithm labels must be unique (set `label` to disambiguate)")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str                 # one of N, tau, K, M
    values: tuple[int, ...]
    base: RunConfig

    def __post_init__(self):
        if self.parameter not in {"N", "tau", "K", "M"}:
            raise ValueError("parameter must be one of N, tau, K, M")
        if not self.values:
            raise ValueError("sweep needs at least one value")

    def configs(self) -> list[tuple[int, RunConfig]]:
        out = []
        for v in self.values:
            env = self.base.env
            if self.parameter == "N":
                env = replace(env, n_tasks=int(v))
            elif self.parameter == "tau":
                env = replace(env, tau=int(v))
            elif self.parameter == "K":
                env = replace(env, num_arms=int(v))
            else:
                env = replace(env, m=int(v))
            out.append((int(v), replace(self.base, env=env)))
        return out


def _hash64(text: str) -> int:
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


def _rng(*entropy: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy))


class MossPerTask:
    """Agnostic baseline: an independent MOSS over all K arms in every task."""

    def __init__(self, num_arms: int, noise: NoiseModel):
        self.arms = Subset(tuple(range(1, num_arms + 1)))
        self.noise = noise
        self.algo_id = "moss"

    def run_task(self, rewards: RewardVector, tau: int, rng: np.random.Generator) -> float:
        return run_base(MOSSPolicy(self.arms, tau), rewards, tau, self.noise, rng).mean_sum

    def discovered_arms(self) -> Subset:
        return Subset(())


class OptMoss:
    """Oracle baseline: MOSS restricted to the true optimal pool."""

    def __init__(self, pool: Subset, noise: NoiseModel):
        self.pool = pool
        self.noise = noise
        self.algo_id = "optmoss"

    def run_task(self, rewards: RewardVector, tau: int, rng: np.random.Generator) -> float:
        return run_base(MOSSPolicy(self.pool, tau), rewards, tau, self.noise, rng).mean_sum

    def discovered_arms(self) -> Subset:
        return Subset(())


class SegmentedBog:
    """BOG driven at a segment length tau' dividing the task length: the
    meta-decision happens every tau' rounds inside each task."""

    def __init__(self, bog: Bog, tau_prime: int):
        self.bog = bog
        self.tau_prime = tau_prime
        self.algo_id = bog.algo_id

    def run_task(self, rewards: RewardVector, tau: int, rng: np.random.Generator) -> float:
        if tau % self.tau_prime:
            raise ValueError("tau_prime must divide the task length")
        return sum(self.bog.run_task(rewards, self.tau_prime, rng) for _ in range(tau // self.tau_prime))

    def discovered_arms(self) -> Subset:
        return self.bog.discovered_arms()


def build_algorithm(spec: AlgorithmSpec, env: EnvConfig, noise: NoiseModel, pool: Subset):
    p = dict(spec.params)
    if spec.kind == "moss":
        algo = MossPerTask(env.num_arms, noise)
    elif spec.kind == "optmoss":
        algo = OptMoss(pool, noise)
    elif spec.kind == "bog":
        tau_prime = p.pop("tau_prime", env.tau)
        bog_horizon = env.n_tasks * (env.tau // tau_prime) if tau_prime != env.tau else env.n_tasks
        bog = Bog(env.num_arms, env.m, bog_horizon, noise, **p)
        if tau_prime == env.tau:
            algo = bog
        elif env.tau % tau_prime == 0:
            algo = SegmentedBog(bog, tau_prime)
        else:
            raise ValueError("tau_prime must equal the task length or divide it")
    elif spec.kind == "ogo":
        gamma = p.pop("gamma")  # resolved by calibration before jobs run
        algo = Bog(env.num_arms, env.m, env.n_tasks, noise, fixed_gamma=gamma, **p)
        algo.algo_id = "ogo"
    elif spec.kind == "gbass":
        algo = GBass(env.num_arms, env.m, env.n_tasks, env.tau, noise, **p)
    elif spec.kind == "ebass":
        algo = EBass(env.num_arms, env.m, env.n_tasks, env.tau, noise, **p)
    elif spec.kind == "ewapm":
        algo = EwaPm(env.num_arms, env.m, env.n_tasks, env.tau, noise, **p)
    else:  # pragma: no cover - guarded by AlgorithmSpec
        raise ValueError(spec.kind)
    algo.algo_id = spec.label
    return algo


def _run_one(cfg: RunConfig, spec: AlgorithmSpec, seed: int) -> RegretTrace:
    env = cfg.env.with_seed(cfg.env.master_seed)
    env_rng = _rng(env.master_seed, seed, _ENV_TAG)
    alg_rng = _rng(env.master_seed, seed, _hash64(spec.key()))
    stream = TaskStream(env, env_rng)
    algo = build_algorithm(spec, env, cfg.noise, stream.pool)
    tasks: list[Task] = []
    mean_sums: list[float] = []
    for _ in range(env.n_tasks):
        feedback = algo.discovered_arms() if env.mode is AdversaryMode.NON_OBLIVIOUS else None
        rewards, _opt = stream.next_task(feedback)
        tasks.append(Task(rewards=rewards, length=env.tau))
        mean_sums.append(algo.run_task(rewards, env.tau, alg_rng))
    seq = TaskSequence(tuple(tasks))
    comparator, _ = best_m_subset(seq, env.m)
    trace = RegretTrace(algorithm_id=spec.label, seed=seed)
    cum = 0.0
    for n, (task, got) in enumerate(zip(tasks, mean_sums), start=1):
        cum += task.length * f_max(task.rewards, comparator) - got
        if n % cfg.checkpoint_every == 0 or n == env.n_tasks:
            trace.add(n, cum)
    return trace


def _resolve_ogo_gamma(cfg: RunConfig) -> RunConfig:
    """Pick the fixed exploration rate for any `ogo` spec lacking one, by a
    coarse grid over a dedicated calibration environment."""
    grid = [round(0.05 * i, 2) for i in range(1, 11)]
    out = []
    for spec in cfg.algorithms:
        if spec.kind != "ogo" or "gamma" in spec.params:
            out.append(spec)
            continue
        best_gamma, best_regret = grid[0], math.inf
        for gi, gamma in enumerate(grid):
            probe = AlgorithmSpec("ogo", {**spec.params, "gamma": gamma}, label=f"_cal{gi}")
            trace = _run_one(replace(cfg, checkpoint_every=cfg.env.n_tasks), probe, _CAL_TAG)
            if trace.final_regret < best_regret - 1e-9:
                best_gamma, best_regret = gamma, trace.final_regret
        out.append(AlgorithmSpec("ogo", {**spec.params, "gamma": best_gamma}, label=spec.label))
    return replace(cfg, algorithms=tuple(out))


def run_experiment(cfg: RunConfig, threads: int = 1) -> list[RegretTrace]:
    """All (algorithm, seed) traces for one configuration. Runs are
    independent; `threads` > 1 executes them in a process pool."""
    cfg = _resolve_ogo_gamma(cfg)
    jobs = [(spec, seed) for spec in cfg.algorithms for seed in cfg.seeds]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(_run_one_star, [(cfg, s, sd) for s, sd in jobs]))
    else:
        traces = [_run_one(cfg, spec, seed) for spec, seed in jobs]
    traces.sort(key=lambda t: (t.algorithm_id, t.seed))
    return traces


def _run_one_star(args):
    return _run_one(*args)


def run_sweep(spec: SweepSpec, threads: int = 1) -> list[tuple[str, int, str, int, float]]:
    """Long-format rows (param, value, algo, seed, final_regret), one per run."""
    rows = []
    for value, cfg in spec.configs():
        for trace in run_experiment(cfg, threads=threads):
            rows.append((spec.parameter, value, trace.algorithm_id, trace.seed, trace.final_regret))
    rows.sort(key=lambda r: (r[1], r[2], r[3]))
    return rows


# ---------------------------------------------------------------------------
# files


def write_traces_csv(path: str, traces: list[RegretTrace]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("algo,seed,task,cum_regret\n")
        for t in sorted(traces, key=lambda t: (t.algorithm_id, t.seed)):
            for task, cum in t.checkpoints:
                fh.write(f"{t.algorithm_id},{t.seed},{task},{cum!r}\n")


def write_sweep_csv(path: str, rows: list[tuple[str, int, str, int, float]]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("param,value,algo,seed,final_regret\n")
        for param, value, algo, seed, final in rows:
            fh.write(f"{param},{value},{algo},{seed},{final!r}\n")


def write_metadata(path: str, cfg: RunConfig, extra: dict | None = None) -> None:
    from . import __version__

    meta = {
        "version": __version__,
        "env": {
            "num_arms": cfg.env.num_arms,
            "m": cfg.env.m,
            "n_tasks": cfg.env.n_tasks,
            "tau": cfg.env.tau,
            "mode": cfg.env.mode.value,
            "gap": cfg.env.gap.value,
            "delta": cfg.env.delta,
            "gap_constant": cfg.env.gap_constant,
            "master_seed": cfg.env.master_seed,
        },
        "noise": cfg.noise.kind.value,
        "algorithms": [{"kind": a.kind, "label": a.label, **a.params} for a in cfg.algorithms],
        "seeds": list(cfg.seeds),
        "checkpoint_every": cfg.checkpoint_every,
    }
    if extra:
        meta.update(extra)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


_ENV_KEYS = {"num_arms", "m", "n_tasks", "tau", "mode", "gap", "delta", "gap_constant", "master_seed"}
_TOP_KEYS = {"env", "algorithms", "seeds", "checkpoint_every", "output_dir", "noise"}


def load_config(path: str) -> RunConfig:
    """Parse a TOML run configuration. Unknown keys are a hard error."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    bad = set(raw) - _TOP_KEYS
    if bad:
        raise ValueError(f"unknown config keys: {sorted(bad)}")
    env_raw = dict(raw.get("env", {}))
    bad = set(env_raw) - _ENV_KEYS
    if bad:
        raise ValueError(f"unknown env keys: {sorted(bad)}")
    if "mode" in env_raw:
        env_raw["mode"] = AdversaryMode(env_raw["mode"])
    if "gap" in env_raw:
        env_raw["gap"] = GapMode(env_raw["gap"])
    env = EnvConfig(**env_raw)
    specs = []
    for entry in raw.get("algorithms", []):
        entry = dict(entry)
        kind = entry.pop("kind")
        label = entry.pop("label", "")
        specs.append(AlgorithmSpec(kind, entry, label=label))
    noise = NoiseModel(NoiseKind(raw.get("noise", "uniform")))
    return RunConfig(
        env=env,
        algorithms=tuple(specs),
        seeds=tuple(raw.get("seeds", (0, 1, 2, 3, 4))),
        checkpoint_every=int(raw.get("checkpoint_every", 1)),
        output_dir=raw.get("output_dir", "out"),
        noise=noise,
    )


def run_to_files(cfg: RunConfig, out_dir: str | None = None, threads: int = 1) -> str:
    out = out_dir or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    traces = run_experiment(cfg, threads=threads)
    write_traces_csv(os.path.join(out, "traces.csv"), traces)
    write_metadata(os.path.join(out, "traces.meta.json"), cfg)
    return os.path.join(out, "traces.csv")
