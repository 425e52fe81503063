"""Synthetic task-sequence generators: stochastic, oblivious-adversarial and
non-oblivious-adversarial optimal-arm processes, with or without a minimum
identifiability gap.

A fixed pool of M arms holds every task's optimal arm (realizable by
construction). The adversarial modes reveal new pool arms with the
probability q_n from the minimax game's saddle point; the oblivious variant
plays that game against an imaginary greedy learner so whole sequences are a
pure function of the seed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .core import RewardVector, Subset, Task, TaskSequence
from .game import CostTriple, ValueTable, saddle_point, solve_cost_to_go
from .meta import GbassTracker


class AdversaryMode(Enum):
    STOCHASTIC = "stochastic"
    OBLIVIOUS = "oblivious"
    NON_OBLIVIOUS = "non_oblivious"


class GapMode(Enum):
    MIN_GAP = "min_gap"
    NO_GAP = "no_gap"


class EnvConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EnvConfig:
    num_arms: int
    m: int
    n_tasks: int
    tau: int
    mode: AdversaryMode = AdversaryMode.STOCHASTIC
    gap: GapMode = GapMode.MIN_GAP
    delta: Optional[float] = None        # None -> 1/(N tau)
    gap_constant: float = 1.0
    master_seed: int = 0

    def __post_init__(self):
        if not 1 <= self.m <= self.num_arms:
            raise EnvConfigError(f"need 1 <= M <= K, got M={self.m}, K={self.num_arms}")
        if self.n_tasks < 1 or self.tau < 1:
            raise EnvConfigError("need N >= 1 and tau >= 1")
        if self.delta is None:
            object.__setattr__(self, "delta", 1.0 / (self.n_tasks * self.tau))
        if not 0.0 < self.delta < 1.0:
            raise EnvConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.gap_constant <= 0:
            raise EnvConfigError("gap_constant must be positive")

    def with_seed(self, master_seed: int) -> "EnvConfig":
        return replace(self, master_seed=master_seed)


def min_gap(cfg: EnvConfig) -> float:
    """Identifiability gap c * sqrt(K ln(N/delta) / tau), clipped to 1/2 so
    suboptimal rewards stay non-negative against an optimum >= 1/2."""
    raw = cfg.gap_constant * math.sqrt(
        cfg.num_arms * math.log(cfg.n_tasks / cfg.delta) / cfg.tau
    )
    return min(0.5, raw)


def sample_optimal_pool(cfg: EnvConfig, rng: np.random.Generator) -> Subset:
    """Uniformly random M-subset of [K]: the sequence-wide pool of optima."""
    arms = rng.choice(cfg.num_arms, size=cfg.m, replace=False) + 1
    return Subset(tuple(int(a) for a in arms))


@dataclass
class AdversaryState:
    pool: Subset
    table: Optional[ValueTable]                # q_n lookups (adversarial modes)
    imaginary: Optional[GbassTracker]          # oblivious mode's simulated learner
    n: int = 0


def init_adversary(cfg: EnvConfig, rng: np.random.Generator) -> AdversaryState:
    pool = sample_optimal_pool(cfg, rng)
    table = None
    imaginary = None
    if cfg.mode is not AdversaryMode.STOCHASTIC:
        table = solve_cost_to_go(
            cfg.n_tasks, cfg.m, CostTriple.for_bandit(cfg.tau, cfg.num_arms)
        )
        if cfg.mode is AdversaryMode.OBLIVIOUS:
            imaginary = GbassTracker(cfg.num_arms, cfg.m, cfg.n_tasks, cfg.tau)
    return AdversaryState(pool=pool, table=table, imaginary=imaginary)


def _choose_optimal_arm(
    state: AdversaryState, cfg: EnvConfig, learner_set: Optional[Subset], rng: np.random.Generator
) -> int:
    pool = set(state.pool.arms)
    if cfg.mode is AdversaryMode.STOCHASTIC:
        return int(rng.choice(sorted(pool)))
    known = set(learner_set.arms) if learner_set is not None else set()
    s = min(cfg.m, len(pool & known))
    n = min(state.n, cfg.n_tasks - 1)
    q = 0.0 if s >= cfg.m else saddle_point(state.table, n, s)[1]
    fresh = sorted(pool - known)
    stale = sorted(pool & known)
    if rng.random() < q:
        # reveal: a new pool arm the learner has not discovered
        candidates = fresh or stale or sorted(pool)
    else:
        candidates = stale or sorted(pool)
    return int(rng.choice(candidates))


def _draw_rewards(cfg: EnvConfig, gap: float, optimal_arm: int, rng: np.random.Generator) -> RewardVector:
    for _ in range(100):
        r_star = rng.uniform(0.5, 1.0)
        if cfg.gap is GapMode.NO_GAP or r_star - gap > 0:
            break
    else:
        raise EnvConfigError(f"cannot fit gap {gap} under an optimal reward in [0.5, 1]")
    K = cfg.num_arms
    if cfg.gap is GapMode.MIN_GAP:
        values = rng.uniform(0.0, r_star - gap, size=K)
    else:
        values = rng.uniform(0.0, r_star, size=K)
        others = [a for a in range(K) if a != optimal_arm - 1]
        if others and not any(values[a] > r_star - gap for a in others):
            # keep the identifiability condition violated in every task
            j = others[int(rng.integers(len(others)))]
            values[j] = r_star - rng.uniform(0.0, min(gap, r_star))
    values[optimal_arm - 1] = r_star
    return RewardVector(tuple(values))


def gen_task(
    state: AdversaryState,
    cfg: EnvConfig,
    learner_set: Optional[Subset],
    rng: np.random.Generator,
) -> tuple[RewardVector, Subset]:
    """One task's mean rewards and its optimal set (a singleton).

    In the oblivious mode the relevant "learner" is the adversary's imaginary
    one; the caller's learner_set is ignored there.
    """
    if cfg.mode is AdversaryMode.OBLIVIOUS:
        explore = state.imaginary.wants_explore(rng)
        peek = state.imaginary.discovered_arms()
        a_star = _choose_optimal_arm(state, cfg, peek, rng)
        rewards = _draw_rewards(cfg, min_gap(cfg), a_star, rng)
        if explore:
            state.imaginary.observe(Subset((a_star,)))
        state.imaginary.advance()
    else:
        a_star = _choose_optimal_arm(state, cfg, learner_set, rng)
        rewards = _draw_rewards(cfg, min_gap(cfg), a_star, rng)
    state.n += 1
    return rewards, Subset((a_star,))


class TaskStream:
    """Task-by-task generator: the harness pulls one task at a time, passing
    the learner's currently discovered arms (consumed by the non-oblivious
    adversary only)."""

    def __init__(self, cfg: EnvConfig, rng: Optional[np.random.Generator] = None):
        self.cfg = cfg
        self.rng = rng if rng is not None else np.random.default_rng(cfg.master_seed)
        self.state = init_adversary(cfg, self.rng)

    def next_task(self, learner_set: Optional[Subset] = None) -> tuple[RewardVector, Subset]:
        if self.state.n >= self.cfg.n_tasks:
            raise RuntimeError("stream exhausted")
        return gen_task(self.state, self.cfg, learner_set, self.rng)

    @property
    def pool(self) -> Subset:
        return self.state.pool


def gen_sequence(
    cfg: EnvConfig,
    feedback: Optional[Callable[[], Optional[Subset]]] = None,
    rng: Optional[np.random.Generator] = None,
) -> tuple[TaskSequence, list[Subset], Subset]:
    """Materialize a whole sequence: (tasks, per-task optimal sets, pool).

    Stochastic and oblivious sequences are a pure function of the seed; the
    non-oblivious adversary needs a feedback channel yielding the learner's
    current discovered set before each task.
    """
    if cfg.mode is AdversaryMode.NON_OBLIVIOUS and feedback is None:
        raise ValueError("non-oblivious generation requires a learner feedback channel")
    stream = TaskStream(cfg, rng)
    tasks = []
    opts = []
    for _ in range(cfg.n_tasks):
        learner_set = feedback() if feedback is not None else None
        r, opt = stream.next_task(learner_set)
        tasks.append(Task(rewards=r, length=cfg.tau))
        opts.append(opt)
    return TaskSequence(tuple(tasks)), opts, stream.pool


def dump_sequence(path: str, seq: TaskSequence, opts: list[Subset]) -> None:
    """One JSON record per task: {"n", "tau", "r", "opt"}."""
    with open(path, "w") as fh:
        for i, (task, opt) in enumerate(zip(seq.tasks, opts), start=1):
            fh.write(
                json.dumps(
                    {"n": i, "tau": task.length, "r": list(task.rewards.values), "opt": list(opt.arms)}
                )
            )
            fh.write("\n")
