"""Core value types and primitives: reward vectors, arm subsets, noise,
task sequences, the max-reward set function and pseudo-regret accounting.

Arm indices are 1-based everywhere in the public API.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np


class ResourceLimitError(RuntimeError):
    """A combinatorial guard was exceeded (problem too large to enumerate)."""


@dataclass(frozen=True)
class RewardVector:
    """Per-task mean rewards, one entry per arm, each in [0, 1]."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("reward vector needs at least one arm")
        if any(not (0.0 <= v <= 1.0) for v in self.values):
            raise ValueError("mean rewards must lie in [0, 1]")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @property
    def num_arms(self) -> int:
        return len(self.values)

    def value(self, arm: int) -> float:
        """Mean reward of a 1-based arm index."""
        if not 1 <= arm <= len(self.values):
            raise ValueError(f"arm {arm} out of range [1..{len(self.values)}]")
        return self.values[arm - 1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class Subset:
    """A duplicate-free, sorted set of 1-based arm indices, optionally capped."""

    arms: tuple[int, ...]
    capacity: Optional[int] = None

    def __post_init__(self):
        arms = tuple(sorted(int(a) for a in self.arms))
        if len(set(arms)) != len(arms):
            raise ValueError("duplicate arm indices")
        if arms and arms[0] < 1:
            raise ValueError("arm indices are 1-based")
        if self.capacity is not None and len(arms) > self.capacity:
            raise ValueError(f"subset of size {len(arms)} exceeds capacity {self.capacity}")
        object.__setattr__(self, "arms", arms)

    @classmethod
    def of(cls, arms: Iterable[int], capacity: Optional[int] = None) -> "Subset":
        return cls(tuple(arms), capacity)

    def __len__(self) -> int:
        return len(self.arms)

    def __iter__(self):
        return iter(self.arms)

    def __contains__(self, arm: int) -> bool:
        return arm in self.arms

    def intersects(self, other: "Subset") -> bool:
        return bool(set(self.arms) & set(other.arms))

    def union(self, other: "Subset") -> "Subset":
        return Subset(tuple(set(self.arms) | set(other.arms)))


class NoiseKind(Enum):
    NONE = "none"
    UNIFORM = "uniform"      # zero-mean, half-width 1/2
    BERNOULLI = "bernoulli"  # realized reward in {0, 1} with the arm's mean


@dataclass(frozen=True)
class NoiseModel:
    kind: NoiseKind = NoiseKind.UNIFORM

    @property
    def subgaussian_proxy(self) -> float:
        """Variance proxy used by confidence intervals.

        Uniform(-1/2,1/2) is strictly sub-Gaussian with its own variance 1/12;
        the bounded-range worst case (Bernoulli) is 1/4; noiseless rewards
        need no repetition at all.
        """
        if self.kind is NoiseKind.UNIFORM:
            return 1.0 / 12.0
        if self.kind is NoiseKind.BERNOULLI:
            return 0.25
        return 0.0


@dataclass(frozen=True)
class Task:
    rewards: RewardVector
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("task length must be >= 1")


@dataclass(frozen=True)
class TaskSequence:
    tasks: tuple[Task, ...]

    def __post_init__(self):
        if not self.tasks:
            raise ValueError("empty task sequence")

    @property
    def total_rounds(self) -> int:
        return sum(t.length for t in self.tasks)

    @property
    def num_arms(self) -> int:
        return self.tasks[0].rewards.num_arms

    def __len__(self) -> int:
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks)


@dataclass
class RegretTrace:
    """Cumulative pseudo-regret of one (algorithm, seed) run, sampled at task checkpoints."""

    algorithm_id: str
    seed: int
    checkpoints: list[tuple[int, float]] = field(default_factory=list)

    def add(self, task_index: int, cum_regret: float) -> None:
        if self.checkpoints and task_index <= self.checkpoints[-1][0]:
            raise ValueError("checkpoint task indices must be strictly increasing")
        self.checkpoints.append((task_index, float(cum_regret)))

    @property
    def final_regret(self) -> float:
        return self.checkpoints[-1][1]


def f_max(r: RewardVector, subset: Subset) -> float:
    """Max mean reward over the arms of ``subset``: the set function the
    whole reduction maximizes."""
    if len(subset) == 0:
        raise ValueError("f_max of the empty set is undefined")
    if subset.arms[-1] > r.num_arms:
        raise ValueError(f"arm {subset.arms[-1]} out of range for K={r.num_arms}")
    return max(r.values[a - 1] for a in subset.arms)


def _f_by_mask(values: np.ndarray) -> np.ndarray:
    """f_max over all bitmask subsets; f[0] = 0 (empty set convention)."""
    K = len(values)
    f = np.zeros(2 ** K)
    for a in range(K):
        bit = 1 << a
        idx = np.arange(2 ** K)
        has = (idx & bit) > 0
        f[has] = np.maximum(f[has], values[a])
    return f


def check_submodular_monotone(r: RewardVector) -> bool:
    """Exhaustively verify that S -> f_max(r, S) is monotone with diminishing
    returns, over every subset pair.

    Single-element steps are checked; the general S1 ⊆ S2 statements follow by
    chaining steps, so the check is still exhaustive over all pairs. K <= 12.
    """
    K = r.num_arms
    if K > 12:
        raise ResourceLimitError(f"exhaustive check limited to K <= 12, got {K}")
    f = _f_by_mask(r.as_array())
    masks = np.arange(2 ** K)
    tol = 1e-12
    for a in range(K):
        bit_a = 1 << a
        marg_a = f[masks | bit_a] - f
        # monotone: adding an arm never decreases f
        if (marg_a < -tol).any():
            return False
        # diminishing returns: the marginal of `a` shrinks as the base set grows
        for b in range(K):
            if b == a:
                continue
            bit_b = 1 << b
            if (marg_a[masks | bit_b] > marg_a + tol).any():
                return False
    return True


def best_m_subset(seq: TaskSequence, m: int) -> tuple[Subset, float]:
    """Exhaustively find the size-m subset maximizing sum_n tau_n * f_max(r_n, S).

    Ties break to the lexicographically smallest arm tuple. This is the
    comparator for pseudo-regret and the oracle baseline's arm set.
    """
    K = seq.num_arms
    if m > K:
        raise ValueError(f"m={m} exceeds K={K}")
    n_combos = _comb(K, m)
    if K > 25 or n_combos > 2_000_000:
        raise ResourceLimitError(f"C({K},{m})={n_combos} subsets is beyond the enumeration guard")
    R = np.stack([t.rewards.as_array() for t in seq.tasks])          # (N, K)
    taus = np.array([t.length for t in seq.tasks], dtype=float)
    best_val = -np.inf
    best: tuple[int, ...] = ()
    for combo in itertools.combinations(range(K), m):
        val = float(taus @ R[:, combo].max(axis=1))
        if val > best_val + 1e-12:                                    # strict: keeps lexicographic min
            best_val, best = val, combo
    return Subset(tuple(a + 1 for a in best)), best_val


def _comb(n: int, k: int) -> int:
    import math

    return math.comb(n, k)


def sample_reward(r: RewardVector, arm: int, noise: NoiseModel, rng: np.random.Generator) -> float:
    """One realized reward for pulling ``arm``: mean plus the model's noise."""
    mean = r.value(arm)
    if noise.kind is NoiseKind.NONE:
        return mean
    if noise.kind is NoiseKind.UNIFORM:
        return mean + rng.uniform(-0.5, 0.5)
    return float(rng.random() < mean)


def pseudo_regret(seq: TaskSequence, actions: Sequence[Sequence[int]], comparator: Subset) -> float:
    """Mean-reward regret of per-round arm choices against a fixed comparator set.

    ``actions[n]`` holds the tau_n arms played in task n (1-based).
    """
    if len(actions) != len(seq.tasks):
        raise ValueError("one action list per task required")
    total = 0.0
    for task, acts in zip(seq.tasks, actions):
        if len(acts) != task.length:
            raise ValueError(f"task of length {task.length} got {len(acts)} actions")
        star = f_max(task.rewards, comparator)
        total += sum(star - task.rewards.value(a) for a in acts)
    return total
