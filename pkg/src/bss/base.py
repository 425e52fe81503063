"""In-task bandit policies (UCB, MOSS, EXP3), all restrictable to an arm
subset, plus best-arm identification by phased elimination.

Policies are single-owner mutable state; a fresh instance per task (or per
segment) is the restart discipline the meta-algorithms rely on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import NoiseKind, NoiseModel, RewardVector, Subset


def regret_bound_B(tau: int, num_arms: int, c_b: float = 1.0) -> float:
    """Worst-case regret model B(tau, K) = c_b * sqrt(K tau); non-decreasing
    and concave in both arguments."""
    if tau < 1 or num_arms < 1:
        raise ValueError("tau and K must be >= 1")
    return c_b * math.sqrt(num_arms * tau)


class BasePolicy:
    """Common scaffolding: arm bookkeeping over a restricted subset."""

    def __init__(self, arms: Subset, horizon: int):
        if len(arms) == 0:
            raise ValueError("policy needs a nonempty arm subset")
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        self.arms = arms
        self.horizon = horizon
        self.k = len(arms)
        self.counts = np.zeros(self.k)
        self.sums = np.zeros(self.k)
        self.t = 0

    def choose(self, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def feed(self, pos: int, reward: float) -> None:
        self.t += 1
        self.counts[pos] += 1
        self.sums[pos] += reward


class UCBPolicy(BasePolicy):
    """UCB1 index mu_hat + sqrt(2 ln t / n); each arm once before comparing."""

    def choose(self, rng: np.random.Generator) -> int:
        if self.t < self.k:
            return self.t
        bonus = np.sqrt(2.0 * math.log(self.t) / self.counts)
        return int(np.argmax(self.sums / self.counts + bonus))


class MOSSPolicy(BasePolicy):
    """MOSS index mu_hat + sqrt(max(0, ln(tau / (k n))) / n).

    The index of an arm depends only on its own statistics, so it is cached
    and refreshed only for the pulled arm.
    """

    def __init__(self, arms: Subset, horizon: int):
        super().__init__(arms, horizon)
        self._index = np.full(self.k, np.inf)

    def choose(self, rng: np.random.Generator) -> int:
        if self.t < self.k:
            return self.t
        return int(np.argmax(self._index))

    def feed(self, pos: int, reward: float) -> None:
        super().feed(pos, reward)
        n = self.counts[pos]
        width = math.sqrt(max(0.0, math.log(self.horizon / (self.k * n))) / n)
        self._index[pos] = self.sums[pos] / n + width


class EXP3Policy(BasePolicy):
    """Importance-weighted exponential weights with rate sqrt(2 ln k / (tau k)).

    Realized rewards are rescaled from [-1/2, 3/2] to [0, 1] before the
    weight update so the usual boundedness assumption holds under noise.
    """

    def __init__(self, arms: Subset, horizon: int):
        super().__init__(arms, horizon)
        self.eta = math.sqrt(2.0 * math.log(max(self.k, 2)) / (horizon * self.k))
        self.cum_est = np.zeros(self.k)
        self._last_prob = 1.0

    def _probs(self) -> np.ndarray:
        z = self.eta * self.cum_est
        z -= z.max()
        w = np.exp(z)
        return w / w.sum()

    def choose(self, rng: np.random.Generator) -> int:
        p = self._probs()
        pos = int(np.searchsorted(np.cumsum(p), rng.random()))
        pos = min(pos, self.k - 1)
        self._last_prob = float(p[pos])
        return pos

    def feed(self, pos: int, reward: float) -> None:
        super().feed(pos, reward)
        scaled = min(1.0, max(0.0, (reward + 0.5) / 2.0))
        self.cum_est[pos] += scaled / self._last_prob


PolicyFactory = Callable[[Subset, int], BasePolicy]

_POLICIES: dict[str, type[BasePolicy]] = {
    "ucb": UCBPolicy,
    "moss": MOSSPolicy,
    "exp3": EXP3Policy,
}


def make_policy_factory(kind: str) -> PolicyFactory:
    try:
        cls = _POLICIES[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown base policy {kind!r}; choose from {sorted(_POLICIES)}")
    return lambda arms, horizon: cls(arms, horizon)


@dataclass
class RunResult:
    """One restricted bandit run: played arms (1-based), realized rewards,
    and the mean-reward total the pseudo-regret accounting needs."""

    actions: list[int]
    realized: np.ndarray
    realized_sum: float
    mean_sum: float


def run_base(
    policy: BasePolicy,
    rewards: RewardVector,
    tau: int,
    noise: NoiseModel,
    rng: np.random.Generator,
) -> RunResult:
    """Play ``policy`` for tau rounds on its subset against fixed mean rewards."""
    arm_ids = list(policy.arms)
    means = np.array([rewards.value(a) for a in arm_ids])
    if noise.kind is NoiseKind.UNIFORM:
        eps = rng.uniform(-0.5, 0.5, size=tau)
    elif noise.kind is NoiseKind.BERNOULLI:
        eps = rng.random(size=tau)
    else:
        eps = None
    actions = []
    realized = np.empty(tau)
    mean_sum = 0.0
    for t in range(tau):
        pos = policy.choose(rng)
        mu = means[pos]
        if noise.kind is NoiseKind.UNIFORM:
            x = mu + eps[t]
        elif noise.kind is NoiseKind.BERNOULLI:
            x = float(eps[t] < mu)
        else:
            x = mu
        policy.feed(pos, x)
        actions.append(arm_ids[pos])
        realized[t] = x
        mean_sum += mu
    return RunResult(actions=actions, realized=realized, realized_sum=float(realized.sum()), mean_sum=mean_sum)


@dataclass
class BaiOutcome:
    """Result of a best-arm-identification run within one task."""

    surviving: Subset
    rounds_used: int
    succeeded: Optional[bool]       # surviving subset of the true argmax set; None if budget too small
    mean_sum: float                 # mean-reward total collected while identifying
    pulls: np.ndarray               # per-arm pull counts (index 0 = arm 1)


def phased_elimination(
    rewards: RewardVector,
    budget: int,
    delta_task: float,
    noise: NoiseModel,
    rng: np.random.Generator,
    first_tolerance: float = 0.5,
    exploit_leftover: bool = True,
) -> BaiOutcome:
    """Best-arm identification by elimination phases with halving tolerances.

    Phase m uses tolerance eps_m = first_tolerance * 2^(1-m) and tops every
    active arm up to ceil(8 sigma^2 ln(2 K m (m+1) / delta_task) / eps_m^2)
    total pulls (sigma^2 from the noise model), then drops every arm whose
    mean estimate is more than eps_m below the leader. A final short phase
    splits whatever budget remains evenly and still applies the rule. Budget
    left after a single survivor emerges is spent on the empirical best arm.
    """
    K = rewards.num_arms
    if budget < K:
        return BaiOutcome(
            surviving=Subset(tuple(range(1, K + 1))),
            rounds_used=0,
            succeeded=None,
            mean_sum=0.0,
            pulls=np.zeros(K),
        )
    means = rewards.as_array()
    sigma2 = noise.subgaussian_proxy
    counts = np.zeros(K)
    sums = np.zeros(K)
    active = list(range(K))
    used = 0
    mean_sum = 0.0
    m = 0
    prev_target = 0
    while used < budget and len(active) > 1:
        m += 1
        eps = first_tolerance * 2.0 ** (1 - m)
        target = math.ceil(8.0 * sigma2 * math.log(2 * K * m * (m + 1) / delta_task) / eps**2)
        inc = max(target - prev_target, 1)
        prev_target = target
        remaining = budget - used
        if inc * len(active) > remaining:
            share, extra = divmod(remaining, len(active))
            plan = [share + (i < extra) for i in range(len(active))]
        else:
            plan = [inc] * len(active)
        for pos, n in zip(active, plan):
            if n <= 0:
                continue
            mu = means[pos]
            if noise.kind is NoiseKind.UNIFORM:
                x = n * mu + rng.uniform(-0.5, 0.5, size=n).sum()
            elif noise.kind is NoiseKind.BERNOULLI:
                x = float((rng.random(size=n) < mu).sum())
            else:
                x = n * mu
            sums[pos] += x
            counts[pos] += n
            used += n
            mean_sum += n * mu
        sampled = [a for a in active if counts[a] > 0]
        mu_hat = sums[sampled] / counts[sampled]
        leader = mu_hat.max()
        active = [a for a, u in zip(sampled, mu_hat) if u + eps / 2.0 >= leader - eps / 2.0]
    if exploit_leftover and used < budget:
        mu_hat = sums[active] / np.maximum(counts[active], 1.0)
        star = active[int(np.argmax(mu_hat))]
        n = budget - used
        counts[star] += n
        mean_sum += n * means[star]
        used = budget
    best = means.max()
    succeeded = all(means[a] >= best - 1e-12 for a in active)
    return BaiOutcome(
        surviving=Subset(tuple(a + 1 for a in sorted(active))),
        rounds_used=used,
        succeeded=succeeded,
        mean_sum=mean_sum,
        pulls=counts,
    )
