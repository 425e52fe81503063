"""Meta-level algorithms for bandit subset selection.

Abstract online submodular maximization (full-information and opaque-feedback
greedy expert rounds), their bandit instantiation over segments, the greedy
and elimination subset-selection learners driven by best-arm identification,
and the exponential-weights partial-monitoring learner.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .base import BaiOutcome, PolicyFactory, make_policy_factory, phased_elimination, regret_bound_B, run_base
from .core import NoiseModel, ResourceLimitError, RewardVector, Subset
from .experts import ExponentialWeights
from .game import CostTriple, ValueTable, saddle_point, solve_cost_to_go

GAMMA_MIN = 1e-6

SetFunction = Callable[[frozenset[int]], float]


def clamp_probability(x: float, lo: float = GAMMA_MIN) -> float:
    return min(1.0, max(lo, x))


def m_tilde(m: int, horizon: int) -> int:
    """Number of greedy experts: ceil(M ln N'), at least 1."""
    if m < 1 or horizon < 1:
        raise ValueError("M and N' must be >= 1")
    return max(1, math.ceil(m * math.log(horizon)))


def gamma_known(num_experts: int, num_arms: int, horizon: int) -> float:
    """Exploration probability with a known number of segments."""
    if min(num_experts, num_arms, horizon) < 1:
        raise ValueError("arguments must be >= 1")
    return clamp_probability((num_experts * num_arms * math.log(num_arms) / horizon) ** (1.0 / 3.0))


def gamma_anytime(num_experts: int, num_arms: int, n: int) -> float:
    """Anytime exploration probability; the horizon is replaced by the current
    segment index, so the schedule is non-increasing in n."""
    if min(num_experts, num_arms, n) < 1:
        raise ValueError("arguments must be >= 1")
    return clamp_probability((num_experts * num_arms * math.log(num_arms) / n) ** (1.0 / 3.0))


# ---------------------------------------------------------------------------
# greedy covers


def greedy_cover(knowledge: Sequence[Subset]) -> Subset:
    """Greedy hitting set: repeatedly add the arm covering the most uncovered
    sets (ties to the lowest arm index) until every set is hit."""
    for s in knowledge:
        if len(s) == 0:
            raise ValueError("cannot cover an empty set")
    uncovered = list(range(len(knowledge)))
    chosen: list[int] = []
    universe = sorted({a for s in knowledge for a in s})
    while uncovered:
        best_arm, best_count = None, 0
        for a in universe:
            if a in chosen:
                continue
            c = sum(1 for i in uncovered if a in knowledge[i])
            if c > best_count:
                best_arm, best_count = a, c
        chosen.append(best_arm)
        uncovered = [i for i in uncovered if best_arm not in knowledge[i]]
    return Subset(tuple(chosen))


def brute_force_cover_size(knowledge: Sequence[Subset]) -> int:
    """Smallest hitting set size by exhaustive search (test oracle)."""
    if not knowledge:
        return 0
    universe = sorted({a for s in knowledge for a in s})
    for size in range(1, len(universe) + 1):
        for combo in itertools.combinations(universe, size):
            cs = set(combo)
            if all(cs & set(s.arms) for s in knowledge):
                return size
    return len(universe)


# ---------------------------------------------------------------------------
# online greedy subset selection (abstract, exact set-function access)


@dataclass
class OgRound:
    actions: list[int]                 # expert choices in order
    played: frozenset[int]
    payoffs: list[np.ndarray]          # payoff vector delivered to each expert


def og_round(experts: Sequence[ExponentialWeights], g: SetFunction, rng: np.random.Generator) -> OgRound:
    """Full-information greedy round: every expert j sees the whole marginal
    gain vector of g on top of the prefix chosen by experts 1..j-1."""
    K = experts[0].num_actions
    choices = [e.advise(rng) for e in experts]
    payoffs = []
    prefix: set[int] = set()
    for j, e in enumerate(experts):
        base_val = g(frozenset(prefix)) if prefix else 0.0
        vec = np.array([g(frozenset(prefix | {a})) - base_val for a in range(1, K + 1)])
        payoffs.append(vec)
        e.update(vec)
        prefix.add(choices[j])
    return OgRound(actions=choices, played=frozenset(prefix), payoffs=payoffs)


@dataclass
class OgoRound:
    actions: list[int]
    played: frozenset[int]
    explored: bool
    expert_index: Optional[int]        # 1-based, set when exploring
    random_action: Optional[int]
    payoffs: list[np.ndarray]


def ogo_round(
    experts: Sequence[ExponentialWeights],
    gamma: float,
    g: SetFunction,
    rng: np.random.Generator,
) -> OgoRound:
    """Opaque-feedback greedy round. With probability gamma, a uniformly
    chosen expert i has its action replaced by a uniform arm a', the prefix
    set {a_1..a_{i-1}, a'} is played, and only expert i learns: a one-hot
    payoff g(played set) at a'. Otherwise the full expert set is played and
    everyone receives zeros."""
    K = experts[0].num_actions
    n_exp = len(experts)
    choices = [e.advise(rng) for e in experts]
    explored = rng.random() < gamma
    zero = np.zeros(K)
    payoffs = [zero] * n_exp
    if explored:
        i = int(rng.integers(n_exp)) + 1
        a_new = int(rng.integers(K)) + 1
        played = frozenset(choices[: i - 1]) | {a_new}
        vec = np.zeros(K)
        vec[a_new - 1] = g(played)
        payoffs = [vec if j == i - 1 else zero for j in range(n_exp)]
        for e, v in zip(experts, payoffs):
            e.update(v)
        return OgoRound(choices, played, True, i, a_new, payoffs)
    played = frozenset(choices)
    for e in experts:
        e.update(zero)
    return OgoRound(choices, played, False, None, None, payoffs)


def coverage_regret(
    g_history: Sequence[SetFunction],
    played: Sequence[frozenset[int]],
    m: int,
    num_arms: int,
) -> float:
    """(1 - 1/N') max_{|S|=m} sum_n g_n(S) - sum_n g_n(S_n), the comparator
    found by brute force."""
    n_rounds = len(g_history)
    if n_rounds == 0 or len(played) != n_rounds:
        raise ValueError("need one played set per round")
    if num_arms > 25 or math.comb(num_arms, m) > 2_000_000:
        raise ResourceLimitError(f"C({num_arms},{m}) too large to enumerate")
    best = -np.inf
    for combo in itertools.combinations(range(1, num_arms + 1), m):
        s = frozenset(combo)
        best = max(best, sum(g(s) for g in g_history))
    got = sum(g(s) for g, s in zip(g_history, played))
    return (1.0 - 1.0 / n_rounds) * best - got


# ---------------------------------------------------------------------------
# bandit instantiation of the opaque greedy learner


class Bog:
    """Greedy expert subset selection over bandit segments.

    Each segment, the experts propose a set. With the schedule's probability
    the segment explores: a random expert's slot is replaced by a random arm,
    the base policy runs on that prefix set, and the expert is credited the
    segment's average realized reward at the substituted arm (importance
    weighting happens implicitly through the uniform replacements). Otherwise
    the full proposed set is exploited and nobody learns.
    """

    def __init__(
        self,
        num_arms: int,
        m: int,
        horizon: int,
        noise: NoiseModel,
        schedule: str = "anytime",
        base: str = "moss",
        fixed_gamma: Optional[float] = None,
        num_experts: Optional[int] = None,
    ):
        self.num_arms = num_arms
        self.horizon = horizon
        self.noise = noise
        self.schedule = schedule
        self.fixed_gamma = fixed_gamma
        self.n_experts = num_experts or m_tilde(m, horizon)
        eta = None if schedule == "anytime" else math.sqrt(math.log(max(num_arms, 2)) / horizon)
        self.experts = [ExponentialWeights(num_arms, eta=eta) for _ in range(self.n_experts)]
        self.base_factory: PolicyFactory = make_policy_factory(base)
        self.segment = 0
        self.algo_id = "bog"

    def gamma(self) -> float:
        if self.fixed_gamma is not None:
            return self.fixed_gamma
        if self.schedule == "known":
            return gamma_known(self.n_experts, self.num_arms, self.horizon)
        return gamma_anytime(self.n_experts, self.num_arms, self.segment + 1)

    def run_task(self, rewards: RewardVector, tau: int, rng: np.random.Generator) -> float:
        self.segment += 1
        choices = [e.advise(rng) for e in self.experts]
        zero = np.zeros(self.num_arms)
        if rng.random() < self.gamma():
            i = int(rng.integers(self.n_experts)) + 1
            a_new = int(rng.integers(self.num_arms)) + 1
            played = Subset(tuple(set(choices[: i - 1]) | {a_new}))
            policy = self.base_factory(played, tau)
            out = run_base(policy, rewards, tau, self.noise, rng)
            vec = np.zeros(self.num_arms)
            vec[a_new - 1] = min(1.0, max(0.0, out.realized_sum / tau))
            for j, e in enumerate(self.experts):
                e.update(vec if j == i - 1 else zero)
        else:
            played = Subset(tuple(set(choices)))
            policy = self.base_factory(played, tau)
            out = run_base(policy, rewards, tau, self.noise, rng)
            for e in self.experts:
                e.update(zero)
        self._last_played = played
        return out.mean_sum

    def discovered_arms(self) -> Subset:
        return Subset(tuple({e.mode() for e in self.experts}))


# ---------------------------------------------------------------------------
# greedy BASS


def gbass_general_schedule(cover_size: int, num_arms: int, tau: int, n_tasks: int, c_b: float = 1.0) -> float:
    """Fixed-form exploration probability sqrt(|S| K tau / (N B(tau,K)))."""
    b = regret_bound_B(tau, num_arms, c_b)
    return clamp_probability(math.sqrt(max(cover_size, 1) * num_arms * tau / (n_tasks * b)))


class GBass:
    """Greedy bandit subset selection: explore runs best-arm identification on
    all arms and records the surviving set; exploit runs the base policy on
    the greedy cover of everything recorded. Exploration probability comes
    from the minimax game (default) or the fixed closed form."""

    def __init__(
        self,
        num_arms: int,
        m: int,
        n_tasks: int,
        tau: int,
        noise: NoiseModel,
        schedule: str = "dp",
        c_b: float = 1.0,
        base: str = "moss",
        bai_delta: float = 0.05,
        bai_first_tolerance: float = 0.5,
    ):
        self.num_arms = num_arms
        self.m = m
        self.n_tasks = n_tasks
        self.tau = tau
        self.noise = noise
        self.schedule = schedule
        self.c_b = c_b
        self.bai_delta = bai_delta
        self.bai_first_tolerance = bai_first_tolerance
        self.base_factory = make_policy_factory(base)
        self.table: Optional[ValueTable] = None
        if schedule == "dp":
            self.table = solve_cost_to_go(n_tasks, m, CostTriple.for_bandit(tau, num_arms, c_b))
        elif schedule != "formula":
            raise ValueError("schedule must be 'dp' or 'formula'")
        self.knowledge: list[Subset] = []
        self.cover = Subset(())
        self.n = 0
        self.explore_count = 0
        self.size_violations: list[int] = []
        self.algo_id = "gbass"

    @property
    def state(self) -> int:
        return min(self.m, len(self.cover))

    def exploration_probability(self) -> float:
        if self.schedule == "dp":
            n = min(self.n, self.n_tasks - 1)
            return saddle_point(self.table, n, self.state)[0]
        if self.state >= self.m:
            return 0.0
        return gbass_general_schedule(len(self.cover), self.num_arms, self.tau, self.n_tasks, self.c_b)

    def run_task(self, rewards: RewardVector, tau: int, rng: np.random.Generator) -> float:
        explore = self.n == 0 or rng.random() < self.exploration_probability()
        if explore:
            self.explore_count += 1
            out = phased_elimination(
                rewards,
                tau,
                self.bai_delta / self.n_tasks,
                self.noise,
                rng,
                first_tolerance=self.bai_first_tolerance,
            )
            self.knowledge.append(out.surviving)
            self.cover = greedy_cover(self.knowledge)
            # hitting invariant, and the greedy size guarantee the schedule relies on
            assert all(self.cover.intersects(s) for s in self.knowledge)
            if len(self.cover) > self.m * (1.0 + math.log(max(self.explore_count, 1))) + 1e-9:
                self.size_violations.append(self.n)
            mean_sum = out.mean_sum
        else:
            policy = self.base_factory(self.cover, tau)
            mean_sum = run_base(policy, rewards, tau, self.noise, rng).mean_sum
        self.n += 1
        return mean_sum

    def discovered_arms(self) -> Subset:
        return self.cover


# ---------------------------------------------------------------------------
# elimination BASS


def ebass_schedule(tau: int, num_arms: int, n_tasks: int) -> float:
    """Constant exploration probability (tau/K)^(1/4) sqrt(ln K / N)."""
    if min(tau, num_arms, n_tasks) < 1:
        raise ValueError("arguments must be >= 1")
    return clamp_probability((tau / num_arms) ** 0.25 * math.sqrt(math.log(num_arms) / n_tasks))


def all_m_subsets(num_arms: int, m: int, guard: int = 1_000_000) -> list[frozenset[int]]:
    """All size-m subsets of [K] in lexicographic order (shared by the
    elimination learner and the partial-monitoring learner)."""
    count = math.comb(num_arms, m)
    if count > guard:
        raise ResourceLimitError(f"C({num_arms},{m})={count} hypotheses exceed the guard {guard}")
    return [frozenset(c) for c in itertools.combinations(range(1, num_arms + 1), m)]


class EBass:
    """Elimination-based subset selection: hypotheses are all M-subsets;
    explore rounds identify the task's optimal arms and drop every hypothesis
    that misses them; exploit rounds play a uniformly sampled survivor."""

    def __init__(
        self,
        num_arms: int,
        m: int,
        n_tasks: int,
        tau: int,
        noise: NoiseModel,
        base: str = "moss",
        bai_delta: float = 0.05,
        bai_first_tolerance: float = 0.5,
        p: Optional[float] = None,
    ):
        self.num_arms = num_arms
        self.m = m
        self.n_tasks = n_tasks
        self.noise = noise
        self.base_factory = make_policy_factory(base)
        self.bai_delta = bai_delta
        self.bai_first_tolerance = bai_first_tolerance
        self.p = p if p is not None else ebass_schedule(tau, num_arms, n_tasks)
        self.hypotheses = all_m_subsets(num_arms, m)
        self.observed: list[Subset] = []
        self.reset_events: list[int] = []
        self.n = 0
        self.algo_id = "ebass"

    def filter_hypotheses(self, optimal: Subset) -> None:
        opt = set(optimal.arms)
        kept = [h for h in self.hypotheses if h & opt]
        if not kept:
            # only reachable when identification failed on a non-realizable run
            self.reset_events.append(self.n)
            kept = all_m_subsets(self.num_arms, self.m)
        self.hypotheses = kept

    def run_task(self, rewards: RewardVector, tau: int, rng: np.random.Generator) -> float:
        explore = self.n == 0 or rng.random() < self.p
        if explore:
            out = phased_elimination(
                rewards,
                tau,
                self.bai_delta / self.n_tasks,
                self.noise,
                rng,
                first_tolerance=self.bai_first_tolerance,
            )
            self.observed.append(out.surviving)
            self.filter_hypotheses(out.surviving)
            mean_sum = out.mean_sum
        else:
            pick = self.hypotheses[int(rng.integers(len(self.hypotheses)))]
            policy = self.base_factory(Subset(tuple(pick)), tau)
            mean_sum = run_base(policy, rewards, tau, self.noise, rng).mean_sum
        self.n += 1
        return mean_sum

    def discovered_arms(self) -> Subset:
        arms: set[int] = set()
        for s in self.observed:
            arms |= set(s.arms)
        return Subset(tuple(arms))


# ---------------------------------------------------------------------------
# exponential-weights partial monitoring


def ewa_pm_tuning(mode: str, costs: CostTriple, n_tasks: int, num_meta_actions: int) -> tuple[float, float]:
    """Closed-form (p, eta) for the partial-monitoring learner.

    Agnostic: p = ((c_miss^2 ln Z)/(c_info^2 N))^(1/3),
              eta = ((ln^2 Z)/(c_info c_miss^2 N^2))^(1/3).
    Realizable: p = sqrt(c_miss ln Z / (c_info N)), eta = 1.
    """
    logz = math.log(max(num_meta_actions, 2))
    if mode == "agnostic":
        p = (costs.c_miss**2 * logz / (costs.c_info**2 * n_tasks)) ** (1.0 / 3.0)
        eta = (logz**2 / (costs.c_info * costs.c_miss**2 * n_tasks**2)) ** (1.0 / 3.0)
    elif mode == "realizable":
        p = math.sqrt(costs.c_miss * logz / (costs.c_info * n_tasks))
        eta = 1.0
    else:
        raise ValueError("mode must be 'agnostic' or 'realizable'")
    return clamp_probability(p), eta


class EwaPmState:
    """Game-level state: exponential weights over the M-subset meta-actions,
    driven by importance-weighted cost estimates revealed on explore rounds."""

    def __init__(self, subsets: Sequence[frozenset[int]], costs: CostTriple, p: float, eta: float):
        self.subsets = list(subsets)
        self.costs = costs
        self.p = p
        self.eta = eta
        self.cum_cost = np.zeros(len(self.subsets))

    def weights(self) -> np.ndarray:
        z = -self.eta * self.cum_cost
        z -= z.max()
        w = np.exp(z)
        return w / w.sum()

    def cost_vector(self, optimal: frozenset[int]) -> np.ndarray:
        hit = self.costs.hit(len(self.subsets[0]))
        return np.array([hit if s & optimal else self.costs.c_miss for s in self.subsets])

    def observe(self, optimal: frozenset[int]) -> np.ndarray:
        """Explore-round update: estimated costs (C_i - c_hit)/p."""
        hit = self.costs.hit(len(self.subsets[0]))
        chat = (self.cost_vector(optimal) - hit) / self.p
        self.cum_cost += chat
        return chat

    def sample(self, rng: np.random.Generator) -> int:
        w = self.weights()
        i = int(np.searchsorted(np.cumsum(w), rng.random()))
        return min(i, len(self.subsets) - 1)

    def round(self, optimal: frozenset[int], rng: np.random.Generator) -> float:
        """One abstract game round; returns the cost incurred."""
        if rng.random() < self.p:
            self.observe(optimal)
            return self.costs.c_info
        i = self.sample(rng)
        hit = self.costs.hit(len(self.subsets[0]))
        return hit if self.subsets[i] & optimal else self.costs.c_miss


class EwaPm:
    """Bandit instantiation of the partial-monitoring learner: explore rounds
    identify the optimal arms with BAI (paying real regret), exploit rounds
    play the subset sampled from the exponential weights."""

    def __init__(
        self,
        num_arms: int,
        m: int,
        n_tasks: int,
        tau: int,
        noise: NoiseModel,
        mode: str = "realizable",
        c_b: float = 1.0,
        base: str = "moss",
        bai_delta: float = 0.05,
        bai_first_tolerance: float = 0.5,
    ):
        subsets = all_m_subsets(num_arms, m)
        costs = CostTriple(
            c_info=regret_bound_B(tau, num_arms, c_b),
            c_hit=regret_bound_B(tau, m, c_b),
            c_miss=float(tau),
        )
        p, eta = ewa_pm_tuning(mode, costs, n_tasks, len(subsets))
        self.state = EwaPmState(subsets, costs, p, eta)
        self.num_arms = num_arms
        self.m = m
        self.n_tasks = n_tasks
        self.noise = noise
        self.base_factory = make_policy_factory(base)
        self.bai_delta = bai_delta
        self.bai_first_tolerance = bai_first_tolerance
        self.observed: list[Subset] = []
        self.n = 0
        self.algo_id = "ewapm"

    def run_task(self, rewards: RewardVector, tau: int, rng: np.random.Generator) -> float:
        explore = self.n == 0 or rng.random() < self.state.p
        if explore:
            out = phased_elimination(
                rewards,
                tau,
                self.bai_delta / self.n_tasks,
                self.noise,
                rng,
                first_tolerance=self.bai_first_tolerance,
            )
            self.observed.append(out.surviving)
            self.state.observe(frozenset(out.surviving.arms))
            mean_sum = out.mean_sum
        else:
            pick = self.state.subsets[self.state.sample(rng)]
            policy = self.base_factory(Subset(tuple(pick)), tau)
            mean_sum = run_base(policy, rewards, tau, self.noise, rng).mean_sum
        self.n += 1
        return mean_sum

    def discovered_arms(self) -> Subset:
        arms: set[int] = set()
        for s in self.observed:
            arms |= set(s.arms)
        return Subset(tuple(arms))


# ---------------------------------------------------------------------------
# meta-level G-BASS tracker (oracle identification); the oblivious adversary's
# imaginary learner


class GbassTracker:
    """G-BASS's meta-level decisions only: greedy covers of observed optimal
    sets and the minimax exploration schedule, with identification assumed
    exact. Consumes no rewards."""

    def __init__(self, num_arms: int, m: int, n_tasks: int, tau: int, c_b: float = 1.0):
        self.m = m
        self.n_tasks = n_tasks
        self.table = solve_cost_to_go(n_tasks, m, CostTriple.for_bandit(tau, num_arms, c_b))
        self.knowledge: list[Subset] = []
        self.cover = Subset(())
        self.n = 0

    @property
    def state(self) -> int:
        return min(self.m, len(self.cover))

    def wants_explore(self, rng: np.random.Generator) -> bool:
        if self.n == 0:
            return True
        n = min(self.n, self.n_tasks - 1)
        return rng.random() < saddle_point(self.table, n, self.state)[0]

    def observe(self, optimal: Subset) -> None:
        self.knowledge.append(optimal)
        self.cover = greedy_cover(self.knowledge)

    def advance(self) -> None:
        self.n += 1

    def discovered_arms(self) -> Subset:
        return self.cover
