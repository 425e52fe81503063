"""Minimax cost-to-go game between the learner (explore or exploit) and an
adversary that may reveal a new optimal arm.

State s counts discovered optimal arms. Backward induction fills V[n][s],
the saddle probabilities (p, q) and the marginal knowledge value
G[n][s] = V[n][s] - V[n][s+1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

CostOfState = Union[float, Callable[[int], float]]


@dataclass(frozen=True)
class CostTriple:
    """Costs of the meta-game: exploring, exploiting a covering subset, missing.

    c_hit may depend on the cover size s (a bandit run on s arms); c_info and
    c_miss are scalars. Requires c_hit(s) <= c_info <= c_miss.
    """

    c_info: float
    c_hit: CostOfState
    c_miss: float

    def hit(self, s: int) -> float:
        if callable(self.c_hit):
            return float(self.c_hit(s))
        return float(self.c_hit)

    @classmethod
    def for_bandit(cls, tau: int, num_arms: int, c_b: float = 1.0) -> "CostTriple":
        """Costs of a tau-step task: c_info = B(tau, K), c_hit(s) = B(tau, s),
        c_miss = tau (a whole task lost)."""
        return cls(
            c_info=c_b * math.sqrt(num_arms * tau),
            c_hit=lambda s, _t=tau, _c=c_b: _c * math.sqrt(max(s, 1) * _t),
            c_miss=float(tau),
        )


@dataclass(frozen=True)
class ValueTable:
    """Solved cost-to-go table. V, P, Q, G are (N+1) x (M+1) arrays;
    P/Q/G are meaningful for n < N, s < M."""

    N: int
    M: int
    costs: CostTriple
    V: np.ndarray
    P: np.ndarray
    Q: np.ndarray

    @property
    def G(self) -> np.ndarray:
        G = np.zeros_like(self.V)
        G[:, : self.M] = self.V[:, : self.M] - self.V[:, 1 : self.M + 1]
        return G


def solve_cost_to_go(N: int, M: int, costs: CostTriple) -> ValueTable:
    """Backward induction for the minimax game.

    V[N][s] = 0; V[n][M] = (N-n) * c_hit(M); and for s < M
    V[n][s] = V[n+1][s] + c_hit(s)
              + (c_info - c_hit(s)) (c_miss - c_hit(s)) / (c_miss - c_hit(s) + G[n+1][s]).
    """
    if N < 1 or M < 1:
        raise ValueError("need N >= 1 and M >= 1")
    hits = np.array([costs.hit(s) for s in range(M + 1)])
    if (hits[: M + 1].max() > costs.c_info + 1e-12) or (costs.c_info > costs.c_miss + 1e-12):
        raise ValueError(
            f"cost order violated: need c_hit(s) <= c_info <= c_miss, got "
            f"max c_hit={hits.max():.6g}, c_info={costs.c_info:.6g}, c_miss={costs.c_miss:.6g}"
        )
    V = np.zeros((N + 1, M + 1))
    P = np.zeros((N + 1, M + 1))
    Q = np.zeros((N + 1, M + 1))
    s_idx = np.arange(M)
    for n in range(N - 1, -1, -1):
        V[n, M] = V[n + 1, M] + hits[M]
        G_next = V[n + 1, s_idx] - V[n + 1, s_idx + 1]
        denom = costs.c_miss - hits[s_idx] + G_next
        V[n, s_idx] = V[n + 1, s_idx] + hits[s_idx] + (costs.c_info - hits[s_idx]) * (
            costs.c_miss - hits[s_idx]
        ) / denom
        P[n, s_idx] = (costs.c_miss - hits[s_idx]) / denom
        Q[n, s_idx] = (costs.c_info - hits[s_idx]) / denom
    return ValueTable(N=N, M=M, costs=costs, V=V, P=P, Q=Q)


def saddle_point(table: ValueTable, n: int, s: int) -> tuple[float, float]:
    """Saddle probabilities (p, q) at round n with s discovered arms.

    At s = M neither side moves: the learner stops exploring and the adversary
    has no new arm to reveal.
    """
    if not 0 <= n < table.N:
        raise ValueError(f"round {n} outside [0, {table.N})")
    if not 0 <= s <= table.M:
        raise ValueError(f"state {s} outside [0, {table.M}]")
    if s == table.M:
        return 0.0, 0.0
    return float(table.P[n, s]), float(table.Q[n, s])


def game_objective_L(p: float, q: float, table: ValueTable, n: int, s: int) -> float:
    """The one-round min-max objective at (n, s), single-new-arm adversary.

    L(q, p) = c_hit + p (c_info - c_hit) + V[n+1][s]
              + q (1-p) (c_miss - c_hit) - p q G[n+1][s]
    """
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValueError("p and q must be probabilities")
    h = table.costs.hit(s)
    G_next = table.V[n + 1, s] - table.V[n + 1, s + 1] if s < table.M else 0.0
    return (
        h
        + p * (table.costs.c_info - h)
        + table.V[n + 1, s]
        + q * (1.0 - p) * (table.costs.c_miss - h)
        - p * q * G_next
    )


@dataclass(frozen=True)
class GBoundReport:
    holds: bool
    max_ratio: float          # max over (n, s) of G / bound, bound > 0
    worst_n: int
    worst_s: int
    telescoping_error: float  # relative error of sum_s G[0][s] vs V[0][0] - V[0][M]
    ordering_holds: bool      # V[n][s] - V[n][s+j] increasing in j (all G >= 0)


def check_G_bound(table: ValueTable, tol: float = 1e-9) -> GBoundReport:
    """Verify G[n][s] <= sqrt(2 (c_info - c_hit(s)) (c_miss - c_hit(s)) (N-n)),
    the telescoping identity, and the gap ordering the saddle derivation assumes."""
    N, M = table.N, table.M
    G = table.G
    max_ratio, worst = 0.0, (N, 0)
    holds = True
    for n in range(N + 1):
        for s in range(M):
            a = table.costs.c_info - table.costs.hit(s)
            b = table.costs.c_miss - table.costs.hit(s)
            bound = math.sqrt(2.0 * a * b * (N - n))
            g = G[n, s]
            if bound > 0:
                ratio = g / bound
                if ratio > max_ratio:
                    max_ratio, worst = ratio, (n, s)
                if g > bound * (1 + tol):
                    holds = False
            elif g > tol * table.costs.c_miss:
                holds = False
                worst = (n, s)
    span = table.V[0, 0] - table.V[0, M]
    tel = abs(G[0, :M].sum() - span) / max(abs(span), 1.0)
    ordering = bool((G >= -tol * max(table.costs.c_miss, 1.0)).all())
    return GBoundReport(
        holds=holds and tel <= tol and ordering,
        max_ratio=max_ratio,
        worst_n=worst[0],
        worst_s=worst[1],
        telescoping_error=tel,
        ordering_holds=ordering,
    )
