"""Full-information exponential-weights expert over the K arms.

Payoffs are rewards in [0, 1] to be maximized; the sampling distribution is
the softmax of cumulative payoffs at the current learning rate. Default mode
is anytime (eta_t = sqrt(ln K / t)); a fixed rate is used when the horizon
is known.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np


class ExponentialWeights:
    def __init__(self, num_actions: int, eta: Optional[float] = None):
        """``eta=None`` selects the anytime rate sqrt(ln K / t)."""
        if num_actions < 1:
            raise ValueError("need at least one action")
        self.num_actions = num_actions
        self.fixed_eta = eta
        self.cumulative = np.zeros(num_actions)
        self.rounds_seen = 0

    @property
    def eta(self) -> float:
        if self.fixed_eta is not None:
            return self.fixed_eta
        t = max(self.rounds_seen, 1)
        return math.sqrt(math.log(max(self.num_actions, 2)) / t)

    def probabilities(self) -> np.ndarray:
        z = self.eta * self.cumulative
        z -= z.max()
        w = np.exp(z)
        return w / w.sum()

    def advise(self, rng: np.random.Generator) -> int:
        """Sample a 1-based action from the current distribution."""
        if self.num_actions == 1:
            return 1
        p = self.probabilities()
        pos = int(np.searchsorted(np.cumsum(p), rng.random()))
        return min(pos, self.num_actions - 1) + 1

    def update(self, payoff: Sequence[float]) -> None:
        """Accumulate one payoff vector (entries in [0, 1])."""
        x = np.asarray(payoff, dtype=float)
        if x.shape != (self.num_actions,):
            raise ValueError(f"payoff must have length {self.num_actions}")
        if (x < -1e-12).any() or (x > 1.0 + 1e-12).any():
            raise ValueError("payoff entries must lie in [0, 1]; scale before updating")
        self.cumulative += x
        self.rounds_seen += 1

    def mode(self) -> int:
        """1-based action with the highest cumulative payoff (ties to lowest)."""
        return int(np.argmax(self.cumulative)) + 1


def expert_regret(payoffs: Sequence[Sequence[float]], actions: Sequence[int]) -> float:
    """Realized regret of 1-based action choices against the best fixed action
    in hindsight: max_a sum_n x_n[a] - sum_n x_n[a_n]."""
    X = np.asarray(payoffs, dtype=float)
    if X.ndim != 2 or len(actions) != X.shape[0]:
        raise ValueError("need one action per payoff vector")
    got = sum(X[n, a - 1] for n, a in enumerate(actions))
    return float(X.sum(axis=0).max() - got)
