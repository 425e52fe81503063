import math

import numpy as np
import pytest

from bss.experts import ExponentialWeights, expert_regret


class TestSampling:
    def test_fresh_state_is_uniform(self):
        rng = np.random.default_rng(0)
        e = ExponentialWeights(5)
        counts = np.zeros(5)
        for _ in range(10_000):
            counts[e.advise(rng) - 1] += 1
        freqs = counts / counts.sum()
        assert np.all(np.abs(freqs - 0.2) < 0.02)

    def test_two_to_one_weights(self):
        rng = np.random.default_rng(1)
        e = ExponentialWeights(2, eta=math.log(2))
        e.cumulative[:] = (1.0, 0.0)
        counts = np.zeros(2)
        for _ in range(10_000):
            counts[e.advise(rng) - 1] += 1
        freqs = counts / counts.sum()
        assert abs(freqs[0] - 2 / 3) < 0.02
        assert abs(freqs[1] - 1 / 3) < 0.02

    def test_single_action(self):
        rng = np.random.default_rng(2)
        e = ExponentialWeights(1)
        assert all(e.advise(rng) == 1 for _ in range(20))

    def test_probabilities_normalized(self):
        rng = np.random.default_rng(3)
        e = ExponentialWeights(6)
        for _ in range(200):
            e.update(rng.random(6))
            p = e.probabilities()
            assert np.all(p > 0)
            assert abs(p.sum() - 1.0) <= 1e-12

    def test_label_permutation_symmetry(self):
        e1 = ExponentialWeights(4, eta=0.5)
        e2 = ExponentialWeights(4, eta=0.5)
        perm = [2, 0, 3, 1]
        payoff = np.array([0.9, 0.1, 0.4, 0.7])
        e1.update(payoff)
        e2.update(payoff[perm])
        assert np.allclose(e1.probabilities()[perm], e2.probabilities())


class TestUpdate:
    def test_zero_payoff_is_noop_for_distribution(self):
        e = ExponentialWeights(3)
        before = e.probabilities().copy()
        e.update(np.zeros(3))
        assert np.allclose(e.probabilities(), before)

    def test_concentration_on_repeated_winner(self):
        e = ExponentialWeights(4)
        one_hot = np.array([1.0, 0, 0, 0])
        for _ in range(1000):
            e.update(one_hot)
        assert e.probabilities()[0] >= 0.99

    def test_fixed_eta_additivity(self):
        a = ExponentialWeights(2, eta=0.3)
        b = ExponentialWeights(2, eta=0.3)
        a.update([0.2, 0.7])
        a.update([0.5, 0.1])
        b.update([0.7, 0.8])
        assert np.allclose(a.probabilities(), b.probabilities())

    def test_out_of_range_payoff_rejected(self):
        e = ExponentialWeights(2)
        with pytest.raises(ValueError):
            e.update([0.5, 1.5])
        with pytest.raises(ValueError):
            e.update([-0.2, 0.5])


class TestRegret:
    def test_best_fixed_action_has_zero_regret(self):
        payoffs = [[1.0, 0.0], [1.0, 0.2], [0.9, 0.1]]
        assert expert_regret(payoffs, [1, 1, 1]) == pytest.approx(0.0)

    def test_single_round(self):
        assert expert_regret([[1.0, 0.0]], [2]) == pytest.approx(1.0)

    def test_alternating_stream_regret(self):
        # payoff alternates between two leaders; average regret stays under
        # 2 sqrt(v ln K) across seeds
        v, k, seeds = 10_000, 10, 50
        bound = 2.0 * math.sqrt(v * math.log(k))
        block = np.zeros((2, k))
        block[0, 0] = 1.0
        block[1, 1] = 1.0
        total = 0.0
        for seed in range(seeds):
            rng = np.random.default_rng((41, seed))
            e = ExponentialWeights(k)
            actions = np.empty(v, dtype=int)
            payoffs = np.empty((v, k))
            for n in range(v):
                actions[n] = e.advise(rng)
                x = block[n % 2]
                e.update(x)
                payoffs[n] = x
            total += expert_regret(payoffs, actions)
        assert total / seeds <= bound

    def test_regret_bound_survives_random_streams(self):
        # property surrogate: regret <= 2 sqrt(v ln K) + sqrt(v) on most seeds
        v, k, seeds = 2000, 6, 40
        bound = 2.0 * math.sqrt(v * math.log(k)) + math.sqrt(v)
        ok = 0
        for seed in range(seeds):
            rng = np.random.default_rng((43, seed))
            e = ExponentialWeights(k)
            actions = np.empty(v, dtype=int)
            payoffs = (rng.random((v, k)) < 0.5).astype(float)
            for n in range(v):
                actions[n] = e.advise(rng)
                e.update(payoffs[n])
            ok += expert_regret(payoffs, actions) <= bound
        assert ok >= math.ceil(0.95 * seeds)
