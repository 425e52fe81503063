import json
import math

import numpy as np
import pytest

from bss.core import Subset
from bss.envgen import (
    AdversaryMode,
    EnvConfig,
    EnvConfigError,
    GapMode,
    TaskStream,
    dump_sequence,
    gen_sequence,
    min_gap,
    sample_optimal_pool,
)


class TestConfig:
    def test_delta_defaults_to_inverse_horizon(self):
        cfg = EnvConfig(num_arms=5, m=2, n_tasks=100, tau=50)
        assert cfg.delta == pytest.approx(1.0 / (100 * 50))

    def test_validation(self):
        with pytest.raises(EnvConfigError):
            EnvConfig(num_arms=3, m=4, n_tasks=10, tau=10)
        with pytest.raises(EnvConfigError):
            EnvConfig(num_arms=3, m=1, n_tasks=10, tau=10, delta=1.5)


class TestMinGap:
    def test_direct_value(self):
        cfg = EnvConfig(num_arms=4, m=1, n_tasks=100, tau=1000, delta=0.01)
        assert min_gap(cfg) == pytest.approx(0.19194, abs=1e-4)

    def test_single_arm_formula(self):
        cfg = EnvConfig(num_arms=1, m=1, n_tasks=100, tau=1000, delta=0.01)
        assert min_gap(cfg) == pytest.approx(math.sqrt(math.log(10**4) / 1000), rel=1e-9)

    def test_vanishes_with_long_tasks(self):
        cfg = EnvConfig(num_arms=4, m=1, n_tasks=100, tau=10**12, delta=0.01)
        assert min_gap(cfg) < 1e-3

    def test_clipped_at_half(self):
        cfg = EnvConfig(num_arms=30, m=5, n_tasks=100, tau=50, delta=0.01)
        assert min_gap(cfg) == 0.5


class TestOptimalPool:
    def test_forced_full_set(self):
        cfg = EnvConfig(num_arms=3, m=3, n_tasks=5, tau=5)
        assert sample_optimal_pool(cfg, np.random.default_rng(0)).arms == (1, 2, 3)

    def test_inclusion_frequency(self):
        cfg = EnvConfig(num_arms=30, m=10, n_tasks=5, tau=5)
        rng = np.random.default_rng(1)
        counts = np.zeros(30)
        trials = 10_000
        for _ in range(trials):
            for a in sample_optimal_pool(cfg, rng):
                counts[a - 1] += 1
        freqs = counts / trials
        assert np.all(np.abs(freqs - 1 / 3) < 0.02)

    def test_two_arm_coin(self):
        cfg = EnvConfig(num_arms=2, m=1, n_tasks=5, tau=5)
        rng = np.random.default_rng(2)
        ones = sum(sample_optimal_pool(cfg, rng).arms == (1,) for _ in range(10_000))
        assert abs(ones / 10_000 - 0.5) < 0.02


class TestGenTask:
    def test_singleton_pool_forces_argmax(self):
        cfg = EnvConfig(num_arms=4, m=1, n_tasks=200, tau=10, master_seed=3)
        stream = TaskStream(cfg)
        arm = stream.pool.arms[0]
        for _ in range(200):
            rewards, opt = stream.next_task()
            assert opt.arms == (arm,)
            assert int(np.argmax(rewards.values)) + 1 == arm

    def test_min_gap_holds_in_every_task(self):
        cfg = EnvConfig(num_arms=6, m=2, n_tasks=10_000, tau=400, gap=GapMode.MIN_GAP, master_seed=4)
        gap = min_gap(cfg)
        stream = TaskStream(cfg)
        for _ in range(10_000):
            rewards, opt = stream.next_task()
            vals = np.asarray(rewards.values)
            star = vals[opt.arms[0] - 1]
            others = np.delete(vals, opt.arms[0] - 1)
            assert star - others.max() >= gap - 1e-12

    def test_no_gap_keeps_a_near_tie(self):
        cfg = EnvConfig(num_arms=6, m=2, n_tasks=2000, tau=400, gap=GapMode.NO_GAP, master_seed=5)
        gap = min_gap(cfg)
        stream = TaskStream(cfg)
        for _ in range(2000):
            rewards, opt = stream.next_task()
            vals = np.asarray(rewards.values)
            star = vals[opt.arms[0] - 1]
            others = np.delete(vals, opt.arms[0] - 1)
            assert others.max() > star - gap - 1e-12
            assert others.max() <= star

    def test_realizability_in_all_modes(self):
        for mode in AdversaryMode:
            cfg = EnvConfig(num_arms=7, m=3, n_tasks=300, tau=100, mode=mode, master_seed=6)
            stream = TaskStream(cfg)
            pool = set(stream.pool.arms)
            learner = Subset((1, 2))
            for _ in range(300):
                feedback = learner if mode is AdversaryMode.NON_OBLIVIOUS else None
                rewards, opt = stream.next_task(feedback)
                assert set(opt.arms) <= pool
                assert int(np.argmax(rewards.values)) + 1 in pool

    def test_non_oblivious_with_full_knowledge_stays_inside(self):
        cfg = EnvConfig(num_arms=6, m=2, n_tasks=200, tau=100, mode=AdversaryMode.NON_OBLIVIOUS, master_seed=7)
        stream = TaskStream(cfg)
        pool = stream.pool
        for _ in range(200):
            _, opt = stream.next_task(pool)  # learner already knows the pool
            assert opt.arms[0] in pool


class TestGenSequence:
    def test_single_task(self):
        cfg = EnvConfig(num_arms=4, m=2, n_tasks=1, tau=9)
        seq, opts, pool = gen_sequence(cfg)
        assert len(seq) == 1 and len(opts) == 1
        assert seq.tasks[0].length == 9

    def test_oblivious_replay_bit_identical(self):
        cfg = EnvConfig(num_arms=6, m=2, n_tasks=50, tau=30, mode=AdversaryMode.OBLIVIOUS, master_seed=11)
        seq1, opts1, _ = gen_sequence(cfg)
        seq2, opts2, _ = gen_sequence(cfg)
        assert all(a.rewards.values == b.rewards.values for a, b in zip(seq1.tasks, seq2.tasks))
        assert [o.arms for o in opts1] == [o.arms for o in opts2]

    def test_stochastic_pool_frequencies(self):
        cfg = EnvConfig(num_arms=12, m=10, n_tasks=10_000, tau=5, master_seed=12)
        _, opts, pool = gen_sequence(cfg)
        counts = {a: 0 for a in pool.arms}
        for o in opts:
            counts[o.arms[0]] += 1
        for a, c in counts.items():
            assert abs(c / 10_000 - 0.1) < 0.02

    def test_non_oblivious_requires_feedback(self):
        cfg = EnvConfig(num_arms=4, m=2, n_tasks=5, tau=5, mode=AdversaryMode.NON_OBLIVIOUS)
        with pytest.raises(ValueError):
            gen_sequence(cfg)
        seq, _, _ = gen_sequence(cfg, feedback=lambda: Subset((1,)))
        assert len(seq) == 5

    def test_dump_round_trip(self, tmp_path):
        cfg = EnvConfig(num_arms=3, m=1, n_tasks=4, tau=6, master_seed=13)
        seq, opts, _ = gen_sequence(cfg)
        path = tmp_path / "seq.jsonl"
        dump_sequence(str(path), seq, opts)
        rows = [json.loads(line) for line in path.read_text().splitlines()]
        assert [r["n"] for r in rows] == [1, 2, 3, 4]
        for row, task, opt in zip(rows, seq.tasks, opts):
            assert row["tau"] == 6
            assert row["r"] == pytest.approx(list(task.rewards.values))
            assert row["opt"] == list(opt.arms)
