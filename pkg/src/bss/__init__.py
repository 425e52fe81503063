"""Bandit subset selection: algorithms, the minimax exploration game, and a
reproducible experiment harness."""

__version__ = "0.1.0"

from .base import BaiOutcome, EXP3Policy, MOSSPolicy, UCBPolicy, phased_elimination, regret_bound_B, run_base
from .core import (
    NoiseKind,
    NoiseModel,
    RegretTrace,
    ResourceLimitError,
    RewardVector,
    Subset,
    Task,
    TaskSequence,
    best_m_subset,
    check_submodular_monotone,
    f_max,
    pseudo_regret,
    sample_reward,
)
from .envgen import AdversaryMode, EnvConfig, GapMode, TaskStream, gen_sequence, min_gap, sample_optimal_pool
from .experts import ExponentialWeights, expert_regret
from .game import CostTriple, GBoundReport, ValueTable, check_G_bound, game_objective_L, saddle_point, solve_cost_to_go
from .harness import AlgorithmSpec, RunConfig, SweepSpec, load_config, run_experiment, run_sweep
from .meta import (
    Bog,
    EBass,
    EwaPm,
    EwaPmState,
    GBass,
    coverage_regret,
    ebass_schedule,
    ewa_pm_tuning,
    gamma_anytime,
    gamma_known,
    greedy_cover,
    m_tilde,
    og_round,
    ogo_round,
)
