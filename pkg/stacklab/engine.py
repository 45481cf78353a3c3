"""
Repeated Stackelberg Game Engine
Runs the four-step round protocol (leader acts, follower observes and
responds, both receive rewards, both update) and aggregates regret and
convergence statistics across seeded runs.
"""

import json
import logging
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .config import (
    FollowerSpec, GameSource, LeaderSpec, SimConfig, resolve_delta,
)
from .exceptions import ConfigError
from .followers import (
    FOLLOWER_REGISTRY, BaseFollower, FmucbFollower, fbm_solve, pessimistic_fbm_solve,
)
from .game import gap_profile, sample_reward, stackelberg_equilibrium, best_response_function
from .learners import BaseLeader, Exp3Leader, UcbeLeader, UcbLeader, default_s0
from .models import (
    ActionPair, GameInstance, GapProfile, InformationSetting, ManipulationPlan, NoiseMode,
    Player, RoundRecord, RunMetrics, SERIES_METRICS, TraceGranularity,
)
from .rng import FOLLOWER_REWARD, LEADER_REWARD, LEADER_SAMPLE, spawn_streams

logger = logging.getLogger(__name__)

MANIPULATORS = ("fbm", "fmucb", "fbm_pessimistic")


# ============================================================================
# Ground truth
# ============================================================================

@dataclass(frozen=True)
class GroundTruth:
    """Oracle quantities a run is measured against."""
    game: GameInstance
    gaps: GapProfile
    se_pair: ActionPair
    best_response: np.ndarray
    reference_response: np.ndarray
    target: ActionPair
    oracle_plan: Optional[ManipulationPlan] = None


def ground_truth(game: GameInstance, follower_strategy: str) -> GroundTruth:
    """
    Manipulating followers are measured against the best manipulation plan
    (the pessimistic one for fbm_pessimistic); everything else against the SE.
    """
    se = stackelberg_equilibrium(game).pair
    br = np.asarray(best_response_function(game).map)
    plan = None
    if follower_strategy == "fbm_pessimistic":
        plan = pessimistic_fbm_solve(game)
    elif follower_strategy in MANIPULATORS:
        plan = fbm_solve(game)
    return GroundTruth(
        game=game,
        gaps=gap_profile(game),
        se_pair=se,
        best_response=br,
        reference_response=np.asarray(plan.response.map) if plan else br,
        target=plan.target if plan else se,
        oracle_plan=plan,
    )


# ============================================================================
# Learner construction
# ============================================================================

def build_leader(spec: LeaderSpec, game: GameInstance, horizon: int, schedule: str,
                 gaps: GapProfile, follower_strategy: str) -> BaseLeader:
    delta = resolve_delta(spec.delta, horizon)
    if spec.algorithm == "exp3":
        alpha, eta = spec.exp3_parameters(horizon, schedule)
        return Exp3Leader(game.A, alpha=alpha, eta=eta)
    if spec.algorithm == "ucbe":
        s0 = spec.s0
        if s0 is None:
            epsilon = spec.epsilon
            if epsilon is None:
                epsilon = (gaps.epsilon_manipulation if follower_strategy == "fmucb"
                           else gaps.epsilon_limited)
            s0 = default_s0(game.A, game.B, horizon, delta, epsilon, spec.s0_multiplier)
        logger.debug("ucbe S0 = %.6g", s0)
        return UcbeLeader(game.A, s0=s0)
    return UcbLeader(game.A, horizon=horizon, delta=delta)


def build_follower(spec: FollowerSpec, game: GameInstance, horizon: int) -> BaseFollower:
    cls = FOLLOWER_REGISTRY[spec.strategy]
    if spec.strategy in ("ucb", "fmucb"):
        return cls(game.A, game.B, horizon, resolve_delta(spec.delta, horizon), spec.information)
    return cls(game, spec.information)


# ============================================================================
# Single run
# ============================================================================

@dataclass
class RunResult:
    """Trace and metrics of one seeded run."""
    seed: int
    records: List[RoundRecord]
    metrics: RunMetrics
    leader_actions: np.ndarray
    follower_actions: np.ndarray

    def action_fraction(self, a: int) -> float:
        return float(np.mean(self.leader_actions == a))


def compute_metrics(
    truth: GroundTruth,
    seed: int,
    a_hist: np.ndarray,
    b_hist: np.ndarray,
    checkpoints: np.ndarray,
    window: int,
    plan_hist: Optional[np.ndarray] = None,
    follower: Optional[BaseFollower] = None,
) -> RunMetrics:
    """All metrics from the action history, evaluated on mean rewards."""
    game = truth.game
    T = a_hist.shape[0]
    t = np.arange(1, T + 1)
    se_value = game.mu_l[truth.se_pair.a, truth.se_pair.b]

    played_l = game.mu_l[a_hist, b_hist]
    played_f = game.mu_f[a_hist, b_hist]
    br_b = truth.best_response[a_hist]

    action_regret = np.cumsum(se_value - game.mu_l[a_hist, br_b])
    realized_regret = np.cumsum(se_value - played_l)
    follower_regret = np.cumsum(game.mu_f[a_hist, br_b] - played_f)

    wrong = b_hist != truth.reference_response[a_hist]
    if plan_hist is not None and truth.oracle_plan is not None:
        target_flat = truth.target.a * game.B + truth.target.b
        wrong |= plan_hist != target_flat
    wrong_rounds = np.cumsum(wrong)
    on_target_action = np.cumsum(a_hist == truth.target.a)

    full = {
        "action_regret": action_regret,
        "realized_regret": realized_regret,
        "avg_action_regret": action_regret / t,
        "avg_realized_regret": realized_regret / t,
        "follower_regret": follower_regret,
        "follower_avg_reward": np.cumsum(played_f) / t,
        "leader_avg_reward": np.cumsum(played_l) / t,
        "wrong_rounds": wrong_rounds.astype(float),
        "wrong_rate": wrong_rounds / t,
        "target_action_rate": on_target_action / t,
    }
    idx = checkpoints - 1
    series = {name: full[name][idx] for name in SERIES_METRICS}

    w = min(window, T)
    tail = slice(T - w, T)
    hits = (a_hist[tail] == truth.target.a) & (b_hist[tail] == truth.target.b)

    final_plan_target = None
    matches = None
    fallback_rounds = 0
    if isinstance(follower, FmucbFollower):
        final_plan_target = follower.plan_target
        matches = final_plan_target == truth.target
        fallback_rounds = follower.fallback_rounds

    return RunMetrics(
        seed=seed,
        horizon=T,
        target_pair=truth.target,
        checkpoints=checkpoints,
        series=series,
        final_pair=ActionPair(int(a_hist[-1]), int(b_hist[-1])),
        last_iterate_hit=bool(a_hist[-1] == truth.target.a and b_hist[-1] == truth.target.b),
        trailing_hit_rate=float(hits.mean()),
        trailing_follower_reward=float(played_f[tail].mean()),
        trailing_target_action_rate=float(np.mean(a_hist[tail] == truth.target.a)),
        fallback_rounds=fallback_rounds,
        final_plan_target=final_plan_target,
        final_plan_matches_oracle=matches,
    )


def run_game(config: SimConfig, seed: int, game: Optional[GameInstance] = None,
             truth: Optional[GroundTruth] = None) -> RunResult:
    """
    Play ``config.horizon`` rounds under one seed. ``game``/``truth`` may be
    passed in so a batch builds them once.
    """
    game = game or config.game.build()
    truth = truth or ground_truth(game, config.follower.strategy)
    T = config.horizon

    leader = build_leader(config.leader, game, T, config.schedule, truth.gaps,
                          config.follower.strategy)
    follower = build_follower(config.follower, game, T)
    streams = spawn_streams(seed)
    leader_rng = streams[LEADER_SAMPLE]
    leader_reward_rng = streams[LEADER_REWARD]
    follower_reward_rng = streams[FOLLOWER_REWARD]
    noise = config.noise
    shares_leader_reward = config.follower.information is not InformationSetting.LIMITED
    tracks_plans = isinstance(follower, FmucbFollower)

    checkpoints = config.checkpoint_rounds()
    record_at = set(checkpoints.tolist()) if config.trace is TraceGranularity.CHECKPOINTS else set()
    full_trace = config.trace is TraceGranularity.FULL

    a_hist = np.empty(T, dtype=np.int64)
    b_hist = np.empty(T, dtype=np.int64)
    plan_hist = np.empty(T, dtype=np.int64) if tracks_plans else None
    records: List[RoundRecord] = []

    for i in range(T):
        recorded = full_trace or (i + 1) in record_at
        dist_hash = leader.dist_hash() if recorded else None
        a = leader.select(leader_rng)
        b = follower.respond(a)
        pair = ActionPair(a, b)
        r_l = sample_reward(game, pair, Player.LEADER, leader_reward_rng, noise)
        r_f = sample_reward(game, pair, Player.FOLLOWER, follower_reward_rng, noise)
        leader.update(a, r_l)
        follower.observe(pair, r_f, r_l if shares_leader_reward else None)

        a_hist[i] = a
        b_hist[i] = b
        target = follower.plan_target
        if tracks_plans:
            plan_hist[i] = target.a * game.B + target.b
        if recorded:
            records.append(RoundRecord(
                t=i + 1, a=a, b=b, r_l=r_l, r_f=r_f,
                leader_dist_hash=dist_hash, plan_target=target, fallback=follower.fallback,
            ))

    metrics = compute_metrics(truth, seed, a_hist, b_hist, checkpoints, config.window,
                              plan_hist=plan_hist, follower=follower)
    logger.debug("seed %s done: final pair %s, trailing hit %.3f",
                 seed, metrics.final_pair, metrics.trailing_hit_rate)
    return RunResult(seed=seed, records=records, metrics=metrics,
                     leader_actions=a_hist, follower_actions=b_hist)


# ============================================================================
# Batches
# ============================================================================

def _mean_std(values) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and population std over axis 0, taken as offsets from the first row
    so that identical rows give a std of exactly 0."""
    values = np.asarray(values, dtype=float)
    offsets = values - values[0]
    return values[0] + offsets.mean(axis=0), offsets.std(axis=0)


def summarize_runs(runs: List[RunResult]) -> pd.DataFrame:
    """Long-format mean/std (ddof=0) per checkpoint and metric."""
    columns = ["checkpoint_t", "metric", "mean", "std", "n_seeds"]
    if not runs:
        return pd.DataFrame(columns=columns)
    checkpoints = runs[0].metrics.checkpoints
    rows = []
    for name in SERIES_METRICS:
        stacked = np.vstack([r.metrics.series[name] for r in runs])
        means, stds = _mean_std(stacked)
        for cp, m, s in zip(checkpoints, means, stds):
            rows.append((int(cp), name, float(m), float(s), len(runs)))
    frame = pd.DataFrame(rows, columns=columns)
    return frame.sort_values(["checkpoint_t"], kind="stable").reset_index(drop=True)


class BatchReport:
    """Runs of one config across its seeds, with aggregate statistics."""

    def __init__(self, config: SimConfig, truth: GroundTruth, runs: List[RunResult]):
        self.config = config
        self.truth = truth
        self.runs = runs
        self.summary = summarize_runs(runs)
        self.timestamp = datetime.now().isoformat()

    @property
    def game(self) -> GameInstance:
        return self.truth.game

    @property
    def label(self) -> str:
        return f"{self.config.leader.algorithm}-{self.config.follower.strategy}"

    def scalar_frame(self) -> pd.DataFrame:
        """One row per seed of run-level scalars."""
        frame = pd.DataFrame([r.metrics.scalars() for r in self.runs])
        frame.insert(0, "seed", [r.seed for r in self.runs])
        return frame

    def scalar_mean(self, name: str) -> float:
        return float(_mean_std(self.scalar_frame()[name])[0])

    def scalar_std(self, name: str) -> float:
        return float(_mean_std(self.scalar_frame()[name])[1])

    def overview(self) -> Dict[str, Any]:
        scalars = self.scalar_frame().drop(columns=["seed"])
        return {
            "name": self.config.name,
            "timestamp": self.timestamp,
            "game": self.config.game.describe(),
            "leader": self.config.leader.algorithm,
            "follower": self.config.follower.strategy,
            "information": self.config.follower.information.value,
            "horizon": self.config.horizon,
            "noise": self.config.noise.value,
            "seeds": list(self.config.seeds),
            "target_pair": list(self.truth.target.as_tuple()),
            "gaps": self.truth.gaps.to_dict(),
            "scalars": {
                name: dict(zip(("mean", "std"), map(float, _mean_std(scalars[name]))))
                for name in scalars.columns
            },
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "overview": self.overview(),
            "game": self.game.to_dict(),
            "runs": [r.metrics.to_dict() for r in self.runs],
            "summary": self.summary.to_dict(orient="records"),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, default=str)

    def print_summary(self):
        s = self.overview()
        print(f"\n{'='*70}")
        print(f"  STACKELBERG SIMULATION: {s['name']}")
        print(f"  {s['leader']} leader vs {s['follower']} follower ({s['information']})")
        print(f"  Game: {s['game']}  |  T={s['horizon']}  |  noise={s['noise']}  |  seeds={len(s['seeds'])}")
        print(f"{'='*70}")
        gaps = s["gaps"]
        print(f"\n  SE pair: {tuple(gaps['se_pair'])}  |  best manipulation pair: {tuple(gaps['fm_pair'])}")
        print(f"  Manipulation gap: {gaps['manipulation_gap']:.4f}")
        print(f"  Target pair: {tuple(s['target_pair'])}")
        print(f"\n  {'metric':<30}{'mean':>14}{'std':>14}")
        print(f"  {'─'*58}")
        for name, stats in s["scalars"].items():
            print(f"  {name:<30}{stats['mean']:>14.6g}{stats['std']:>14.6g}")
        print(f"\n{'='*70}\n")


def batch_run(config: SimConfig, n_jobs: int = 1, game: Optional[GameInstance] = None) -> BatchReport:
    """run_game for every seed; seeds may run in parallel with identical results."""
    game = game or config.game.build()
    truth = ground_truth(game, config.follower.strategy)
    logger.info("batch %s: %s on %s, T=%d, %d seeds",
                config.name, config.follower.strategy, game.name, config.horizon, len(config.seeds))
    if n_jobs == 1 or len(config.seeds) == 1:
        runs = [run_game(config, seed, game, truth) for seed in config.seeds]
    else:
        runs = Parallel(n_jobs=n_jobs)(
            delayed(run_game)(config, seed, game, truth) for seed in config.seeds
        )
    return BatchReport(config, truth, list(runs))


# ============================================================================
# Non-convergence probe
# ============================================================================

@dataclass(frozen=True)
class ProbeResult:
    horizon: int
    leader: str
    fraction_a2: float
    cumulative_regret: float
    average_regret: float
    trailing_hit_rate: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "horizon": self.horizon,
            "leader": self.leader,
            "fraction_a2": self.fraction_a2,
            "cumulative_regret": self.cumulative_regret,
            "average_regret": self.average_regret,
            "trailing_hit_rate": self.trailing_hit_rate,
        }


def nonconvergence_probe(T: int, leader: str = "ucb", delta: float = 0.01, s0: Optional[float] = None,
                         noise: NoiseMode = NoiseMode.NOISELESS, seed: int = 0,
                         window: int = 1000) -> ProbeResult:
    """
    UCB (or UCBE) leader against a limited-information UCB follower on the
    appendix_a1 game, where the SE is (a2, b1). Reports how often the leader
    played a2 (index 1) and its realized regret.
    """
    if T < 1:
        raise ConfigError(f"probe horizon must be >= 1, got {T}", key="T")
    config = SimConfig(
        game=GameSource(kind="builtin", name="appendix_a1"),
        leader=LeaderSpec(algorithm=leader, delta=delta, s0=s0),
        follower=FollowerSpec(strategy="ucb", delta=delta, information=InformationSetting.LIMITED),
        horizon=T,
        seeds=[seed],
        noise=noise,
        trace=TraceGranularity.NONE,
        window=window,
        name=f"nonconvergence-{leader}",
    )
    result = run_game(config, seed)
    regret = result.metrics.realized_regret
    return ProbeResult(
        horizon=T,
        leader=leader,
        fraction_a2=result.action_fraction(1),
        cumulative_regret=regret,
        average_regret=regret / T,
        trailing_hit_rate=result.metrics.trailing_hit_rate,
    )
