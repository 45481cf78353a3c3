"""
Game Core
Reward sampling, best/worst responses, Stackelberg equilibrium, gap profile
and random game generation. All argmax/argmin ties break to the lowest index.
"""

import json
import logging
from typing import List, Optional, Union

import numpy as np

from .exceptions import GameGenerationError, DegenerateGameError, ManipulationError
from .models import (
    GameInstance, ActionPair, ResponseFunction, ManipulationPlan, EquilibriumResult,
    GapProfile, Player, NoiseMode, GAP_SENTINEL,
)
from .rng import RngStream

logger = logging.getLogger(__name__)

MAX_GENERATION_ATTEMPTS = 100


# ============================================================================
# Builtin games
# ============================================================================

# Worked example: SE is (a1, b1); manipulation pulls the game to (a2, b1).
TABLE1 = GameInstance(
    mu_l=[[0.3, 0.1], [0.2, 0.3]],
    mu_f=[[0.1, 0.05], [1.0, 0.1]],
    name="table1",
)

# UCB-UCB fails to reach its SE (a2, b1): the follower's a2 row has a 0.01 gap.
APPENDIX_A1 = GameInstance(
    mu_l=[[0.95, 0.9], [1.0, 0.0]],
    mu_f=[[0.3, 0.2], [0.8, 0.79]],
    name="appendix_a1",
)

BUILTIN_GAMES = {
    "table1": TABLE1,
    "appendix_a1": APPENDIX_A1,
}


def load_game(path: str) -> GameInstance:
    """Read a game from its JSON structure {"A", "B", "mu_l", "mu_f"}."""
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return GameInstance.from_dict(data, name=data.get("name", path))


def save_game(game: GameInstance, path: str):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(game.to_json())
        f.write("\n")


# ============================================================================
# Sampling and responses
# ============================================================================

def sample_reward(
    game: GameInstance,
    pair: ActionPair,
    who: Player,
    rng: RngStream,
    noise: NoiseMode = NoiseMode.BERNOULLI,
) -> float:
    """
    Realized reward of ``who`` at ``pair``.
    Bernoulli mode consumes exactly one draw; noiseless mode returns the mean
    and consumes none.
    """
    game.check_pair(pair.a, pair.b)
    mean = game.mean(who, pair.a, pair.b)
    if noise is NoiseMode.NOISELESS:
        return mean
    return float(rng.bernoulli(mean))


def _check_leader_action(game: GameInstance, a: int):
    if not 0 <= a < game.A:
        raise IndexError(f"leader action {a} outside [0, {game.A})")


def best_response(game: GameInstance, a: int) -> int:
    """argmax_b μ_f(a, b)."""
    _check_leader_action(game, a)
    return int(np.argmax(game.mu_f[a]))


def worst_response(game: GameInstance, a: int) -> int:
    """argmin_b μ_l(a, b): the follower action that hurts the leader most."""
    _check_leader_action(game, a)
    return int(np.argmin(game.mu_l[a]))


def best_response_function(game: GameInstance) -> ResponseFunction:
    return ResponseFunction(tuple(int(b) for b in np.argmax(game.mu_f, axis=1)))


def worst_response_function(game: GameInstance) -> ResponseFunction:
    return ResponseFunction(tuple(int(b) for b in np.argmin(game.mu_l, axis=1)))


def induced_leader_rewards(game: GameInstance, response: ResponseFunction) -> np.ndarray:
    """μ_l(a, F(a)) for every leader action a."""
    return game.mu_l[np.arange(game.A), np.asarray(response.map)]


def leader_argmax_set(game: GameInstance, response: ResponseFunction) -> List[int]:
    """Q(F): leader actions maximizing μ_l(a, F(a))."""
    rewards = induced_leader_rewards(game, response)
    return [int(a) for a in np.flatnonzero(rewards == rewards.max())]


def is_qualified(game: GameInstance, plan: ManipulationPlan, strict: bool = True) -> bool:
    """
    Eq. (4) constraint against exact means:
    μ_l(a′, b′) > max_{a≠a′} μ_l(a, F(a))  (>= when strict is False).
    """
    rewards = induced_leader_rewards(game, plan.response)
    if game.A == 1:
        return True
    others = np.delete(rewards, plan.target.a)
    own = game.mu_l[plan.target.a, plan.target.b]
    return bool(own > others.max()) if strict else bool(own >= others.max())


def _has_unique_max(row: np.ndarray) -> bool:
    return int(np.count_nonzero(row == row.max())) == 1


def stackelberg_equilibrium(game: GameInstance) -> EquilibriumResult:
    """(argmax_a μ_l(a, F_br(a)), F_br(a_se)) with uniqueness flags."""
    br = best_response_function(game)
    leader_values = induced_leader_rewards(game, br)
    a_se = int(np.argmax(leader_values))
    unique_br = all(_has_unique_max(game.mu_f[a]) for a in range(game.A))
    return EquilibriumResult(
        pair=ActionPair(a_se, br[a_se]),
        unique_best_responses=unique_br,
        unique_leader_argmax=_has_unique_max(leader_values),
    )


# ============================================================================
# Worst-response competitor levels
# ============================================================================

def competitor_levels(levels: np.ndarray) -> np.ndarray:
    """
    Entry a is max_{a'≠a} levels[a'], or -inf when there is no other action.
    """
    A = levels.shape[0]
    if A == 1:
        return np.array([-np.inf])
    order = np.argsort(-levels, kind="stable")
    top, second = levels[order[0]], levels[order[1]]
    out = np.full(A, top, dtype=float)
    out[order[0]] = second
    return out


def wr_qualified_mask(game: GameInstance) -> np.ndarray:
    """
    A×B mask: True where the plan {F(a)=b, F(a″)=wr(a″) otherwise} is a
    qualified manipulation.
    """
    wr_levels = game.mu_l.min(axis=1)
    rivals = competitor_levels(wr_levels)
    return game.mu_l > rivals[:, None]


def manipulation_is_unique(game: GameInstance) -> bool:
    """True when exactly one qualified pair attains the best follower reward."""
    mask = wr_qualified_mask(game)
    if not mask.any():
        return False
    best = game.mu_f[mask].max()
    return int(np.count_nonzero(mask & (game.mu_f == best))) == 1


# ============================================================================
# Gap profile
# ============================================================================

def _min_or_sentinel(values: np.ndarray) -> float:
    return float(values.min()) if values.size else GAP_SENTINEL


def _row_gaps(matrix: np.ndarray, chosen: np.ndarray, sign: float) -> float:
    """min over rows of min_{b≠chosen} sign·(matrix[a, chosen] − matrix[a, b])."""
    A, B = matrix.shape
    if B == 1:
        return GAP_SENTINEL
    gaps = []
    for a in range(A):
        ref = matrix[a, chosen[a]]
        others = np.delete(matrix[a], chosen[a])
        gaps.append((sign * (ref - others)).min())
    return float(min(gaps))


def gap_profile(game: GameInstance) -> GapProfile:
    """
    Δ₁–Δ₆ and Gap(a_fm, a_se) from the exact means. Empty minimisation sets
    report GAP_SENTINEL.
    """
    from .oracles import best_manipulation_oracle, enumeration_size, ENUMERATION_CAP

    se = stackelberg_equilibrium(game).pair
    br = np.asarray(best_response_function(game).map)
    wr = np.asarray(worst_response_function(game).map)
    rows = np.arange(game.A)

    try:
        if enumeration_size(game) <= ENUMERATION_CAP:
            fm = best_manipulation_oracle(game).target
        else:
            from .followers.manipulation import fbm_solve
            fm = fbm_solve(game).target
    except (DegenerateGameError, ManipulationError):
        logger.warning("no strictly qualified manipulation; using the SE pair as fm pair")
        fm = se

    delta1 = _row_gaps(game.mu_f, br, sign=1.0)
    delta5 = _row_gaps(game.mu_l, wr, sign=-1.0)

    br_levels = game.mu_l[rows, br]
    wr_levels = game.mu_l[rows, wr]
    others = rows != se.a
    delta2 = _min_or_sentinel(game.mu_l[se.a, se.b] - br_levels[others])
    others = rows != fm.a
    delta3 = _min_or_sentinel(game.mu_l[fm.a, fm.b] - wr_levels[others])

    fm_value = game.mu_f[fm.a, fm.b]
    worse = game.mu_f < fm_value
    delta4 = _min_or_sentinel(fm_value - game.mu_f[worse])

    better = game.mu_f > fm_value
    if game.A > 1:
        rivals = competitor_levels(wr_levels)
        delta6 = _min_or_sentinel((rivals[:, None] - game.mu_l)[better])
    else:
        delta6 = GAP_SENTINEL

    gap = float(fm_value - game.mu_f[se.a, se.b])
    if gap < 0:
        logger.warning("negative manipulation gap %.3g on a degenerate game; reporting 0", gap)
        gap = 0.0

    return GapProfile(
        delta1=delta1, delta2=delta2, delta3=delta3,
        delta4=delta4, delta5=delta5, delta6=delta6,
        manipulation_gap=gap, se_pair=se, fm_pair=fm,
    )


# ============================================================================
# Random games
# ============================================================================

def game_is_regular(game: GameInstance) -> bool:
    """Unique best responses, unique SE and a unique best-manipulation pair."""
    if game.mu_l.min() <= 0.0 or game.mu_f.min() <= 0.0:
        return False
    return stackelberg_equilibrium(game).unique and manipulation_is_unique(game)


def random_game(
    A: int,
    B: int,
    rng: Union[RngStream, int],
    max_attempts: int = MAX_GENERATION_ATTEMPTS,
    name: Optional[str] = None,
) -> GameInstance:
    """
    i.i.d. U(0,1) mean matrices, resampled whole until best responses, the SE
    and the best manipulation pair are all unique.
    """
    if A < 1 or B < 1:
        raise ValueError(f"A and B must be >= 1, got A={A}, B={B}")
    if not isinstance(rng, RngStream):
        rng = RngStream(rng, "game")
    gen = rng.generator
    for attempt in range(1, max_attempts + 1):
        mu_l = gen.random((A, B))
        mu_f = gen.random((A, B))
        game = GameInstance(mu_l=mu_l, mu_f=mu_f, name=name or f"random-{A}x{B}-{rng.seed}")
        if game_is_regular(game):
            if attempt > 1:
                logger.debug("random game accepted after %d attempts", attempt)
            return game
    raise GameGenerationError(
        f"no regular {A}x{B} game after {max_attempts} attempts (seed {rng.seed})"
    )
