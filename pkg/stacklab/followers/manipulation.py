"""
Manipulating followers.

FBM and FMUCB share one greedy routine: walk the candidate pairs in order of
decreasing follower score, answer every other leader action with the
leader-worst response, and accept the first candidate whose leader value
beats every competing row. Eliminating a candidate never changes the
worst responses or the competitor levels, so the walk is equivalent to the
repeated argmax-and-eliminate loop over K and ends within A·B steps.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from .base import BaseFollower, FollowerBanditState
from ..exceptions import ManipulationError
from ..game import competitor_levels, leader_argmax_set
from ..models import ActionPair, GameInstance, InformationSetting, ManipulationPlan, ResponseFunction

logger = logging.getLogger(__name__)


def _candidate_order(score: np.ndarray) -> np.ndarray:
    """Flat pair indices by descending score; row-major order breaks ties."""
    return np.argsort(-score.ravel(), kind="stable")


def _greedy_manipulation(
    follower_score: np.ndarray,
    leader_worst: np.ndarray,
    leader_own: np.ndarray,
) -> Tuple[Optional[ManipulationPlan], int]:
    """
    Returns (plan, last examined flat index). ``plan`` is None when every
    candidate was eliminated.

    follower_score  ranks candidates (μ_f, or U_f for FMUCB)
    leader_worst    F(a) = argmin_b of this row for a ≠ a′ (μ_l, or U_l)
    leader_own      leader value of the candidate itself (μ_l, or μ̂_l)
    """
    A, B = follower_score.shape
    worst = np.argmin(leader_worst, axis=1)
    rivals = competitor_levels(leader_worst[np.arange(A), worst])
    # Eliminated iff max_{a≠a′} worst level >= own value.
    accepted = (leader_own > rivals[:, None]).ravel()

    order = _candidate_order(follower_score)
    hits = accepted[order]
    if not hits.any():
        return None, int(order[-1])
    step = int(np.argmax(hits))
    flat = int(order[step])
    a, b = divmod(flat, B)
    response = worst.copy()
    response[a] = b
    plan = ManipulationPlan(
        response=ResponseFunction(tuple(response)),
        target=ActionPair(a, b),
        value=float(follower_score[a, b]),
        iterations=step + 1,
    )
    return plan, flat


def fbm_solve(game: GameInstance) -> ManipulationPlan:
    """Follower's best manipulation from exact means."""
    plan, _ = _greedy_manipulation(game.mu_f, game.mu_l, game.mu_l)
    if plan is None:
        raise ManipulationError(
            f"{game.name}: every candidate pair was eliminated (tied leader rewards)"
        )
    return plan


def fmucb_plan(state: FollowerBanditState) -> ManipulationPlan:
    """
    One round of manipulation by confidence bounds, with a fresh candidate set:
    U_f = μ̂_f + w ranks candidates, U_l = μ̂_l - w picks worst responses,
    w = √(2 log(ABT/δ) / max(1, n)). If everything is eliminated the plan is
    built around the last examined candidate and flagged as a fallback.
    """
    width = state.width(state.log_abt_delta)
    mean_l = state.mean_l()
    upper_f = state.mean_f() + width
    lower_l = mean_l - width
    plan, last = _greedy_manipulation(upper_f, lower_l, mean_l)
    if plan is not None:
        return plan

    a, b = divmod(last, state.B)
    response = np.argmin(lower_l, axis=1)
    response[a] = b
    return ManipulationPlan(
        response=ResponseFunction(tuple(response)),
        target=ActionPair(a, b),
        value=float(upper_f[a, b]),
        iterations=state.A * state.B,
        fallback=True,
    )


def pessimistic_worst_responses(game: GameInstance) -> np.ndarray:
    """wr(a), with leader-tied worst responses resolved toward the follower's best."""
    lows = game.mu_l.min(axis=1, keepdims=True)
    masked = np.where(game.mu_l == lows, game.mu_f, -np.inf)
    return np.argmax(masked, axis=1)


def pessimistic_fbm_solve(game: GameInstance) -> ManipulationPlan:
    """
    Best manipulation against a leader that breaks ties against the follower.

    A plan built around (a′, b′) is worth min over Q(F) of μ_f(a, F(a)) when
    a′ ∈ Q(F). Candidates are tried by decreasing μ_f; once the next
    candidate's own follower value cannot beat the incumbent the search stops.
    The returned target is the pair the pessimistic leader actually plays.
    """
    base = pessimistic_worst_responses(game)
    best: Optional[ManipulationPlan] = None
    best_value = -np.inf
    order = _candidate_order(game.mu_f)
    for step, flat in enumerate(order, start=1):
        a_c, b_c = divmod(int(flat), game.B)
        if game.mu_f[a_c, b_c] <= best_value:
            break
        response = base.copy()
        response[a_c] = b_c
        F = ResponseFunction(tuple(response))
        q = leader_argmax_set(game, F)
        if a_c not in q:
            continue
        values = [game.mu_f[a, F[a]] for a in q]
        pos = int(np.argmin(values))
        value = float(values[pos])
        if value > best_value:
            best_value = value
            a_p = q[pos]
            best = ManipulationPlan(response=F, target=ActionPair(a_p, F[a_p]),
                                    value=value, iterations=step)
    if best is None:
        raise ManipulationError(f"{game.name}: no candidate is in its own leader argmax set")
    return best


class FbmFollower(BaseFollower):
    """Omniscient follower playing the FBM plan every round."""

    strategy = "fbm"
    information_settings = frozenset({InformationSetting.OMNISCIENT})

    def __init__(self, game: GameInstance,
                 information: InformationSetting = InformationSetting.OMNISCIENT):
        super().__init__(information)
        self.plan = fbm_solve(game)
        self.plan_target = self.plan.target

    def respond(self, a: int) -> int:
        return self.plan.response[a]


class PessimisticFbmFollower(FbmFollower):
    """Omniscient follower manipulating a pessimistic tie-breaking leader."""

    strategy = "fbm_pessimistic"
    information_settings = frozenset({InformationSetting.OMNISCIENT, InformationSetting.SIDE})

    def __init__(self, game: GameInstance,
                 information: InformationSetting = InformationSetting.OMNISCIENT):
        BaseFollower.__init__(self, information)
        self.plan = pessimistic_fbm_solve(game)
        self.plan_target = self.plan.target


class FmucbFollower(BaseFollower):
    """Side-information follower re-planning from confidence bounds every round."""

    strategy = "fmucb"
    information_settings = frozenset({InformationSetting.SIDE})

    def __init__(self, A: int, B: int, horizon: int, delta: float = 0.01,
                 information: InformationSetting = InformationSetting.SIDE):
        super().__init__(information)
        self.state = FollowerBanditState(A, B, horizon, delta, information)
        self.plan: Optional[ManipulationPlan] = None
        self.fallback_rounds = 0
        self._warned = False

    def respond(self, a: int) -> int:
        self.plan = fmucb_plan(self.state)
        self.plan_target = self.plan.target
        self.fallback = self.plan.fallback
        if self.fallback:
            self.fallback_rounds += 1
            if not self._warned:
                logger.warning("fmucb eliminated every candidate at round %d; using fallback plan",
                               int(self.state.counts.sum()) + 1)
                self._warned = True
        return self.plan.response[a]

    def observe(self, pair: ActionPair, r_f: float, r_l: Optional[float] = None):
        self.state.update(pair, r_f, r_l)
