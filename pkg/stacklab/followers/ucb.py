"""
Non-manipulating followers: bandit UCB best response and the exact best
response used as the reference arm for manipulation gaps.
"""

import math
from typing import Optional

import numpy as np

from .base import BaseFollower, FollowerBanditState
from ..game import best_response_function
from ..models import ActionPair, GameInstance, InformationSetting


class UcbFollower(BaseFollower):
    """
    ucb_f(a, b) = μ̂_f(a, b) + √(2 log(T/δ) / max(1, n(a, b))).
    Row indices are cached; an update recomputes a single entry.
    """

    strategy = "ucb"
    information_settings = frozenset({InformationSetting.LIMITED, InformationSetting.SIDE})

    def __init__(self, A: int, B: int, horizon: int, delta: float = 0.01,
                 information: InformationSetting = InformationSetting.LIMITED):
        super().__init__(information)
        self.state = FollowerBanditState(A, B, horizon, delta, information)
        self._radicand = 2.0 * self.state.log_t_delta
        self.index = np.full((A, B), math.sqrt(self._radicand))

    def respond(self, a: int) -> int:
        if not 0 <= a < self.state.A:
            raise IndexError(f"leader action {a} outside [0, {self.state.A})")
        return int(np.argmax(self.index[a]))

    def observe(self, pair: ActionPair, r_f: float, r_l: Optional[float] = None):
        self.state.update(pair, r_f, r_l)
        n = int(self.state.counts[pair.a, pair.b])
        self.index[pair.a, pair.b] = (self.state.sum_f[pair.a, pair.b] / n
                                      + math.sqrt(self._radicand / n))

    def load_state(self, state: FollowerBanditState):
        """Adopt externally prepared statistics and rebuild the index cache."""
        self.state = state
        self._radicand = 2.0 * state.log_t_delta
        self.index = state.mean_f() + state.width(state.log_t_delta)


class BestResponseFollower(BaseFollower):
    """Plays F_br(a) from the exact means."""

    strategy = "best_response"
    information_settings = frozenset({InformationSetting.OMNISCIENT})

    def __init__(self, game: GameInstance,
                 information: InformationSetting = InformationSetting.OMNISCIENT):
        super().__init__(information)
        self.response = best_response_function(game)

    def respond(self, a: int) -> int:
        return self.response[a]
