"""
Base Follower Class and the follower's bandit statistics.
All follower strategies inherit from BaseFollower.
"""

import math
from abc import ABC, abstractmethod
from typing import FrozenSet, Optional

import numpy as np

from ..exceptions import ContractViolation, InformationModelError
from ..models import ActionPair, InformationSetting


class FollowerBanditState:
    """
    Per-pair counts and reward sums. ``sum_l`` is only ever written in the
    side/omniscient settings; a limited-information follower cannot be fed
    leader rewards at all.
    """

    def __init__(self, A: int, B: int, horizon: int, delta: float,
                 information: InformationSetting = InformationSetting.LIMITED):
        if horizon < 1 or not 0.0 < delta <= 1.0:
            raise ValueError(f"need horizon >= 1 and delta in (0, 1], got {horizon}, {delta}")
        self.A, self.B = A, B
        self.horizon = horizon
        self.delta = delta
        self.information = information
        self.counts = np.zeros((A, B), dtype=np.int64)
        self.sum_f = np.zeros((A, B))
        self.sum_l = np.zeros((A, B))

    def update(self, pair: ActionPair, r_f: float, r_l: Optional[float] = None):
        a, b = pair.a, pair.b
        if not (0 <= a < self.A and 0 <= b < self.B):
            raise IndexError(f"action pair ({a}, {b}) outside {self.A}x{self.B} game")
        if r_l is not None and not self.information.observes_leader_reward:
            raise InformationModelError(
                "leader reward supplied to a limited-information follower", key="follower.information"
            )
        for label, r in (("r_f", r_f), ("r_l", r_l)):
            if r is not None and not 0.0 <= r <= 1.0:
                raise ContractViolation(f"follower update: {label}={r!r} outside [0, 1]")
        self.counts[a, b] += 1
        self.sum_f[a, b] += r_f
        if r_l is not None:
            self.sum_l[a, b] += r_l

    def guarded_counts(self) -> np.ndarray:
        return np.maximum(1, self.counts)

    def mean_f(self) -> np.ndarray:
        return self.sum_f / self.guarded_counts()

    def mean_l(self) -> np.ndarray:
        return self.sum_l / self.guarded_counts()

    def width(self, log_term: float) -> np.ndarray:
        """√(2·log_term / max(1, n)) for every pair."""
        return np.sqrt(2.0 * log_term / self.guarded_counts())

    @property
    def log_t_delta(self) -> float:
        return max(0.0, math.log(self.horizon / self.delta))

    @property
    def log_abt_delta(self) -> float:
        return max(0.0, math.log(self.A * self.B * self.horizon / self.delta))


class BaseFollower(ABC):
    """Abstract base class for follower strategies."""

    # Information settings the strategy may run under.
    information_settings: FrozenSet[InformationSetting] = frozenset(InformationSetting)

    def __init__(self, information: InformationSetting):
        if information not in self.information_settings:
            allowed = ", ".join(sorted(s.value for s in self.information_settings))
            raise InformationModelError(
                f"follower '{self.strategy}' needs information in {{{allowed}}}, got '{information.value}'",
                key="follower.information",
            )
        self.information = information
        self.plan_target: Optional[ActionPair] = None
        self.fallback = False

    @property
    @abstractmethod
    def strategy(self) -> str:
        """Registry name (e.g. 'fbm')."""
        ...

    @abstractmethod
    def respond(self, a: int) -> int:
        """Follower action against the observed leader action."""
        ...

    def observe(self, pair: ActionPair, r_f: float, r_l: Optional[float] = None):
        """Receive this round's reward feedback; fixed-plan strategies ignore it."""
        return None
