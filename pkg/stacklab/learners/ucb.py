"""
Index-based leaders: UCBE (fixed exploration bonus S0) and vanilla UCB.
Per-action indices are cached and only the played action's entry is
recomputed on update.
"""

import math
from abc import abstractmethod

import numpy as np

from .base import BaseLeader
from ..exceptions import ConfigError
from ..rng import RngStream


def default_s0(A: int, B: int, horizon: int, delta: float, epsilon: float,
               multiplier: float = 1.0) -> float:
    """S0 = c·(B/ε³)·log(A·B·T/δ)."""
    if math.isinf(epsilon):
        return 0.0
    if epsilon <= 0.0:
        raise ConfigError("UCBE epsilon is not positive for this game; set epsilon or s0",
                          key="leader.epsilon")
    return multiplier * (B / epsilon ** 3) * max(0.0, math.log(A * B * horizon / delta))


class _IndexLeader(BaseLeader):
    """argmax of empirical mean plus bonus, lowest index on ties."""

    def __init__(self, A: int):
        super().__init__(A)
        self.counts = np.zeros(A, dtype=np.int64)
        self.sums = np.zeros(A)
        self.index = np.array([self._bonus(0)] * A, dtype=float)

    @abstractmethod
    def _bonus(self, n: int) -> float:
        """Exploration bonus after n plays of an action."""
        ...

    def means(self) -> np.ndarray:
        return self.sums / np.maximum(1, self.counts)

    def select(self, rng: RngStream = None) -> int:
        return int(np.argmax(self.index))

    def update(self, a: int, reward: float):
        self._check_feedback(a, reward)
        self.rounds += 1
        self.counts[a] += 1
        self.sums[a] += reward
        n = int(self.counts[a])
        self.index[a] = self.sums[a] / n + self._bonus(n)


class UcbeLeader(_IndexLeader):
    """ucbe(a) = μ̂(a) + √(S0 / max(1, n(a)))."""

    algorithm = "ucbe"

    def __init__(self, A: int, s0: float):
        if s0 < 0.0:
            raise ValueError(f"S0 must be nonnegative, got {s0}")
        self.s0 = float(s0)
        super().__init__(A)

    def _bonus(self, n: int) -> float:
        return math.sqrt(self.s0 / max(1, n))


class UcbLeader(_IndexLeader):
    """ucb(a) = μ̂(a) + √(2 log(T/δ) / max(1, n(a)))."""

    algorithm = "ucb"

    def __init__(self, A: int, horizon: int, delta: float):
        if horizon < 1 or not 0.0 < delta <= 1.0:
            raise ValueError(f"need horizon >= 1 and delta in (0, 1], got {horizon}, {delta}")
        self.horizon = horizon
        self.delta = delta
        self._radicand = 2.0 * max(0.0, math.log(horizon / delta))
        super().__init__(A)

    def _bonus(self, n: int) -> float:
        return math.sqrt(self._radicand / max(1, n))
