"""
EXP3 with explicit uniform exploration.
Samples from x̃ = (1-α)x + α/A and updates importance-weighted cumulative
estimates y; x is the softmax of y.
"""

import hashlib

import numpy as np

from .base import BaseLeader
from ..exceptions import ContractViolation
from ..rng import RngStream


def softmax(y: np.ndarray) -> np.ndarray:
    z = np.exp(y - y.max())
    return z / z.sum()


class Exp3Leader(BaseLeader):

    algorithm = "exp3"

    def __init__(self, A: int, alpha: float, eta: float):
        super().__init__(A)
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        if eta <= 0.0:
            raise ValueError(f"eta must be positive, got {eta}")
        self.alpha = float(alpha)
        self.eta = float(eta)
        self.y = np.zeros(A)
        self.x = np.full(A, 1.0 / A)
        self._refresh()
        self._last_action = None
        self._last_prob = None

    def _refresh(self):
        self._probs = (1.0 - self.alpha) * self.x + self.alpha / self.A
        self._cdf = np.cumsum(self._probs)

    def sampling_distribution(self) -> np.ndarray:
        """x̃: every entry is at least α/A."""
        return self._probs.copy()

    def select(self, rng: RngStream) -> int:
        u = rng.uniform() * self._cdf[-1]
        a = min(int(np.searchsorted(self._cdf, u, side="right")), self.A - 1)
        self._last_action = a
        self._last_prob = float(self._probs[a])
        return a

    def update(self, a: int, reward: float):
        self._check_feedback(a, reward)
        if not np.allclose(self.x, softmax(self.y)):
            raise ContractViolation("exp3 distribution no longer matches softmax of the estimates")
        self.rounds += 1
        prob = self._last_prob if a == self._last_action else float(self._probs[a])
        self._last_action = self._last_prob = None
        if reward == 0.0:
            return
        self.y[a] += self.eta * reward / prob
        self.x = softmax(self.y)
        if abs(self.x.sum() - 1.0) > 1e-9:
            raise ContractViolation(f"exp3 distribution lost normalisation: sum {self.x.sum()!r}")
        self._refresh()

    def dist_hash(self) -> str:
        return hashlib.sha1(self._probs.tobytes()).hexdigest()[:12]
