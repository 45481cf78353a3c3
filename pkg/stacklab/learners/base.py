"""
Base Leader Class
All leader learning algorithms inherit from BaseLeader.
"""

from abc import ABC, abstractmethod
from typing import Optional

from ..exceptions import ContractViolation
from ..rng import RngStream


class BaseLeader(ABC):
    """Abstract base class for leader algorithms over A pure actions."""

    def __init__(self, A: int):
        if A < 1:
            raise ValueError(f"leader needs at least one action, got A={A}")
        self.A = A
        self.rounds = 0

    @property
    @abstractmethod
    def algorithm(self) -> str:
        """Registry name (e.g. 'exp3')."""
        ...

    @abstractmethod
    def select(self, rng: RngStream) -> int:
        """Choose this round's action."""
        ...

    @abstractmethod
    def update(self, a: int, reward: float):
        """Feed back the leader's own realized reward for the action played."""
        ...

    def dist_hash(self) -> Optional[str]:
        """Fingerprint of the current sampling distribution, for randomized leaders."""
        return None

    def _check_feedback(self, a: int, reward: float):
        if not 0 <= a < self.A:
            raise IndexError(f"leader action {a} outside [0, {self.A})")
        if not 0.0 <= reward <= 1.0:
            raise ContractViolation(f"{self.algorithm}: reward {reward!r} outside [0, 1]")
