"""
Stackelberg Game Data Models
Standardized internal representation for games, responses, plans and run traces.
Action indices are 0-based everywhere; a₁ in the worked examples is index 0.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Any, Tuple
from enum import Enum
import json
import math

import numpy as np


# Minimisation over an empty set reports this value.
GAP_SENTINEL = math.inf


class Player(Enum):
    """Whose reward a sample refers to."""
    LEADER = "leader"
    FOLLOWER = "follower"


class NoiseMode(Enum):
    """Reward noise model."""
    BERNOULLI = "bernoulli"
    NOISELESS = "noiseless"


class InformationSetting(Enum):
    """What the follower observes each round."""
    LIMITED = "limited"
    SIDE = "side"
    OMNISCIENT = "omniscient"

    @property
    def observes_leader_reward(self) -> bool:
        return self is not InformationSetting.LIMITED


class TraceGranularity(Enum):
    """How much of a run is kept as RoundRecords."""
    NONE = "none"
    CHECKPOINTS = "checkpoints"
    FULL = "full"


def _frozen_matrix(values: Any, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GameInstance:
    """A×B mean-reward matrices for leader and follower: the entire game truth."""
    mu_l: np.ndarray
    mu_f: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        mu_l = _frozen_matrix(self.mu_l, "mu_l")
        mu_f = _frozen_matrix(self.mu_f, "mu_f")
        if mu_l.shape != mu_f.shape:
            raise ValueError(f"mu_l shape {mu_l.shape} != mu_f shape {mu_f.shape}")
        if mu_l.shape[0] < 1 or mu_l.shape[1] < 1:
            raise ValueError("A and B must both be at least 1")
        for label, arr in (("mu_l", mu_l), ("mu_f", mu_f)):
            if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
                raise ValueError(f"{label} entries must lie in [0, 1]")
        object.__setattr__(self, "mu_l", mu_l)
        object.__setattr__(self, "mu_f", mu_f)

    @property
    def A(self) -> int:
        return self.mu_l.shape[0]

    @property
    def B(self) -> int:
        return self.mu_l.shape[1]

    def mean(self, who: Player, a: int, b: int) -> float:
        matrix = self.mu_l if who is Player.LEADER else self.mu_f
        return float(matrix[a, b])

    def check_pair(self, a: int, b: int):
        if not (0 <= a < self.A and 0 <= b < self.B):
            raise IndexError(f"action pair ({a}, {b}) outside {self.A}x{self.B} game")

    def __eq__(self, other) -> bool:
        if not isinstance(other, GameInstance):
            return NotImplemented
        return (np.array_equal(self.mu_l, other.mu_l) and
                np.array_equal(self.mu_f, other.mu_f))

    def __hash__(self) -> int:
        return hash((self.mu_l.tobytes(), self.mu_f.tobytes(), self.mu_l.shape))

    def to_dict(self) -> dict:
        """Serialize to the JSON-compatible game structure (row-major, leader-indexed)."""
        return {
            "A": self.A,
            "B": self.B,
            "mu_l": self.mu_l.tolist(),
            "mu_f": self.mu_f.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], name: str = "custom") -> "GameInstance":
        game = cls(mu_l=data["mu_l"], mu_f=data["mu_f"], name=data.get("name", name))
        for key, actual in (("A", game.A), ("B", game.B)):
            if key in data and int(data[key]) != actual:
                raise ValueError(f"declared {key}={data[key]} but matrices give {actual}")
        return game

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


@dataclass(frozen=True, order=True)
class ActionPair:
    """A joint action (a, b)."""
    a: int
    b: int

    def as_tuple(self) -> Tuple[int, int]:
        return (self.a, self.b)

    def __str__(self) -> str:
        return f"(a{self.a}, b{self.b})"


@dataclass(frozen=True)
class ResponseFunction:
    """Total map from leader actions to follower actions: entry a is F(a)."""
    map: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(b) for b in self.map))
        if not self.map:
            raise ValueError("a response function needs at least one leader action")

    def __getitem__(self, a: int) -> int:
        return self.map[a]

    def __len__(self) -> int:
        return len(self.map)

    def to_list(self) -> List[int]:
        return list(self.map)


@dataclass(frozen=True)
class ManipulationPlan:
    """A response function plus the (a′, b′) pair it is built to induce."""
    response: ResponseFunction
    target: ActionPair
    value: Optional[float] = None
    iterations: int = 0
    fallback: bool = False

    def __post_init__(self):
        if self.response[self.target.a] != self.target.b:
            raise ValueError(
                f"plan response maps a{self.target.a} to b{self.response[self.target.a]}, "
                f"not to target b{self.target.b}"
            )

    def to_dict(self) -> dict:
        return {
            "response": self.response.to_list(),
            "target": list(self.target.as_tuple()),
            "value": self.value,
            "iterations": self.iterations,
            "fallback": self.fallback,
        }


@dataclass(frozen=True)
class EquilibriumResult:
    """Stackelberg equilibrium pair with the uniqueness flags behind it."""
    pair: ActionPair
    unique_best_responses: bool
    unique_leader_argmax: bool

    @property
    def unique(self) -> bool:
        return self.unique_best_responses and self.unique_leader_argmax


def _gap_to_json(value: float) -> Optional[float]:
    return None if math.isinf(value) else value


@dataclass(frozen=True)
class GapProfile:
    """Suboptimality gaps Δ₁–Δ₆ plus the manipulation gap of a game."""
    delta1: float
    delta2: float
    delta3: float
    delta4: float
    delta5: float
    delta6: float
    manipulation_gap: float
    se_pair: ActionPair
    fm_pair: ActionPair

    @property
    def epsilon_limited(self) -> float:
        """ε used by UCBE against a best-responding follower."""
        return min(self.delta1, self.delta2)

    @property
    def epsilon_manipulation(self) -> float:
        """ε used by UCBE against an FMUCB follower."""
        return min(self.delta4, self.delta5, self.delta6)

    def to_dict(self) -> dict:
        return {
            "delta1": _gap_to_json(self.delta1),
            "delta2": _gap_to_json(self.delta2),
            "delta3": _gap_to_json(self.delta3),
            "delta4": _gap_to_json(self.delta4),
            "delta5": _gap_to_json(self.delta5),
            "delta6": _gap_to_json(self.delta6),
            "manipulation_gap": self.manipulation_gap,
            "se_pair": list(self.se_pair.as_tuple()),
            "fm_pair": list(self.fm_pair.as_tuple()),
        }


@dataclass(frozen=True)
class RoundRecord:
    """One round of the repeated game."""
    t: int
    a: int
    b: int
    r_l: float
    r_f: float
    leader_dist_hash: Optional[str] = None
    plan_target: Optional[ActionPair] = None
    fallback: bool = False

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "a": self.a,
            "b": self.b,
            "r_l": self.r_l,
            "r_f": self.r_f,
            "leader_dist_hash": self.leader_dist_hash,
            "plan_target": list(self.plan_target.as_tuple()) if self.plan_target else None,
            "fallback": self.fallback,
        }


# Metric names emitted at every checkpoint, in summary order.
SERIES_METRICS = (
    "action_regret",
    "realized_regret",
    "avg_action_regret",
    "avg_realized_regret",
    "follower_regret",
    "follower_avg_reward",
    "leader_avg_reward",
    "wrong_rounds",
    "wrong_rate",
    "target_action_rate",
)


@dataclass
class RunMetrics:
    """Aggregated regret / convergence statistics of one simulated run."""
    seed: int
    horizon: int
    target_pair: ActionPair
    checkpoints: np.ndarray
    series: Dict[str, np.ndarray]
    final_pair: ActionPair
    last_iterate_hit: bool
    trailing_hit_rate: float
    trailing_follower_reward: float
    trailing_target_action_rate: float
    fallback_rounds: int = 0
    final_plan_target: Optional[ActionPair] = None
    final_plan_matches_oracle: Optional[bool] = None

    def final(self, metric: str) -> float:
        return float(self.series[metric][-1])

    @property
    def action_regret(self) -> float:
        return self.final("action_regret")

    @property
    def realized_regret(self) -> float:
        return self.final("realized_regret")

    @property
    def follower_regret(self) -> float:
        return self.final("follower_regret")

    @property
    def follower_avg_reward(self) -> float:
        return self.final("follower_avg_reward")

    @property
    def wrong_rounds(self) -> int:
        return int(self.final("wrong_rounds"))

    def scalars(self) -> Dict[str, float]:
        """Run-level scalar metrics, keyed by the names used in summaries."""
        out = {name: self.final(name) for name in SERIES_METRICS}
        out.update({
            "last_iterate_hit": float(self.last_iterate_hit),
            "trailing_hit_rate": self.trailing_hit_rate,
            "trailing_follower_reward": self.trailing_follower_reward,
            "trailing_target_action_rate": self.trailing_target_action_rate,
            "fallback_rounds": float(self.fallback_rounds),
        })
        if self.final_plan_matches_oracle is not None:
            out["final_plan_matches_oracle"] = float(self.final_plan_matches_oracle)
        return out

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "horizon": self.horizon,
            "target_pair": list(self.target_pair.as_tuple()),
            "final_pair": list(self.final_pair.as_tuple()),
            "final_plan_target": (list(self.final_plan_target.as_tuple())
                                  if self.final_plan_target else None),
            "final_plan_matches_oracle": self.final_plan_matches_oracle,
            "scalars": self.scalars(),
        }

