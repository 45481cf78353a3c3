"""
Simulation Configuration
Parses YAML/JSON documents into a validated SimConfig. Unknown keys are
rejected; parse and validation errors carry the offending key and, where the
document is text, its line number.
"""

import os
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Union

import numpy as np
import yaml

from .exceptions import ConfigError, InformationModelError
from .followers import FOLLOWER_REGISTRY
from .game import BUILTIN_GAMES, load_game, random_game
from .learners import LEADER_REGISTRY
from .models import GameInstance, InformationSetting, NoiseMode, TraceGranularity
from .rng import GAME, RngStream


DEFAULT_DELTA = 0.01
DEFAULT_WINDOW = 1000
DEFAULT_CHECKPOINTS = 20

DEFAULT_INFORMATION = {
    "ucb": InformationSetting.LIMITED,
    "fmucb": InformationSetting.SIDE,
    "fbm": InformationSetting.OMNISCIENT,
    "fbm_pessimistic": InformationSetting.OMNISCIENT,
    "best_response": InformationSetting.OMNISCIENT,
}

TOP_LEVEL_KEYS = {"game", "leader", "follower", "T", "horizon", "seeds", "noise",
                  "trace", "checkpoints", "window", "schedule", "name"}
LEADER_KEYS = {"algorithm", "alpha", "eta", "s0", "s0_multiplier", "epsilon", "delta"}
FOLLOWER_KEYS = {"strategy", "delta", "information"}
GAME_KEYS = {"A", "B", "mu_l", "mu_f", "name"}
RANDOM_KEYS = {"A", "B", "seed"}

SCHEDULES = ("literal", "theorem")

Delta = Union[float, str]


def resolve_delta(delta: Delta, horizon: int) -> float:
    """A number, or 'theorem' for δ = T^(-3)."""
    if delta == "theorem":
        return float(horizon) ** -3
    return float(delta)


# ============================================================================
# Config dataclasses
# ============================================================================

@dataclass(frozen=True)
class GameSource:
    """Where the game comes from: builtin, explicit matrices, random or a file."""
    kind: str
    name: str = ""
    game: Optional[GameInstance] = None
    A: int = 0
    B: int = 0
    seed: int = 0
    path: str = ""

    def build(self) -> GameInstance:
        if self.kind == "builtin":
            return BUILTIN_GAMES[self.name]
        if self.kind == "matrix":
            return self.game
        if self.kind == "file":
            return load_game(self.path)
        return random_game(self.A, self.B, RngStream(self.seed, GAME),
                           name=f"random-{self.A}x{self.B}-{self.seed}")

    def describe(self) -> str:
        if self.kind == "random":
            return f"random {self.A}x{self.B} (seed {self.seed})"
        if self.kind == "file":
            return self.path
        return self.name or self.kind


@dataclass(frozen=True)
class LeaderSpec:
    algorithm: str
    alpha: Optional[float] = None
    eta: Optional[float] = None
    s0: Optional[float] = None
    s0_multiplier: float = 1.0
    epsilon: Optional[float] = None
    delta: Delta = DEFAULT_DELTA

    def exp3_parameters(self, horizon: int, schedule: str):
        """(α, η); the theorem schedule and missing values use T^(-1/3)."""
        theorem = float(horizon) ** (-1.0 / 3.0)
        if schedule == "theorem":
            return theorem, theorem
        alpha = theorem if self.alpha is None else self.alpha
        eta = theorem if self.eta is None else self.eta
        return alpha, eta


@dataclass(frozen=True)
class FollowerSpec:
    strategy: str
    delta: Delta = DEFAULT_DELTA
    information: InformationSetting = InformationSetting.LIMITED


@dataclass(frozen=True)
class SimConfig:
    """A validated simulation request."""
    game: GameSource
    leader: LeaderSpec
    follower: FollowerSpec
    horizon: int
    seeds: List[int]
    noise: NoiseMode = NoiseMode.BERNOULLI
    trace: TraceGranularity = TraceGranularity.CHECKPOINTS
    checkpoints: Optional[List[int]] = None
    checkpoint_count: int = DEFAULT_CHECKPOINTS
    window: int = DEFAULT_WINDOW
    schedule: str = "literal"
    name: str = "run"
    extra: Dict[str, Any] = field(default_factory=dict)

    def checkpoint_rounds(self) -> np.ndarray:
        """Sorted unique rounds in [1, T] at which series are reported; T always included."""
        T = self.horizon
        if self.checkpoints is not None:
            points = [c for c in self.checkpoints if 1 <= c <= T]
        else:
            points = np.geomspace(1, T, num=min(self.checkpoint_count, T)).round().astype(int).tolist()
        return np.unique(np.array(points + [T], dtype=np.int64))

    def with_overrides(self, horizon: Optional[int] = None, seeds: Optional[List[int]] = None,
                       noiseless: bool = False, schedule: Optional[str] = None) -> "SimConfig":
        """CLI overrides; returns a new validated config."""
        updated = self
        if horizon is not None:
            _positive_int(horizon, "T")
            updated = replace(updated, horizon=int(horizon), checkpoints=None)
        if seeds is not None:
            updated = replace(updated, seeds=_seed_list(seeds))
        if noiseless:
            updated = replace(updated, noise=NoiseMode.NOISELESS)
        if schedule is not None:
            updated = replace(updated, schedule=_choice(schedule, SCHEDULES, "schedule"))
        return updated


# ============================================================================
# Parsing
# ============================================================================

def _key_lines(text: str) -> Dict[str, int]:
    """Dotted key path -> 1-based line of the key in the YAML text."""
    lines: Dict[str, int] = {}
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return lines

    def walk(node, prefix):
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                path = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
                lines[path] = key_node.start_mark.line + 1
                walk(value_node, path)

    walk(root, "")
    return lines


class _Parser:
    def __init__(self, lines: Dict[str, int], base_dir: str = ""):
        self.lines = lines
        self.base_dir = base_dir

    def error(self, message: str, key: str) -> ConfigError:
        return ConfigError(message, key=key, line=self.lines.get(key))

    def reject_unknown(self, data: Dict[str, Any], allowed: set, prefix: str = ""):
        for key in data:
            if key not in allowed:
                path = f"{prefix}.{key}" if prefix else str(key)
                raise self.error(f"unknown key '{key}'", path)

    def number(self, data: Dict[str, Any], key: str, path: str, low: float, high: float,
               low_open: bool = False, default=None):
        if key not in data or data[key] is None:
            return default
        value = data[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(f"{key} must be a number, got {value!r}", path)
        below = value <= low if low_open else value < low
        if below or value > high:
            bracket = "(" if low_open else "["
            raise self.error(f"{key}={value} out of range {bracket}{low}, {high}]", path)
        return float(value)

    def delta(self, data: Dict[str, Any], path: str) -> Delta:
        if data.get("delta") == "theorem":
            return "theorem"
        return self.number(data, "delta", path, 0.0, 1.0, low_open=True, default=DEFAULT_DELTA)

    def game(self, value: Any) -> GameSource:
        if isinstance(value, str):
            if value in BUILTIN_GAMES:
                return GameSource(kind="builtin", name=value)
            for path in (value, os.path.join(self.base_dir, value)):
                if os.path.isfile(path):
                    return GameSource(kind="file", name=os.path.basename(path), path=path)
            raise self.error(f"unknown game '{value}' (builtins: {', '.join(BUILTIN_GAMES)})", "game")
        if not isinstance(value, dict):
            raise self.error("game must be a name, a path or a mapping", "game")
        if "random" in value:
            self.reject_unknown(value, {"random"}, "game")
            spec = value["random"] or {}
            if not isinstance(spec, dict):
                raise self.error("game.random must be a mapping", "game.random")
            self.reject_unknown(spec, RANDOM_KEYS, "game.random")
            A = _positive_int(spec.get("A"), "game.random.A", self.lines)
            B = _positive_int(spec.get("B"), "game.random.B", self.lines)
            seed = _seed(spec.get("seed", 0), "game.random.seed", self.lines)
            return GameSource(kind="random", A=A, B=B, seed=seed)
        self.reject_unknown(value, GAME_KEYS, "game")
        for key in ("mu_l", "mu_f"):
            if key not in value:
                raise self.error(f"game matrix '{key}' missing", f"game.{key}")
        try:
            game = GameInstance.from_dict(value, name=value.get("name", "custom"))
        except ValueError as e:
            raise self.error(str(e), "game") from e
        return GameSource(kind="matrix", name=game.name, game=game)

    def leader(self, value: Any) -> LeaderSpec:
        data = {"algorithm": value} if isinstance(value, str) else value
        if not isinstance(data, dict) or "algorithm" not in data:
            raise self.error("leader must be an algorithm name or a mapping with 'algorithm'", "leader")
        self.reject_unknown(data, LEADER_KEYS, "leader")
        algorithm = data["algorithm"]
        if algorithm not in LEADER_REGISTRY:
            raise self.error(f"unknown leader algorithm '{algorithm}' "
                             f"(choices: {', '.join(LEADER_REGISTRY)})", "leader.algorithm")
        return LeaderSpec(
            algorithm=algorithm,
            alpha=self.number(data, "alpha", "leader.alpha", 0.0, 1.0),
            eta=self.number(data, "eta", "leader.eta", 0.0, np.inf, low_open=True),
            s0=self.number(data, "s0", "leader.s0", 0.0, np.inf),
            s0_multiplier=self.number(data, "s0_multiplier", "leader.s0_multiplier",
                                      0.0, np.inf, low_open=True, default=1.0),
            epsilon=self.number(data, "epsilon", "leader.epsilon", 0.0, np.inf, low_open=True),
            delta=self.delta(data, "leader.delta"),
        )

    def follower(self, value: Any) -> FollowerSpec:
        data = {"strategy": value} if isinstance(value, str) else value
        if not isinstance(data, dict) or "strategy" not in data:
            raise self.error("follower must be a strategy name or a mapping with 'strategy'", "follower")
        self.reject_unknown(data, FOLLOWER_KEYS, "follower")
        strategy = data["strategy"]
        if strategy not in FOLLOWER_REGISTRY:
            raise self.error(f"unknown follower strategy '{strategy}' "
                             f"(choices: {', '.join(FOLLOWER_REGISTRY)})", "follower.strategy")
        info_name = data.get("information")
        if info_name is None:
            information = DEFAULT_INFORMATION[strategy]
        else:
            information = _enum(InformationSetting, info_name, "follower.information", self.lines)
        allowed = FOLLOWER_REGISTRY[strategy].information_settings
        if information not in allowed:
            raise InformationModelError(
                f"follower '{strategy}' cannot run with information '{information.value}' "
                f"(allowed: {', '.join(sorted(s.value for s in allowed))})",
                key="follower.information", line=self.lines.get("follower.information"),
            )
        return FollowerSpec(strategy=strategy, delta=self.delta(data, "follower.delta"),
                            information=information)


def _positive_int(value: Any, key: str, lines: Optional[Dict[str, int]] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{key} must be an integer >= 1, got {value!r}", key=key,
                          line=(lines or {}).get(key))
    return value


def _seed(value: Any, key: str, lines: Optional[Dict[str, int]] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or not -2**63 <= value < 2**64:
        raise ConfigError(f"seed must be a 64-bit integer, got {value!r}", key=key,
                          line=(lines or {}).get(key))
    return value


def _seed_list(values: Any, lines: Optional[Dict[str, int]] = None) -> List[int]:
    if isinstance(values, int) and not isinstance(values, bool):
        values = [values]
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError("seeds must be a non-empty list of integers", key="seeds",
                          line=(lines or {}).get("seeds"))
    return [_seed(v, "seeds", lines) for v in values]


def _choice(value: Any, choices, key: str, lines: Optional[Dict[str, int]] = None) -> str:
    if value not in choices:
        raise ConfigError(f"{key} must be one of {', '.join(choices)}, got {value!r}", key=key,
                          line=(lines or {}).get(key))
    return value


def _enum(enum_cls, value: Any, key: str, lines: Optional[Dict[str, int]] = None):
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(m.value for m in enum_cls)
        raise ConfigError(f"{key} must be one of {choices}, got {value!r}", key=key,
                          line=(lines or {}).get(key)) from None


def config_from_dict(data: Dict[str, Any], lines: Optional[Dict[str, int]] = None,
                     base_dir: str = "") -> SimConfig:
    """Validate an already-loaded mapping. Relative game paths also resolve against base_dir."""
    lines = lines or {}
    parser = _Parser(lines, base_dir)
    if not isinstance(data, dict):
        raise ConfigError("config document must be a mapping")
    parser.reject_unknown(data, TOP_LEVEL_KEYS)
    for required in ("game", "leader", "follower", "seeds"):
        if required not in data:
            raise ConfigError(f"missing required key '{required}'", key=required)
    if "T" in data and "horizon" in data:
        raise parser.error("give either T or horizon, not both", "horizon")
    horizon_key = "T" if "T" in data else "horizon"
    if horizon_key not in data:
        raise ConfigError("missing required key 'T'", key="T")

    checkpoints = data.get("checkpoints")
    checkpoint_count = DEFAULT_CHECKPOINTS
    if isinstance(checkpoints, int) and not isinstance(checkpoints, bool):
        checkpoint_count = _positive_int(checkpoints, "checkpoints", lines)
        checkpoints = None
    elif checkpoints is not None:
        if not isinstance(checkpoints, list) or not checkpoints:
            raise parser.error("checkpoints must be a count or a non-empty list of rounds", "checkpoints")
        checkpoints = [_positive_int(c, "checkpoints", lines) for c in checkpoints]

    return SimConfig(
        game=parser.game(data["game"]),
        leader=parser.leader(data["leader"]),
        follower=parser.follower(data["follower"]),
        horizon=_positive_int(data[horizon_key], horizon_key, lines),
        seeds=_seed_list(data["seeds"], lines),
        noise=_enum(NoiseMode, data.get("noise", "bernoulli"), "noise", lines),
        trace=_enum(TraceGranularity, data.get("trace", "checkpoints"), "trace", lines),
        checkpoints=checkpoints,
        checkpoint_count=checkpoint_count,
        window=_positive_int(data.get("window", DEFAULT_WINDOW), "window", lines),
        schedule=_choice(data.get("schedule", "literal"), SCHEDULES, "schedule", lines),
        name=str(data.get("name", "run")),
    )


def parse_config(source: Union[str, os.PathLike, Dict[str, Any]]) -> SimConfig:
    """
    Build a SimConfig from a path, inline YAML/JSON text or a mapping.
    """
    if isinstance(source, dict):
        return config_from_dict(source)
    text = str(source)
    base_dir = ""
    if isinstance(source, os.PathLike) or ("\n" not in text and os.path.isfile(text)):
        base_dir = os.path.dirname(os.path.abspath(text))
        with open(text, "r", encoding="utf-8") as f:
            text = f.read()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"malformed config document: {getattr(e, 'problem', e)}", line=line) from e
    return config_from_dict(data, _key_lines(text), base_dir)
