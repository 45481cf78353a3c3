"""
Error hierarchy for the simulator.
Every error raised deliberately by stacklab derives from StackLabError.
"""

from typing import Optional


class StackLabError(Exception):
    """Base class for all simulator errors."""


class ConfigError(StackLabError, ValueError):
    """A configuration document failed to parse or validate."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        location = []
        if key:
            location.append(f"key '{key}'")
        if line is not None:
            location.append(f"line {line}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")

    def to_dict(self) -> dict:
        return {"error": "config", "message": str(self), "key": self.key, "line": self.line}


class InformationModelError(ConfigError):
    """Leader rewards were offered to a follower that may not observe them."""


class ContractViolation(StackLabError, ValueError):
    """A learner received input outside its contract (e.g. reward not in [0,1])."""


class GameGenerationError(StackLabError):
    """Random game generation hit its resample cap."""


class ManipulationError(StackLabError):
    """The FBM candidate set was exhausted without a qualified manipulation."""


class DegenerateGameError(StackLabError):
    """The game admits no qualified manipulation (ties everywhere)."""


class EnumerationLimitError(StackLabError):
    """Exhaustive enumeration would exceed the configured cap."""


class ReportWriteError(StackLabError, OSError):
    """An output file could not be written; the message names the path."""
