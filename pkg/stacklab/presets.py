"""
Experiment Presets
Named multi-arm experiments loaded from config/presets.yaml. Each arm is a
full SimConfig; expectations are checked against the finished batches and
reported the way individual verification results are.
"""

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

from .config import config_from_dict, SimConfig
from .engine import BatchReport, batch_run
from .exceptions import ConfigError

logger = logging.getLogger(__name__)

EXPECTATION_KINDS = ("gap", "metric", "advantage", "decreasing")


def default_presets_path() -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    candidates = [
        os.path.join(here, "config", "presets.yaml"),
        os.path.join(here, "..", "config", "presets.yaml"),
    ]
    return next((c for c in candidates if os.path.exists(c)), candidates[-1])


@dataclass
class ExpectationResult:
    """Outcome of one expectation check."""
    kind: str
    arm: str
    passed: bool
    message: str
    expected: Optional[float] = None
    actual: Optional[float] = None
    provenance: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "arm": self.arm,
            "passed": self.passed,
            "message": self.message,
            "expected": self.expected,
            "actual": self.actual,
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class Expectation:
    """
    kind='gap'         the arm's game manipulation gap equals value ± tolerance
    kind='metric'      mean of a run scalar lies in [min, max]
    kind='advantage'   mean scalar of arm minus baseline equals value
                       (the game's gap when value is omitted) ± tolerance
    kind='decreasing'  a series at T is below its value at T/ratio, in mean
    """
    kind: str
    arm: str
    metric: str = ""
    value: Optional[float] = None
    tolerance: float = 0.0
    min: Optional[float] = None
    max: Optional[float] = None
    baseline: str = ""
    ratio: float = 10.0
    provenance: str = ""

    def evaluate(self, reports: Dict[str, BatchReport]) -> ExpectationResult:
        report = reports[self.arm]
        if self.kind == "gap":
            actual = report.truth.gaps.manipulation_gap
            return self._within(actual, self.value, f"manipulation gap {actual:.4f}")
        if self.kind == "metric":
            actual = report.scalar_mean(self.metric)
            low = -math.inf if self.min is None else self.min
            high = math.inf if self.max is None else self.max
            passed = low <= actual <= high
            return self._result(passed, f"mean {self.metric} {actual:.4f} in [{low}, {high}]",
                                expected=self.min if self.min is not None else self.max, actual=actual)
        if self.kind == "advantage":
            actual = report.scalar_mean(self.metric) - reports[self.baseline].scalar_mean(self.metric)
            target = report.truth.gaps.manipulation_gap if self.value is None else self.value
            return self._within(actual, target, f"{self.metric} advantage over {self.baseline} {actual:.4f}")
        return self._decreasing(report)

    def _decreasing(self, report: BatchReport) -> ExpectationResult:
        checkpoints = report.runs[0].metrics.checkpoints
        T = int(checkpoints[-1])
        early = int(np.argmin(np.abs(checkpoints - T / self.ratio)))
        values = np.vstack([r.metrics.series[self.metric] for r in report.runs]).mean(axis=0)
        passed = bool(values[-1] < values[early])
        return self._result(
            passed,
            f"mean {self.metric} {values[early]:.4g} at t={int(checkpoints[early])} -> {values[-1]:.4g} at T={T}",
            expected=float(values[early]), actual=float(values[-1]),
        )

    def _within(self, actual: float, expected: float, label: str) -> ExpectationResult:
        passed = abs(actual - expected) <= self.tolerance
        return self._result(passed, f"{label} vs {expected:.4f} ± {self.tolerance}",
                            expected=expected, actual=actual)

    def _result(self, passed: bool, message: str, expected=None, actual=None) -> ExpectationResult:
        return ExpectationResult(kind=self.kind, arm=self.arm, passed=passed, message=message,
                                 expected=expected, actual=actual, provenance=self.provenance)


@dataclass
class ExperimentPreset:
    name: str
    description: str
    arms: Dict[str, SimConfig]
    expectations: List[Expectation] = field(default_factory=list)


def _merge(base: Dict[str, Any], arm: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    merged.update(arm)
    return merged


def _parse_expectation(data: Dict[str, Any], preset: str, arms: Dict[str, SimConfig]) -> Expectation:
    key = f"presets.{preset}.expectations"
    if not isinstance(data, dict):
        raise ConfigError("expectation must be a mapping", key=key)
    allowed = set(Expectation.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown expectation key(s): {', '.join(sorted(unknown))}", key=key)
    exp = Expectation(**data)
    if exp.kind not in EXPECTATION_KINDS:
        raise ConfigError(f"unknown expectation kind '{exp.kind}'", key=key)
    for arm in filter(None, (exp.arm, exp.baseline)):
        if arm not in arms:
            raise ConfigError(f"expectation refers to unknown arm '{arm}'", key=key)
    if exp.kind == "gap" and exp.value is None:
        raise ConfigError("gap expectation needs a value", key=key)
    return exp


def load_presets(path: Optional[str] = None) -> Dict[str, ExperimentPreset]:
    """Load and validate every preset; names must be unique."""
    path = path or default_presets_path()
    with open(path, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    entries = raw.get("presets", [])
    if not isinstance(entries, list):
        raise ConfigError("'presets' must be a list", key="presets")

    presets: Dict[str, ExperimentPreset] = {}
    for entry in entries:
        name = entry.get("name")
        if not name:
            raise ConfigError("preset without a name", key="presets")
        if name in presets:
            raise ConfigError(f"duplicate preset name '{name}'", key=f"presets.{name}")
        base = entry.get("base", {})
        arms_raw = entry.get("arms") or {}
        if not arms_raw:
            raise ConfigError("preset needs at least one arm", key=f"presets.{name}.arms")
        arms = {}
        for arm_name, arm in arms_raw.items():
            doc = _merge(base, arm)
            doc.setdefault("name", f"{name}/{arm_name}")
            arms[arm_name] = config_from_dict(doc)
        expectations = [_parse_expectation(e, name, arms) for e in entry.get("expectations", [])]
        presets[name] = ExperimentPreset(
            name=name,
            description=entry.get("description", ""),
            arms=arms,
            expectations=expectations,
        )
    return presets


@dataclass
class PresetOutcome:
    preset: ExperimentPreset
    reports: Dict[str, BatchReport]
    results: List[ExpectationResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {
            "preset": self.preset.name,
            "description": self.preset.description,
            "passed": self.passed,
            "expectations": [r.to_dict() for r in self.results],
            "arms": {name: rep.overview() for name, rep in self.reports.items()},
        }

    def print_summary(self):
        for report in self.reports.values():
            report.print_summary()
        if not self.results:
            return
        print(f"  EXPECTATIONS: {self.preset.name}")
        print(f"  {'─'*66}")
        for r in self.results:
            icon = "✓" if r.passed else "✗"
            print(f"    {icon} [{r.kind}] {r.arm}: {r.message}")
            if r.provenance:
                print(f"       ({r.provenance})")
        print()


def run_preset(
    name: str,
    presets: Optional[Dict[str, ExperimentPreset]] = None,
    seeds: Optional[List[int]] = None,
    horizon: Optional[int] = None,
    noiseless: bool = False,
    schedule: Optional[str] = None,
    n_jobs: int = 1,
) -> PresetOutcome:
    """Run every arm of a preset (with CLI overrides) and check its expectations."""
    presets = presets if presets is not None else load_presets()
    if name not in presets:
        raise ConfigError(f"unknown preset '{name}' (choices: {', '.join(presets)})", key="preset")
    preset = presets[name]
    reports = {}
    for arm_name, config in preset.arms.items():
        config = config.with_overrides(horizon=horizon, seeds=seeds, noiseless=noiseless,
                                       schedule=schedule)
        logger.info("preset %s: arm %s", name, arm_name)
        reports[arm_name] = batch_run(config, n_jobs=n_jobs)
    results = [exp.evaluate(reports) for exp in preset.expectations]
    return PresetOutcome(preset=preset, reports=reports, results=results)
