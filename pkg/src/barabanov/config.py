"""Experiment configuration documents and the catalog of named presets.

A config is one JSON document with nested sections.  Every section is checked
against its dataclass before anything is computed; unknown keys are errors so
that typos never silently fall back to defaults.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .linalg import MatrixPair, make_affine_pair, make_rotation_pair
from .norm import IterationConfig, Scheme
from .trajectory import DEFAULT_START, TieRule


class ConfigError(ValueError):
    pass


PRESETS: dict[str, dict[str, Any]] = {
    "eqM1-mycase": {"family": "affine", "alpha": 0.576, "beta": 0.8, "a": 0.9, "b": 1.1, "c": 1.0, "d": 0.9},
    "case1": {"family": "rotation", "theta0": 0.4, "theta1": 0.8, "lam": 0.75},
    "case2": {"family": "rotation", "theta0": 0.6151, "theta1": 0.8, "lam": 0.75},
    "case3": {"family": "rotation", "theta0": 0.7, "theta1": 0.8, "lam": 0.75},
}

_FAMILY_KEYS = {
    "affine": ("alpha", "beta", "a", "b", "c", "d"),
    "rotation": ("theta0", "theta1", "lam"),
    "matrices": ("a0", "a1"),
}


def _number(section: str, key: str, v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{section}.{key}: expected a finite number, got {v!r}")
    return float(v)


def _integer(section: str, key: str, v, lo: int = 1) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < lo:
        raise ConfigError(f"{section}.{key}: expected an integer >= {lo}, got {v!r}")
    return v


def _check_keys(section: str, doc, allowed) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(f"{section}: expected a mapping")
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise ConfigError(f"{section}: unknown field(s) {', '.join(extra)}")


@dataclass(frozen=True)
class PairSpec:
    """Either a preset name or a family with its parameters."""

    family: str
    params: dict[str, Any]
    preset: str | None = None

    @classmethod
    def from_doc(cls, doc) -> "PairSpec":
        if isinstance(doc, str):
            doc = {"preset": doc}
        _check_keys("pair", doc, {"preset", "family", *sum(_FAMILY_KEYS.values(), ())})
        if "preset" in doc:
            if len(doc) != 1:
                raise ConfigError("pair: a preset cannot be combined with explicit parameters")
            name = doc["preset"]
            if name not in PRESETS:
                raise ConfigError(f"pair.preset: unknown preset {name!r} (known: {', '.join(PRESETS)})")
            body = dict(PRESETS[name])
            return cls(body.pop("family"), body, preset=name)
        fam = doc.get("family")
        if fam not in _FAMILY_KEYS:
            raise ConfigError(f"pair.family: expected one of {', '.join(_FAMILY_KEYS)}")
        params = {k: v for k, v in doc.items() if k != "family"}
        need = set(_FAMILY_KEYS[fam])
        if set(params) != need:
            raise ConfigError(f"pair: family {fam!r} needs exactly {', '.join(sorted(need))}")
        if fam == "matrices":
            for k in ("a0", "a1"):
                m = np.asarray(params[k], dtype=object)
                if m.shape != (2, 2):
                    raise ConfigError(f"pair.{k}: expected a 2x2 nested list")
                params[k] = [[_number("pair", k, x) for x in row] for row in params[k]]
        else:
            params = {k: _number("pair", k, v) for k, v in params.items()}
        return cls(fam, params)

    def build(self) -> MatrixPair:
        try:
            if self.family == "affine":
                return make_affine_pair(**self.params)
            if self.family == "rotation":
                return make_rotation_pair(**self.params)
            return MatrixPair.raw(self.params["a0"], self.params["a1"])
        except ValueError as exc:
            raise ConfigError(f"pair: {exc}") from exc

    def to_doc(self) -> dict:
        if self.preset is not None:
            return {"preset": self.preset}
        return {"family": self.family, **self.params}


@dataclass(frozen=True)
class TrajectorySection:
    steps: int = 10_000
    start: tuple[float, float] = DEFAULT_START
    tie_rule: TieRule = TieRule.PREFER_ONE


@dataclass(frozen=True)
class AngularSection:
    grid: int = 8192
    # "auto": the first quadrant when both matrices are entrywise nonnegative
    # (it is then invariant), otherwise the whole circle [0, pi)
    domain: str | tuple[float, float] = "auto"
    rotation_iterations: int = 100_000


@dataclass(frozen=True)
class AnalysisSection:
    window: int = 4
    n_max: int = 20


@dataclass(frozen=True)
class EmitFlags:
    polygon: bool = True
    trajectory: bool = True
    angular: bool = True
    stats: bool = True
    figures: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    pair: PairSpec
    iteration: IterationConfig = field(default_factory=IterationConfig)
    trajectory: TrajectorySection = field(default_factory=TrajectorySection)
    angular: AngularSection = field(default_factory=AngularSection)
    analysis: AnalysisSection = field(default_factory=AnalysisSection)
    out: str = "out"
    emit: EmitFlags = field(default_factory=EmitFlags)

    def to_doc(self) -> dict:
        it = self.iteration
        tr = self.trajectory
        return {
            "pair": self.pair.to_doc(),
            "iteration": {
                "tol": it.tol,
                "max_iter": it.max_iter,
                "initial_vertices": it.initial_vertices,
                "prune_eps": it.prune_eps,
                "scheme": it.scheme.value,
                "reference_direction": list(it.reference_direction),
            },
            "trajectory": {"steps": tr.steps, "start": list(tr.start), "tie_rule": tr.tie_rule.value},
            "angular": {
                "grid": self.angular.grid,
                "domain": self.angular.domain if isinstance(self.angular.domain, str) else list(self.angular.domain),
                "rotation_iterations": self.angular.rotation_iterations,
            },
            "analysis": dataclasses.asdict(self.analysis),
            "out": self.out,
            "emit": dataclasses.asdict(self.emit),
        }

    def angular_domain(self, pair: MatrixPair) -> tuple[float, float]:
        d = self.angular.domain
        if d == "full":
            return (0.0, math.pi)
        if d == "auto":
            nonneg = bool(np.all(pair.a0 >= 0) and np.all(pair.a1 >= 0))
            return (0.0, 0.5 * math.pi) if nonneg else (0.0, math.pi)
        return d


def _iteration(doc) -> IterationConfig:
    names = {f.name for f in dataclasses.fields(IterationConfig)}
    _check_keys("iteration", doc, names)
    kw: dict[str, Any] = {}
    for k, v in doc.items():
        if k in ("tol", "prune_eps"):
            kw[k] = _number("iteration", k, v)
        elif k in ("max_iter", "initial_vertices"):
            kw[k] = _integer("iteration", k, v)
        elif k == "scheme":
            try:
                kw[k] = Scheme(v)
            except ValueError:
                raise ConfigError(f"iteration.scheme: expected one of {[s.value for s in Scheme]}") from None
        else:
            if not isinstance(v, list) or len(v) != 2:
                raise ConfigError("iteration.reference_direction: expected [x, y]")
            kw[k] = tuple(_number("iteration", k, c) for c in v)
    try:
        return IterationConfig(**kw)
    except ValueError as exc:
        raise ConfigError(f"iteration: {exc}") from exc


def _trajectory(doc) -> TrajectorySection:
    _check_keys("trajectory", doc, {"steps", "start", "tie_rule"})
    kw: dict[str, Any] = {}
    if "steps" in doc:
        kw["steps"] = _integer("trajectory", "steps", doc["steps"])
    if "start" in doc:
        v = doc["start"]
        if not isinstance(v, list) or len(v) != 2:
            raise ConfigError("trajectory.start: expected [x, y]")
        kw["start"] = tuple(_number("trajectory", "start", c) for c in v)
        if kw["start"] == (0.0, 0.0):
            raise ConfigError("trajectory.start: must be nonzero")
    if "tie_rule" in doc:
        try:
            kw["tie_rule"] = TieRule(doc["tie_rule"])
        except ValueError:
            raise ConfigError(f"trajectory.tie_rule: expected one of {[t.value for t in TieRule]}") from None
    return TrajectorySection(**kw)


def _angular(doc) -> AngularSection:
    _check_keys("angular", doc, {"grid", "domain", "rotation_iterations"})
    kw: dict[str, Any] = {}
    if "grid" in doc:
        kw["grid"] = _integer("angular", "grid", doc["grid"], lo=16)
    if "rotation_iterations" in doc:
        kw["rotation_iterations"] = _integer("angular", "rotation_iterations", doc["rotation_iterations"], lo=0)
    if "domain" in doc:
        d = doc["domain"]
        if d in ("auto", "full"):
            kw["domain"] = d
        elif isinstance(d, list) and len(d) == 2:
            lo, hi = (_number("angular", "domain", c) for c in d)
            if not 0.0 <= lo < hi <= math.pi:
                raise ConfigError("angular.domain: need 0 <= lo < hi <= pi")
            kw["domain"] = (lo, hi)
        else:
            raise ConfigError('angular.domain: expected "auto", "full" or [lo, hi]')
    return AngularSection(**kw)


def _analysis(doc) -> AnalysisSection:
    _check_keys("analysis", doc, {"window", "n_max"})
    kw = {k: _integer("analysis", k, v) for k, v in doc.items()}
    return AnalysisSection(**kw)


def _emit(doc) -> EmitFlags:
    names = {f.name for f in dataclasses.fields(EmitFlags)}
    _check_keys("emit", doc, names)
    for k, v in doc.items():
        if not isinstance(v, bool):
            raise ConfigError(f"emit.{k}: expected true/false")
    return EmitFlags(**doc)


def parse_config(doc) -> ExperimentConfig:
    """Validate a config document (already decoded from JSON)."""
    _check_keys("config", doc, {"pair", "iteration", "trajectory", "angular", "analysis", "out", "emit"})
    if "pair" not in doc:
        raise ConfigError("config: missing 'pair'")
    kw: dict[str, Any] = {"pair": PairSpec.from_doc(doc["pair"])}
    for key, fn in (
        ("iteration", _iteration),
        ("trajectory", _trajectory),
        ("angular", _angular),
        ("analysis", _analysis),
        ("emit", _emit),
    ):
        if key in doc:
            kw[key] = fn(doc[key])
    if "out" in doc:
        if not isinstance(doc["out"], str) or not doc["out"]:
            raise ConfigError("out: expected a nonempty path string")
        kw["out"] = doc["out"]
    return ExperimentConfig(**kw)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(doc)
