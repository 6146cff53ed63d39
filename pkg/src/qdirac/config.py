"""Experiment configuration: YAML file plus flag overrides."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import yaml

from .errors import ConfigError
from .gridrep import GridConfig
from .oscillator import check_xi
from .qalgebra import DeformationParam, check_dim
from .states import CoherentParam

EXPERIMENTS = (
    "spectrum",
    "mandel",
    "zitter-number",
    "zitter-coherent",
    "fig2",
    "nr-limit",
    "grid-verify",
    "equivalence",
)

_COMMON = {"out": "results", "seed": 12345}

# per-experiment defaults; keys absent here do not apply to that experiment
DEFAULTS = {
    "spectrum": {"q": 0.75, "xi": 0.25, "n": 35, "trunc": 40},
    "mandel": {"q": (0.25, 0.75), "alpha_sq_max": None, "sweep_steps": 40},
    "zitter-number": {"q": 0.75, "xi": 0.25, "n": 2, "trunc": None, "tau_max": 20.0, "tau_steps": 401},
    "zitter-coherent": {"q": 0.75, "xi": 0.25, "alpha": 1.0, "trunc": None, "tau_max": 20.0, "tau_steps": 401},
    "fig2": {"q": 0.75, "xi": 0.25, "alpha": 1.0, "trunc": None, "tau_max": 200.0, "tau_steps": 20001},
    "nr-limit": {
        "q": 0.75, "xi": 0.01, "n": 1, "trunc": None, "tau_max": 20.0, "tau_steps": 401,
        "c_up": 0.6, "c_down": 0.8,
    },
    "grid-verify": {"q": 0.75, "xi": 0.25, "points": (256, 512, 1024), "shift_steps": 8},
    "equivalence": {"q": 0.75, "xi": 0.25, "trunc": 40},
}

_INT = {"n", "trunc", "tau_steps", "sweep_steps", "shift_steps", "seed"}
_FLOAT = {"xi", "alpha", "tau_max", "alpha_sq_max", "c_up", "c_down"}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    q: float | tuple[float, ...] | None = None
    xi: float | None = None
    n: int | None = None
    alpha: float | None = None
    trunc: int | None = None
    tau_max: float | None = None
    tau_steps: int | None = None
    alpha_sq_max: float | None = None
    sweep_steps: int | None = None
    points: tuple[int, ...] | None = None
    shift_steps: int | None = None
    c_up: float | None = None
    c_down: float | None = None
    out: str = "results"
    seed: int = 12345

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        """Validate, fill experiment defaults and coerce types."""
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a mapping")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        exp = data.get("experiment")
        if exp not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {exp!r}")
        allowed = DEFAULTS[exp]
        values = {"experiment": exp, **_COMMON, **allowed}
        for key, value in data.items():
            if key == "experiment" or value is None:
                continue
            if key not in allowed and key not in _COMMON:
                raise ConfigError(f"{key!r} does not apply to experiment {exp!r}")
            values[key] = _coerce(key, value, exp)
        cfg = cls(**values)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        out = {}
        for key, value in asdict(self).items():
            if key != "experiment" and key not in DEFAULTS[self.experiment] and key not in _COMMON:
                continue
            out[key] = list(value) if isinstance(value, tuple) else value
        return out

    def with_overrides(self, overrides: dict) -> ExperimentConfig:
        merged = {**self.to_dict(), **{k: v for k, v in overrides.items() if v is not None}}
        return ExperimentConfig.from_dict(merged)

    def validate(self) -> None:
        """Re-run the parameter checks of the module the experiment calls."""
        for q in self.q_values:
            DeformationParam(q)
        if self.xi is not None:
            check_xi(self.xi)
        if self.trunc is not None:
            check_dim(self.trunc)
        if self.n is not None:
            if self.n < 1:
                raise ConfigError("n must be >= 1")
            if self.trunc is not None and self.trunc < self.n + 1:
                raise ConfigError(f"trunc {self.trunc} cannot hold |{self.n}>")
        if self.experiment == "spectrum" and self.n + 1 >= self.trunc - 1:
            raise ConfigError("spectrum needs n + 1 < trunc - 1 to stay clear of the truncation edge")
        if self.alpha is not None:
            CoherentParam(self.alpha, self.q)
        if self.tau_max is not None and not (math.isfinite(self.tau_max) and self.tau_max > 0):
            raise ConfigError("tau_max must be positive and finite")
        if self.tau_steps is not None and self.tau_steps < 2:
            raise ConfigError("tau_steps must be >= 2")
        if self.sweep_steps is not None and self.sweep_steps < 2:
            raise ConfigError("sweep_steps must be >= 2")
        if self.experiment == "mandel":
            if self.alpha_sq_max is None and 1.0 in self.q_values:
                raise ConfigError("q = 1 has no radius of convergence; set alpha_sq_max")
            if self.alpha_sq_max is not None and self.alpha_sq_max <= 0:
                raise ConfigError("alpha_sq_max must be positive")
            for q in self.q_values:
                if self.alpha_sq_max is not None and self.alpha_sq_max > DeformationParam(q).radius:
                    raise ConfigError(f"alpha_sq_max exceeds the radius of convergence for q = {q:g}")
        if self.points is not None:
            if len(self.points) < 2:
                raise ConfigError("grid-verify needs at least two grid sizes")
            if list(self.points) != sorted(set(self.points)):
                raise ConfigError("grid sizes must be strictly increasing")
            for m in self.points:
                GridConfig(self.q, m, self.shift_steps)
        if self.c_up is not None:
            if abs(self.c_up**2 + self.c_down**2 - 1.0) > 1e-12:
                raise ConfigError("c_up^2 + c_down^2 must equal 1")

    @property
    def q_values(self) -> tuple[float, ...]:
        if self.q is None:
            return ()
        return self.q if isinstance(self.q, tuple) else (self.q,)


def _coerce(key, value, exp):
    try:
        if key == "q":
            if exp == "mandel":
                vals = value if isinstance(value, (list, tuple)) else [value]
                return tuple(float(v) for v in vals)
            if isinstance(value, (list, tuple)):
                raise ConfigError(f"experiment {exp!r} takes a single q")
            return float(value)
        if key == "points":
            if not isinstance(value, (list, tuple)):
                raise ConfigError("points must be a list of grid sizes")
            return tuple(_as_int(v, key) for v in value)
        if key in _INT:
            return _as_int(value, key)
        if key in _FLOAT:
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if key == "out":
            return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    raise ConfigError(f"unhandled key {key!r}")


def _as_int(value, key):
    if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
        raise ConfigError(f"{key!r} must be an integer, got {value!r}")
    return int(value)


def load_yaml(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a mapping")
    return data

