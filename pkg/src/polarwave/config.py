"""Flat ``key = value`` run configuration.

Keys are dot-namespaced: ``params.*`` feeds :class:`SystemParams`, ``grid.*`` sets the sweep
abscissa, ``run.*`` holds experiment knobs, and ``experiment`` / ``output`` name the job.
Anything left out takes the defaults below.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

import numpy as np

from .errors import OutOfRange, ParseError, UnknownKey
from .model import ROUNDED_Q0, SystemParams

EXPERIMENTS = (
    "dispersion",
    "fractions",
    "interaction-strength",
    "defect-scattering",
    "impurity-scattering",
    "ls-oracle",
    "pump-probe",
    "symmetric-pump",
    "bistability",
    "correlation",
    "channels",
)

#: fiber length used whenever the config does not override it (1 mm)
DEFAULT_FIBER_LENGTH = 1e7


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _optional(conv: Callable[[str], Any]) -> Callable[[str], Any]:
    def parse(text: str) -> Any:
        return None if text.lower() == "none" else conv(text)

    return parse


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text

    return parse


_PARAM_KEYS: dict[str, Callable[[str], Any]] = {
    "e_a": float,
    "a": float,
    "n_sites": _int,
    "epsilon": float,
    "mu": float,
    "u_b": float,
    "q0": _optional(float),
    "l_fiber": _optional(float),
    "gamma_a": float,
    "gamma_c": float,
    "e_d": _optional(float),
}


@dataclass(frozen=True)
class RunSettings:
    """Experiment knobs; every field is reachable as ``run.<name>``."""

    k: float = 1e-6
    k2: float = 1e-6
    m_eff: float = 4.0
    detuning: float | None = 0.0
    n_pump: float = 100.0
    delta_bar: float = 1e-3
    strength: float = 1.0
    ka1: float = 5e-3
    ka2: float = 25e-3
    n_grid: int = 4096
    lower_only: bool = True
    parabolic: bool = True
    z_n: float = 0.0
    power: float = 1.5e-2
    probe_power: float = 1.0


_RUN_KEYS: dict[str, Callable[[str], Any]] = {
    "k": float,
    "k2": float,
    "m_eff": float,
    "detuning": _optional(float),
    "n_pump": float,
    "delta_bar": float,
    "strength": float,
    "ka1": float,
    "ka2": float,
    "n_grid": _int,
    "lower_only": _bool,
    "parabolic": _bool,
    "z_n": float,
    "power": float,
    "probe_power": float,
}

_GRID_KEYS: dict[str, Callable[[str], Any]] = {
    "start": float,
    "stop": float,
    "count": _int,
    "scale": _choice("linear", "log"),
}


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def __post_init__(self) -> None:
        if self.count < 2:
            raise OutOfRange(f"grid.count must be >= 2, got {self.count}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop) and self.stop > self.start):
            raise OutOfRange("grid needs finite start < stop")
        if self.scale == "log" and not self.start > 0:
            raise OutOfRange("log grid needs start > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


#: abscissa defaults per experiment, framing the feature each sweep is about
DEFAULT_GRIDS: dict[str, GridSpec] = {
    "dispersion": GridSpec(-3e-4, 3e-4, 601),
    "fractions": GridSpec(-1e-4, 1e-4, 401),
    "interaction-strength": GridSpec(-1e-3, 0.0, 401),
    "defect-scattering": GridSpec(-2e-3, 0.0, 401),
    "impurity-scattering": GridSpec(-5e-3, 5e-3, 1001),
    "ls-oracle": GridSpec(1e-5, 1.0, 11, "log"),
    "pump-probe": GridSpec(-5e-3, 2e-2, 2001),
    "symmetric-pump": GridSpec(0.0, 1.5e-2, 301),
    "bistability": GridSpec(1e-9, 2.5e-6, 501),
    "correlation": GridSpec(-5e6, 5e6, 401),
    "channels": GridSpec(-3e-4, 3e-4, 121),
}


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    params: SystemParams
    grid: GridSpec
    run: RunSettings = field(default_factory=RunSettings)
    output_path: str | None = None


def _split_line(raw: str, lineno: int) -> tuple[str, str] | None:
    text = raw.split("#", 1)[0].strip()
    if not text:
        return None
    if "=" not in text:
        raise ParseError("expected 'key = value'", lineno)
    key, value = (part.strip() for part in text.split("=", 1))
    if not key or not value:
        raise ParseError("empty key or value", lineno)
    return key, value


def _convert(key: str, value: str, lineno: int | None) -> tuple[str, str, Any]:
    if key in ("experiment", "output"):
        if key == "experiment" and value not in EXPERIMENTS:
            raise OutOfRange(f"unknown experiment {value!r}")
        return "", key, value
    section, _, name = key.partition(".")
    schema = {
        "params": {**_PARAM_KEYS, "q0_rounded": _bool},
        "run": _RUN_KEYS,
        "grid": _GRID_KEYS,
    }.get(section)
    if schema is None or name not in schema:
        raise UnknownKey(f"unknown key {key!r}")
    try:
        return section, name, schema[name](value)
    except ValueError as exc:
        raise ParseError(f"{key}: {exc}", lineno) from None


def parse_entries(text: str) -> list[tuple[str, str, Any]]:
    """Typed ``(section, name, value)`` triples in file order."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        pair = _split_line(raw, lineno)
        if pair is not None:
            out.append(_convert(*pair, lineno))
    return out


def parse_override(item: str) -> tuple[str, str, Any]:
    """One ``key=value`` command-line override."""
    if "=" not in item:
        raise ParseError(f"override {item!r} is not key=value")
    key, value = (part.strip() for part in item.split("=", 1))
    return _convert(key, value, None)


def build_config(entries: Iterable[tuple[str, str, Any]], experiment: str | None = None) -> RunConfig:
    """Fold entries (later wins) over the defaults and validate the result."""
    params: dict[str, Any] = {"l_fiber": DEFAULT_FIBER_LENGTH}
    run: dict[str, Any] = {}
    grid: dict[str, Any] = {}
    top: dict[str, Any] = {}
    q0_rounded = False
    for section, name, value in entries:
        if section == "params" and name == "q0_rounded":
            q0_rounded = value
        elif section == "params":
            params[name] = value
        elif section == "run":
            run[name] = value
        elif section == "grid":
            grid[name] = value
        else:
            top[name] = value

    if experiment is not None:
        top["experiment"] = experiment
    name = top.get("experiment")
    if name is None:
        raise OutOfRange("no experiment given")
    if name not in EXPERIMENTS:
        raise OutOfRange(f"unknown experiment {name!r}")

    explicit_q0 = params.get("q0") is not None or q0_rounded
    if q0_rounded:
        if params.get("q0") is not None:
            raise OutOfRange("params.q0 and params.q0_rounded are mutually exclusive")
        params["q0"] = ROUNDED_Q0
    if explicit_q0 and "detuning" not in run:
        # a user-fixed cutoff is kept as is unless a detuning is also requested
        run["detuning"] = None
    elif explicit_q0 and run["detuning"] is not None:
        raise OutOfRange("run.detuning conflicts with an explicit q0")

    p = SystemParams(**params)
    settings = RunSettings(**run)
    _check_settings(settings, p)
    base = DEFAULT_GRIDS[name]
    spec = GridSpec(**{**dataclasses.asdict(base), **grid})
    return RunConfig(name, p, spec, settings, top.get("output"))


def _check_settings(s: RunSettings, p: SystemParams) -> None:
    for key in ("m_eff", "ka1", "ka2"):
        value = getattr(s, key)
        if not (math.isfinite(value) and value > 0):
            raise OutOfRange(f"run.{key} must be finite and > 0")
    if not math.isfinite(s.delta_bar):
        raise OutOfRange("run.delta_bar must be finite")
    for key in ("n_pump", "power", "probe_power"):
        value = getattr(s, key)
        if not (math.isfinite(value) and value >= 0):
            raise OutOfRange(f"run.{key} must be finite and >= 0")
    for key in ("k", "k2"):
        if not abs(getattr(s, key)) < p.zone_edge:
            raise OutOfRange(f"run.{key} must lie inside the Brillouin zone")
    if s.n_grid < 256:
        raise OutOfRange("run.n_grid must be >= 256")


def parse_config(text: str, overrides: Iterable[str] = (), experiment: str | None = None) -> RunConfig:
    """Parse a config file body, apply ``key=value`` overrides, and validate.

    An empty body gives the default config; ``experiment`` defaults to ``"dispersion"`` only
    when neither the body, the overrides nor the argument name one.
    """
    entries = parse_entries(text)
    entries += [parse_override(item) for item in overrides]
    named = experiment or next((v for s, n, v in reversed(entries) if s == "" and n == "experiment"), None)
    return build_config(entries, named or "dispersion")
