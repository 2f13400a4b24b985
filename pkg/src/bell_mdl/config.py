"""Run configuration: defaults, ``key = value`` config files, and overrides.

Precedence, lowest first: built-in defaults, the config file (``--config``
or the ``BELL_MDL_CONFIG`` environment variable), command-line flags.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .distance import DEFAULT_GRID_N, DEFAULT_PHI_MIN, DEFAULT_REFINE_TOL
from .errors import DomainError
from .numerics import QuadratureSpec

ENV_VAR = "BELL_MDL_CONFIG"
DEFAULT_GAMMAS = (-0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4)


def parse_gammas(text: str) -> tuple[float, ...]:
    """Parse ``lo:hi:step`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        try:
            lo, hi, step = (float(p) for p in text.split(":"))
        except ValueError:
            raise DomainError(f"bad gamma range {text!r}; expected lo:hi:step") from None
        if step <= 0 or hi < lo:
            raise DomainError(f"bad gamma range {text!r}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        # rounding keeps 0.1-steps exact enough to print as -0.4, ..., 0.4
        return tuple(round(lo + i * step, 12) for i in range(count))
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise DomainError(f"bad gamma list {text!r}") from None


@dataclass(frozen=True)
class RunConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    n: int = 1_000_000
    seed: int = 7
    gammas: tuple[float, ...] = DEFAULT_GAMMAS
    phi_steps: int = 179
    grid_n: int = DEFAULT_GRID_N
    refine_tol: float = DEFAULT_REFINE_TOL
    phi_min: float = DEFAULT_PHI_MIN
    out: str = "bell_mdl_out"
    format: str = "csv"

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.refine_tol > 0):
            raise DomainError("tolerances must be positive")
        for g in self.gammas:
            if not g > -0.5:
                raise DomainError(f"gamma must be > -1/2, got {g}")
        if self.phi_steps < 1:
            raise DomainError("phi_steps must be >= 1")
        if not 0.0 < self.phi_min < math.pi / 2:
            raise DomainError("phi_min must be in (0, pi/2)")
        if self.format not in ("csv", "json"):
            raise DomainError(f"format must be csv or json, got {self.format!r}")

    @property
    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(rel_tol=self.rel_tol, abs_tol=self.abs_tol)

    def updated(self, **overrides) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


_CASTS = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    kind = _CASTS[key]
    if key == "gammas":
        return parse_gammas(raw)
    if kind == "int":
        return int(float(raw))
    if kind == "float":
        return float(raw)
    return raw


def read_config_file(path) -> dict:
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _CASTS:
            raise DomainError(f"{path}:{lineno}: unrecognized config line {line!r}")
        try:
            values[key] = _convert(key, raw.strip())
        except ValueError:
            raise DomainError(f"{path}:{lineno}: bad value for {key}") from None
    return values


def load_config(path=None, **overrides) -> RunConfig:
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    base = RunConfig()
    if path is not None:
        base = base.updated(**read_config_file(path))
    return base.updated(**overrides)
