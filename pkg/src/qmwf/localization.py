"""Restriction to a ball and the three computable extension candidates."""
from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt

import numpy as np

from .exceptions import ConfigurationError, GeometryError
from .grid import GridSignal

EXTENSION_KINDS = ("global", "zero-fill", "constant-fill")
SHELL_WIDTH = 2  # grid spacings


@dataclass(frozen=True, eq=False)
class BallRestriction:
    center: float
    radius: float
    source: GridSignal

    @property
    def mask(self) -> np.ndarray:
        return np.abs(self.source.x - self.center) < self.radius

    @property
    def values(self) -> np.ndarray:
        """Samples inside the ball; the rest are unused."""
        return self.source.values[self.mask]


@dataclass(frozen=True, eq=False)
class ExtensionCandidate:
    kind: str
    signal: GridSignal
    leak_budget: float
    restriction: BallRestriction | None = None


def restrict(f: GridSignal, x0: float, r: float) -> BallRestriction:
    if not r > 0:
        raise GeometryError(f"ball radius must be positive, got {r}")
    if not f.grid.contains(x0 - r, x0 + r):
        raise GeometryError(f"ball L({x0}, {r}) leaves the grid box [{f.grid.x_min}, {f.grid.x_max})")
    return BallRestriction(float(x0), float(r), f)


def leak_budget(r: float, v: int, N_max: int) -> float:
    return float(np.exp(-(r**2) / (4.0 * v * N_max)))


def leakage_required_radius(v: int, N_max: int, eps: float) -> float:
    """Smallest ``r`` with ``exp(-r^2 / (4 v N_max)) <= eps``."""
    if not 0 < eps < 1:
        raise ConfigurationError("eps must lie in (0, 1)", "extension.leak_eps")
    return sqrt(4.0 * v * N_max * log(1.0 / eps))


def extend(res: BallRestriction, kind: str, v: int = 1, N_max: int = 16) -> ExtensionCandidate:
    src = res.source
    budget = leak_budget(res.radius, v, N_max)
    if kind == "global":
        return ExtensionCandidate(kind, src, budget, res)
    inside = res.mask
    if kind == "zero-fill":
        fill = 0.0
    elif kind == "constant-fill":
        dist = np.abs(src.x - res.center)
        shell = inside & (dist >= res.radius - SHELL_WIDTH * src.grid.spacing)
        fill = src.values[shell].mean() if shell.any() else 0.0
    else:
        raise ConfigurationError(f"unknown extension kind {kind!r}; expected one of {EXTENSION_KINDS}",
                                 "extension.kinds")
    values = np.where(inside, src.values, fill)
    label = f"{src.label}|{kind}@{res.center:g}"
    return ExtensionCandidate(kind, src.with_values(values, label), budget, res)


def extension_candidates(f: GridSignal, x0: float, r: float, kinds=EXTENSION_KINDS, v: int = 1, N_max: int = 16):
    res = restrict(f, x0, r)
    return [extend(res, k, v, N_max) for k in kinds]
