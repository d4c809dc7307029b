"""Central finite differences on a grid, used for local Gevrey derivative checks."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, lgamma

import numpy as np

from .exceptions import ConfigurationError, GeometryError
from .grid import GridSignal

MAX_FD_ORDER = 6


def central_difference(f: GridSignal, order: int, step_points: int, mask=None) -> np.ndarray:
    """``order``-th central difference quotient with spacing ``step_points * h``.

    ``f^(a)(x) ~ sum_k (-1)^k C(a,k) f(x + (a/2 - k) sigma) / sigma^a``; second order
    accurate.  ``step_points`` must be even so that half-offsets land on the grid.
    Returns values at the samples selected by ``mask`` (all interior ones by default).
    """
    if order < 0 or order > MAX_FD_ORDER:
        raise ConfigurationError(f"finite-difference order must lie in [0, {MAX_FD_ORDER}]", "fd.order")
    if step_points % 2:
        raise ConfigurationError("step_points must be even", "fd.step_points")
    vals = f.values
    n = vals.size
    half = step_points // 2
    reach = order * half
    idx = np.arange(n) if mask is None else np.flatnonzero(mask)
    if idx.size == 0:
        raise GeometryError("empty evaluation set")
    if idx.min() - reach < 0 or idx.max() + reach >= n:
        raise GeometryError("finite-difference stencil leaves the grid box")
    sigma = step_points * f.grid.spacing
    out = np.zeros(idx.size, dtype=complex)
    for k in range(order + 1):
        offset = (order - 2 * k) * half
        out += (-1) ** k * comb(order, k) * vals[idx + offset]
    return out / sigma**order


@dataclass
class LocalGevreyTest:
    center: float
    radius: float
    s: float
    sups: list  # sup_U |f^(a)| at the fine step, a = 0..alpha_max
    ratios: list  # fine/coarse sup ratios, a = 1..alpha_max
    C1: float
    passed: bool


def local_gevrey_test(f: GridSignal, x0: float, s: float = 0.5, radius: float = 0.5, alpha_max: int = 6,
                      step_points: int = 8, ratio_tol: float = 4.0) -> LocalGevreyTest:
    """Finite-difference test of ``sup_U |f^(a)| <= C1^(a+1) a!^s`` on ``U = (x0-radius, x0+radius)``.

    Derivatives are estimated at spacings ``sigma`` and ``2 sigma``.  For a
    function that is smooth at scale ``sigma`` both estimates agree; a jump or a
    point mass makes the finer one larger by about ``2^a``.  The test fails when
    any order grows by more than ``ratio_tol`` under refinement.
    """
    alpha_max = min(alpha_max, MAX_FD_ORDER)
    mask = np.abs(f.x - x0) < radius
    fine, coarse = [], []
    for a in range(alpha_max + 1):
        fine.append(float(np.max(np.abs(central_difference(f, a, step_points, mask)))))
        coarse.append(float(np.max(np.abs(central_difference(f, a, 2 * step_points, mask)))))
    ratios = []
    for a in range(1, alpha_max + 1):
        if coarse[a] == 0:
            ratios.append(1.0 if fine[a] <= 1e-12 * max(1.0, fine[0]) else np.inf)
        else:
            ratios.append(fine[a] / coarse[a])
    C1 = gevrey_constant(fine, s)
    passed = bool(np.isfinite(C1) and all(r <= ratio_tol for r in ratios))
    return LocalGevreyTest(float(x0), radius, s, fine, ratios, C1, passed)


def gevrey_constant(sups, s: float) -> float:
    """Least ``C1`` with ``sups[a] <= C1^(a+1) a!^s`` for all listed ``a``."""
    best = 0.0
    for a, m in enumerate(sups):
        if m > 0:
            best = max(best, float(np.exp((np.log(m) - s * lgamma(a + 1)) / (a + 1))))
    return best
