"""Input validation helpers shared by the estimator and the functional API."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import ConfigurationError
from .grid import Grid, GridSignal


def as_grid_signal(X, label: str = "") -> GridSignal:
    """Accept a :class:`GridSignal` or an ``(n, 2)`` / ``(n, 3)`` array of ``x, re[, im]`` rows.

    The ``x`` column must be uniformly spaced and ``n`` a power of two.
    """
    if isinstance(X, GridSignal):
        return X
    arr = check_array(X, dtype=np.float64, ensure_2d=True)
    if arr.shape[1] not in (2, 3):
        raise ConfigurationError(f"expected 2 or 3 columns (x, re[, im]), got {arr.shape[1]}", "X")
    x = arr[:, 0]
    n = x.size
    if n < 2:
        raise ConfigurationError("need at least two samples", "X")
    h = x[1] - x[0]
    if not h > 0 or not np.allclose(np.diff(x), h, rtol=1e-9, atol=1e-12):
        raise ConfigurationError("x column must be increasing and uniformly spaced", "X")
    values = arr[:, 1] + (1j * arr[:, 2] if arr.shape[1] == 3 else 0.0)
    return GridSignal(Grid(float(x[0]), float(x[0] + n * h), n), values, label)


def check_probes(P) -> np.ndarray:
    """``(k, 2)`` float array of ``(x0, direction)`` rows with direction in ``{+1, -1}``."""
    arr = check_array(P, dtype=np.float64, ensure_2d=True)
    if arr.shape[1] != 2:
        raise ConfigurationError(f"probes need 2 columns (x0, direction), got {arr.shape[1]}", "probes")
    if not np.all(np.isin(arr[:, 1], (-1.0, 1.0))):
        raise ConfigurationError("directions must be +1 or -1", "probes.direction")
    return arr


def check_gevrey_index(s) -> float:
    s = float(s)
    if not 0.5 <= s < 1:
        raise ConfigurationError("s must lie in [1/2, 1)", "s")
    return s
