"""Gaussian windows ``E_{x0,N}``, the kernels ``delta_N`` and Hermite derivative bounds."""
from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log, pi, sqrt

import numpy as np

from .exceptions import ConfigurationError, ResolutionError
from .grid import Grid, GridSignal

MAX_DERIVATIVE_ORDER = 64


@dataclass(frozen=True)
class WindowSpec:
    center_x0: float = 0.0
    index_N: int = 1
    dilation_v: int = 1

    def __post_init__(self):
        if int(self.index_N) != self.index_N or self.index_N < 1:
            raise ConfigurationError("index_N must be a positive integer", "window.index_N")
        if int(self.dilation_v) != self.dilation_v or self.dilation_v < 1:
            raise ConfigurationError("dilation_v must be a positive integer", "window.dilation_v")

    @property
    def effective_N(self) -> int:
        return int(self.dilation_v) * int(self.index_N)


def gaussian_window(x, x0: float, n_eff: float):
    """``exp(-|x - x0|^2 / (4 n_eff))``; ``n_eff`` may be any positive real."""
    return np.exp(-((np.asarray(x) - x0) ** 2) / (4.0 * n_eff))


def window_values(w: WindowSpec, g: Grid) -> GridSignal:
    return GridSignal(g, gaussian_window(g.x, w.center_x0, w.effective_N), f"E[{w.center_x0},{w.effective_N}]")


def window_spectrum(xi, x0: float, n_eff: float):
    """Closed form of ``F(E_{x0,n})(xi) = sqrt(4 pi n) exp(-n xi^2) exp(-i x0 xi)``."""
    xi = np.asarray(xi, dtype=float)
    return np.sqrt(4 * pi * n_eff) * np.exp(-n_eff * xi**2) * np.exp(-1j * x0 * xi)


def delta_kernel(N, g: Grid, x0: float = 0.0) -> GridSignal:
    """Samples of ``(N/pi)^(1/2) exp(-N (t - x0)^2)``; unit mass."""
    if N <= 0:
        raise ConfigurationError("N must be positive", "delta.N")
    if g.spacing > 0.2 / sqrt(N):
        raise ResolutionError(f"spacing {g.spacing:.3g} does not resolve delta_{N} (needs <= {0.2 / sqrt(N):.3g})")
    t = g.x - x0
    return GridSignal(g, sqrt(N / pi) * np.exp(-N * t**2), f"delta_{N}")


# -- Hermite machinery ---------------------------------------------------------

def hermite_functions(n_max: int, t) -> np.ndarray:
    """Orthonormal Hermite functions ``psi_0..psi_{n_max}`` at ``t``.

    ``psi_n = H_n(t) exp(-t^2/2) / sqrt(2^n n! sqrt(pi))``; the recursion
    ``psi_{n+1} = sqrt(2/(n+1)) t psi_n - sqrt(n/(n+1)) psi_{n-1}`` keeps every
    term O(1), which is what makes order 64 safe.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty((n_max + 1,) + t.shape)
    out[0] = pi**-0.25 * np.exp(-(t**2) / 2)
    if n_max >= 1:
        out[1] = sqrt(2.0) * t * out[0]
    for n in range(1, n_max):
        out[n + 1] = sqrt(2.0 / (n + 1)) * t * out[n] - sqrt(n / (n + 1)) * out[n - 1]
    return out


def _log_hermite_scale(n: int) -> float:
    # log sqrt(2^n n! sqrt(pi))
    return 0.5 * (n * log(2.0) + lgamma(n + 1) + 0.5 * log(pi))


def weighted_hermite(n: int, t, weight_exponent: float = 1.0):
    """``H_n(t) exp(-weight_exponent * t^2)`` for ``weight_exponent`` in {1/2, 1} or any >= 1/2."""
    psi = hermite_functions(n, t)[n]
    extra = np.exp(-(weight_exponent - 0.5) * np.asarray(t, dtype=float) ** 2 + _log_hermite_scale(n))
    return psi * extra


def gaussian_derivative(x, x0: float, n_eff: float, order_alpha: int):
    """Exact ``order_alpha``-th derivative of ``exp(-(x - x0)^2 / (4 n_eff))`` at ``x``.

    With ``t = (x - x0) / (2 sqrt(n_eff))`` one has
    ``E^(a)(x) = (-1)^a (2 sqrt(n_eff))^(-a) H_a(t) exp(-t^2)``.
    """
    if order_alpha < 0 or int(order_alpha) != order_alpha:
        raise ConfigurationError("order_alpha must be a non-negative integer", "window.order_alpha")
    if order_alpha > MAX_DERIVATIVE_ORDER:
        raise ConfigurationError(
            f"order {order_alpha} exceeds the overflow guard {MAX_DERIVATIVE_ORDER}", "window.order_alpha"
        )
    if not n_eff > 0:
        raise ConfigurationError("n_eff must be positive", "window.n_eff")
    scale = 2.0 * sqrt(n_eff)
    t = (np.asarray(x, dtype=float) - x0) / scale
    return (-1) ** order_alpha * weighted_hermite(int(order_alpha), t, 1.0) * scale ** (-float(order_alpha))


def window_derivative(w: WindowSpec, order_alpha: int, g: Grid | None = None, x=None):
    """Exact ``order_alpha``-th derivative of ``E_{x0, vN}``.

    Returns a :class:`GridSignal` when ``g`` is given, else an array at ``x``.
    """
    pts = g.x if g is not None else np.asarray(x, dtype=float)
    vals = gaussian_derivative(pts, w.center_x0, w.effective_N, order_alpha)
    if g is None:
        return vals
    return GridSignal(g, vals, f"E[{w.center_x0},{w.effective_N}]^({order_alpha})")


def _sup_weighted_hermite(alpha: int, weighted: bool, t) -> float:
    return float(np.max(np.abs(weighted_hermite(alpha, t, 0.5 if weighted else 1.0))))


@dataclass
class DerivativeBoundCalibration:
    c0: float
    ratios: dict  # (alpha, N) -> least c0 for that pair
    weighted: bool

    def holds(self, c0: float, alpha: int, N: int) -> bool:
        return self.ratios[(alpha, N)] <= c0 * (1 + 1e-12)


def derivative_sup(alpha: int, N: int, weighted: bool = True, t=None) -> float:
    """``sup_x exp(w |x|^2/(8N)) |E_N^(alpha)(x)|`` with ``w = 1`` (weighted) or 0."""
    if t is None:
        t = _sup_grid(alpha)
    return (2.0 * sqrt(N)) ** (-alpha) * _sup_weighted_hermite(alpha, weighted, t)


def _sup_grid(alpha: int):
    reach = sqrt(2.0 * alpha + 1.0) + 8.0
    return np.linspace(-reach, reach, 40001 + 400 * alpha)


def calibrate_derivative_bound(N_max: int, alpha_max: int, weighted: bool = True) -> DerivativeBoundCalibration:
    """Least ``c0`` with ``sup |E_N^(a)| <= (c0/sqrt N)^a a^(a/2)`` for all ``a <= N <= N_max``.

    With ``weighted`` the left side carries the factor ``exp(|x|^2/(8N))``.
    The pair ``a = 0`` imposes no constraint on ``c0`` and is recorded as 0.
    """
    if alpha_max > N_max:
        raise ConfigurationError("alpha_max must not exceed N_max", "calibration.alpha_max")
    ratios = {}
    sups = {a: _sup_weighted_hermite(a, weighted, _sup_grid(a)) for a in range(alpha_max + 1)}
    for N in range(1, N_max + 1):
        for a in range(0, min(alpha_max, N) + 1):
            if a == 0:
                ratios[(a, N)] = 0.0
                continue
            sup = (2.0 * sqrt(N)) ** (-a) * sups[a]
            # sup <= (c/sqrt N)^a a^(a/2)  <=>  c >= sqrt(N) (sup / a^(a/2))^(1/a)
            ratios[(a, N)] = sqrt(N) * (sup / a ** (a / 2)) ** (1.0 / a)
    return DerivativeBoundCalibration(max(ratios.values()), ratios, weighted)
