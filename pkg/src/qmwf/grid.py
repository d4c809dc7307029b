"""Uniform grids, sampled signals and the continuous-Fourier FFT contract.

All transforms use the kernel ``exp(-i x xi)`` with no prefactor::

    F f(xi) = integral f(x) exp(-i x xi) dx  ~  h * sum_k f(x_k) exp(-i x_k xi)

so that ``F(f')(xi) = i xi F f(xi)`` and the inverse carries ``1/(2 pi)``.
Frequencies are returned in increasing order on ``[-pi/h, pi/h)``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import ConfigurationError, ResolutionError

FORWARD_CONVENTION = "exp(-i x xi), trapezoidal scaling by spacing, no prefactor"


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Periodic sampling of ``[x_min, x_max)`` with ``num_points`` samples."""

    x_min: float
    x_max: float
    num_points: int

    def __post_init__(self):
        if not isinstance(self.num_points, (int, np.integer)) or not _is_power_of_two(int(self.num_points)):
            raise ConfigurationError(
                f"num_points must be a power of two >= 2, got {self.num_points!r}", "grid.num_points"
            )
        if not np.isfinite(self.x_min) or not np.isfinite(self.x_max) or self.x_max <= self.x_min:
            raise ConfigurationError("x_max must exceed x_min", "grid.x_max")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / self.num_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.num_points)

    @property
    def nyquist(self) -> float:
        return np.pi / self.spacing

    @property
    def freq_spacing(self) -> float:
        return 2.0 * np.pi / (self.x_max - self.x_min)

    @property
    def freqs(self) -> np.ndarray:
        n = self.num_points
        return self.freq_spacing * np.arange(-n // 2, n // 2)

    def contains(self, a: float, b: float) -> bool:
        return self.x_min <= a and b <= self.x_max - self.spacing


@dataclass(frozen=True, eq=False)
class GridSignal:
    """Complex samples on a :class:`Grid`; immutable after construction."""

    grid: Grid
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.num_points,):
            raise ConfigurationError(
                f"expected {self.grid.num_points} samples, got shape {values.shape}", "signal.values"
            )
        if not np.all(np.isfinite(values)):
            raise ConfigurationError("signal contains NaN or Inf", "signal.values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid: Grid, func, label: str = "") -> "GridSignal":
        return cls(grid, func(grid.x), label)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def with_values(self, values, label=None) -> "GridSignal":
        return GridSignal(self.grid, values, self.label if label is None else label)

    def __mul__(self, other):
        if isinstance(other, GridSignal):
            _check_same_grid(self.grid, other.grid)
            return self.with_values(self.values * other.values)
        return self.with_values(self.values * other)

    __rmul__ = __mul__

    def __add__(self, other):
        _check_same_grid(self.grid, other.grid)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self.grid, other.grid)
        return self.with_values(self.values - other.values)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values)) * self.grid.spacing)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.spacing))

    def integral(self) -> complex:
        return complex(np.sum(self.values) * self.grid.spacing)


@dataclass(frozen=True, eq=False)
class Spectrum:
    freqs: np.ndarray
    values: np.ndarray
    convention: str = FORWARD_CONVENTION
    grid: Grid | None = field(default=None, compare=False)

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float)
        values = np.array(self.values, dtype=complex)
        if freqs.shape != values.shape or freqs.ndim != 1:
            raise ConfigurationError("freqs and values must be 1-d arrays of equal length", "spectrum")
        if freqs.size > 1 and np.any(np.diff(freqs) <= 0):
            raise ConfigurationError("freqs must be strictly increasing", "spectrum.freqs")
        values.setflags(write=False)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "values", values)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def l2_norm(self) -> float:
        dxi = self.freqs[1] - self.freqs[0]
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * dxi))

    def with_values(self, values) -> "Spectrum":
        return Spectrum(self.freqs, values, self.convention, self.grid)


def _check_same_grid(a: Grid, b: Grid):
    if a != b:
        raise ConfigurationError("signals live on different grids")


def bracket_norm(xi):
    """Japanese bracket ``(1 + |xi|^2)^(1/2)``; accepts scalars or arrays."""
    xi = np.asarray(xi)
    out = np.sqrt(1.0 + np.abs(xi) ** 2)
    return float(out) if out.ndim == 0 else out


def forward_transform(f: GridSignal) -> Spectrum:
    g = f.grid
    xi = g.freqs
    raw = np.fft.fftshift(np.fft.fft(f.values))
    values = g.spacing * raw * np.exp(-1j * g.x_min * xi)
    return Spectrum(xi, values, FORWARD_CONVENTION, g)


def inverse_transform(spec: Spectrum, grid: Grid | None = None, label: str = "") -> GridSignal:
    g = grid if grid is not None else spec.grid
    if g is None:
        raise ConfigurationError("spectrum carries no grid; pass one explicitly", "spectrum.grid")
    if spec.freqs.shape != (g.num_points,) or not np.allclose(spec.freqs, g.freqs, rtol=0, atol=1e-9 * g.nyquist):
        raise ConfigurationError("spectrum lattice does not match the grid's frequency lattice", "spectrum.freqs")
    raw = spec.values * np.exp(1j * g.x_min * g.freqs) / g.spacing
    values = np.fft.ifft(np.fft.ifftshift(raw))
    return GridSignal(g, values, label)


def spectral_tail(f: GridSignal, fraction: float = 0.9) -> float:
    """Largest ``|F f|`` beyond ``fraction * nyquist`` relative to ``max |F f|``."""
    spec = forward_transform(f)
    mags = np.abs(spec.values)
    peak = mags.max()
    if peak == 0:
        return 0.0
    outer = np.abs(spec.freqs) >= fraction * f.grid.nyquist
    return float(mags[outer].max() / peak)


def require_band_limited(f: GridSignal, tol: float = 1e-10, fraction: float = 0.9):
    tail = spectral_tail(f, fraction)
    if tail > tol:
        raise ResolutionError(
            f"signal {f.label or '<unnamed>'!s} is not band-limited: spectral tail {tail:.2e} > {tol:.0e}"
        )


# -- CSV import / export -------------------------------------------------------

def save_signal_csv(f: GridSignal, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re", "im"])
        for x, v in zip(f.x, f.values):
            w.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])


def load_signal_csv(path, label: str | None = None) -> GridSignal:
    rows = _read_triples(path, "x")
    x = rows[:, 0]
    n = x.size
    if n < 2:
        raise ConfigurationError("signal file needs at least two rows", str(path))
    h = x[1] - x[0]
    if not np.allclose(np.diff(x), h, rtol=1e-9, atol=1e-12):
        raise ConfigurationError("x column must be uniformly spaced", str(path))
    grid = Grid(float(x[0]), float(x[0] + n * h), n)
    return GridSignal(grid, rows[:, 1] + 1j * rows[:, 2], label if label is not None else Path(path).stem)


def save_spectrum_csv(spec: Spectrum, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xi", "re", "im"])
        for xi, v in zip(spec.freqs, spec.values):
            w.writerow([repr(float(xi)), repr(float(v.real)), repr(float(v.imag))])


def load_spectrum_csv(path) -> Spectrum:
    rows = _read_triples(path, "xi")
    return Spectrum(rows[:, 0], rows[:, 1] + 1j * rows[:, 2])


def _read_triples(path, first):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != [first, "re", "im"]:
            raise ConfigurationError(f"expected header {first},re,im", str(path))
        try:
            rows = [[float(c) for c in row] for row in reader if row]
        except ValueError as exc:
            raise ConfigurationError(f"non-numeric entry ({exc})", str(path)) from None
    return np.array(rows, dtype=float).reshape(-1, 3)
