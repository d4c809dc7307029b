"""Ground-truth corpus of grid-representable distributions.

Every entry is band-limited on the default grid so that spectral operators do
not alias.  Jumps and point masses are therefore mollified at a scale ``eps``
a few grid spacings wide, and non-decaying signals are damped far outside the
probed region; the parameters are recorded on each entry.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .exceptions import ConfigurationError
from .grid import Grid, GridSignal, Spectrum, inverse_transform

DEFAULT_GRID = Grid(-128.0, 128.0, 2**15)

MOLLIFIER_EPS = 1.0 / 32
DAMP_RADIUS = 64.0
DAMP_WIDTH = 8.0
ENVELOPE_FLAT = 100.0
ENVELOPE_WIDTH = 50.0


def _damp(x, radius=DAMP_RADIUS, width=DAMP_WIDTH):
    """Smooth step equal to 1 (in double precision) for ``x <= radius - 7 width``."""
    return 0.5 * (1.0 + erf((radius - x) / width))


def gaussian(grid: Grid = DEFAULT_GRID) -> GridSignal:
    return GridSignal(grid, np.exp(-grid.x**2), "gaussian")


def heaviside(grid: Grid = DEFAULT_GRID, eps: float = MOLLIFIER_EPS) -> GridSignal:
    x = grid.x
    vals = 0.5 * (1.0 + erf(x / eps)) * _damp(x)
    return GridSignal(grid, vals, "heaviside")


def impulse(grid: Grid = DEFAULT_GRID, eps: float = MOLLIFIER_EPS) -> GridSignal:
    x = grid.x
    return GridSignal(grid, np.exp(-((x / eps) ** 2)) / (eps * np.sqrt(np.pi)), "impulse")


def one_sided_envelope(xi, flat: float = ENVELOPE_FLAT, width: float = ENVELOPE_WIDTH):
    """1 on ``|xi| <= flat``, Gaussian tail ``exp(-((|xi| - flat)/width)^2)`` beyond."""
    over = np.maximum(np.abs(xi) - flat, 0.0)
    return np.exp(-((over / width) ** 2))


def one_sided_target(xi):
    """``exp(-xi^2)`` for ``xi >= 0`` and ``1`` for ``xi < 0``."""
    xi = np.asarray(xi, dtype=float)
    return np.where(xi >= 0, np.exp(-np.where(xi >= 0, xi, 0.0) ** 2), 1.0)


def one_sided_spectrum(grid: Grid = DEFAULT_GRID) -> GridSignal:
    xi = grid.freqs
    spec = Spectrum(xi, one_sided_target(xi) * one_sided_envelope(xi), grid=grid)
    return inverse_transform(spec, grid, "one_sided_spectrum")


def chirp(grid: Grid = DEFAULT_GRID) -> GridSignal:
    x = grid.x
    radius = 48.0
    vals = np.exp(1j * x**2) * _damp(np.abs(x), radius, DAMP_WIDTH)
    return GridSignal(grid, vals, "chirp")


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    builder: object
    centers: tuple
    ground_truth: dict  # (x0, direction) -> decision
    provenance: str
    parameters: dict = field(default_factory=dict)

    def build(self, grid: Grid = DEFAULT_GRID) -> GridSignal:
        return self.builder(grid)

    def probes(self):
        return [(x0, d) for x0 in self.centers for d in (1, -1)]


def _truth(centers, singular_at):
    return {(x0, d): ("singular" if (x0, d) in singular_at else "regular")
            for x0 in centers for d in (1, -1)}


_G_CENTERS = (-2.0, -1.0, 0.0, 1.0, 2.0)
_H_CENTERS = (-2.0, 0.0, 2.0)

CORPUS = {
    "gaussian": CorpusEntry(
        "gaussian", gaussian, _G_CENTERS, _truth(_G_CENTERS, set()),
        "[DERIVED] windowed spectrum is a Gaussian in xi; calculus bound on <xi>^n exp(-c xi^2)",
    ),
    "heaviside": CorpusEntry(
        "heaviside", heaviside, _H_CENTERS, _truth(_H_CENTERS, {(0.0, 1), (0.0, -1)}),
        "[DERIVED] erf closed form of F(H E_N) decays like 1/|xi|; constant-fill is exact away from 0",
        {"mollifier_eps": MOLLIFIER_EPS, "damp_radius": DAMP_RADIUS, "damp_width": DAMP_WIDTH},
    ),
    "impulse": CorpusEntry(
        "impulse", impulse, _H_CENTERS, _truth(_H_CENTERS, {(0.0, 1), (0.0, -1)}),
        "[DERIVED] windowed spectrum of a unit mass is flat; zero-fill vanishes away from 0",
        {"mollifier_eps": MOLLIFIER_EPS},
    ),
    "one_sided_spectrum": CorpusEntry(
        "one_sided_spectrum", one_sided_spectrum, (0.0,), _truth((0.0,), {(0.0, -1)}),
        "[PAPER] spectrum exp(-xi^2) on xi >= 0 and 1 on xi < 0: singular only towards xi < 0",
        {"envelope_flat": ENVELOPE_FLAT, "envelope_width": ENVELOPE_WIDTH},
    ),
    "chirp": CorpusEntry(
        "chirp", chirp, (0.0,), _truth((0.0,), {(0.0, 1), (0.0, -1)}),
        "[DERIVED] |F(exp(ix^2) E_N)| = c exp(-xi^2/(16N)) (approx.), so the least C grows like N^(1/4)",
        {"damp_radius": 48.0, "damp_width": DAMP_WIDTH},
    ),
}


def corpus_names():
    return sorted(CORPUS)


def corpus_entry(name: str) -> CorpusEntry:
    try:
        return CORPUS[name]
    except KeyError:
        raise ConfigurationError(f"unknown corpus entry {name!r}; known: {', '.join(corpus_names())}",
                                 "signal.corpus") from None


def corpus_build(name: str, grid: Grid = DEFAULT_GRID) -> GridSignal:
    return corpus_entry(name).build(grid)
