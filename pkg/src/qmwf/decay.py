"""Windowed spectra, cone majorants, constant fitting and the s-regularity verdict.

A probe ``(x0, cone)`` is tested against the bound

    |F(f_ext E_{x0,vN})(xi)| <= C^(n+1) n^(sn) / <xi>^n,   xi in cone, n <= N,

for every ``N`` of a sweep.  On a finite grid every spectrum satisfies this for
*some* C, so the verdict looks at how the least admissible C behaves:

* across the N sweep (``growth``) -- a regular point keeps C flat;
* across the frequency band (``band_ratio``) -- shrinking the cone's upper
  frequency by ``band_ratio`` leaves the majorants of a regular point unchanged,
  while polynomially decaying spectra lose a factor ~ band_ratio per order.

Both statistics are monotone in ``s`` (``band_ratio`` does not depend on it),
so the verdicts respect ``WF_{s2} subset WF_{s1}`` for ``s1 < s2`` by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import inf

import numpy as np

from .exceptions import BudgetError, ConfigurationError, FitError, GeometryError
from .grid import GridSignal, Spectrum, bracket_norm, forward_transform
from .localization import ExtensionCandidate, leakage_required_radius
from .windows import WindowSpec, gaussian_window

REGULAR = "regular"
SINGULAR = "singular"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Cone:
    """Frequency cone.  In d=1 ``direction`` is a sign; in d=2 it is an angle."""

    direction: float = 1.0
    half_angle: float = 0.0
    xi_min: float = 1.0
    xi_max: float = inf
    dim: int = 1

    def __post_init__(self):
        if self.xi_min < 1:
            raise ConfigurationError("xi_min must be >= 1", "cone.xi_min")
        if not self.xi_max > self.xi_min:
            raise ConfigurationError("xi_max must exceed xi_min", "cone.xi_max")
        if self.dim == 1 and self.direction not in (1, -1, 1.0, -1.0):
            raise ConfigurationError("d=1 cones need direction +1 or -1", "cone.direction")
        if self.dim not in (1, 2):
            raise ConfigurationError("only d=1 and d=2 cones are supported", "cone.dim")

    def contains(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if self.dim == 1:
            mag = np.abs(xi)
            ok = np.sign(xi) == np.sign(self.direction)
        else:
            mag = np.hypot(xi[..., 0], xi[..., 1])
            ang = np.arctan2(xi[..., 1], xi[..., 0]) - self.direction
            ang = np.abs((ang + np.pi) % (2 * np.pi) - np.pi)
            ok = ang <= self.half_angle + 1e-12
        return ok & (mag >= self.xi_min) & (mag <= self.xi_max)

    def with_xi_max(self, xi_max: float) -> "Cone":
        return replace(self, xi_max=xi_max)


def covering_cones_2d(count: int = 16, xi_min: float = 1.0, xi_max: float = inf):
    """``count`` sectors of half-angle ``pi/(count/2)``, overlapping by half."""
    half = 2 * np.pi / count
    return [Cone(direction=k * 2 * np.pi / count, half_angle=half, xi_min=xi_min, xi_max=xi_max, dim=2)
            for k in range(count)]


@dataclass
class ClassifierParams:
    s: float = 0.5
    v: int = 1
    N0: int = 1
    N_sweep: tuple = (2, 4, 8, 16)
    C_cap: float = 1e6
    growth_tol: float = 1.5
    xi_min: float = 1.0
    band_fraction: float = 0.25  # cone xi_max as a fraction of the grid Nyquist frequency
    band_ratio: float = 4.0
    floor: float = 1e-10
    leak_eps: float = 1e-12

    def __post_init__(self):
        self.N_sweep = tuple(int(n) for n in self.N_sweep)
        self.validate()

    def validate(self):
        if not 0.5 <= self.s < 1:
            raise ConfigurationError("s must lie in [1/2, 1)", "classifier.s")
        if int(self.v) != self.v or self.v < 1:
            raise ConfigurationError("v must be a positive integer", "classifier.v")
        if int(self.N0) != self.N0 or self.N0 < 0:
            raise ConfigurationError("N0 must be a non-negative integer", "classifier.N0")
        if not self.N_sweep:
            raise ConfigurationError("N_sweep must not be empty", "classifier.N_sweep")
        if any(b <= a for a, b in zip(self.N_sweep, self.N_sweep[1:])):
            raise ConfigurationError("N_sweep must be strictly increasing", "classifier.N_sweep")
        if self.N0 >= max(self.N_sweep) or min(self.N_sweep) <= self.N0:
            raise ConfigurationError("every N in N_sweep must exceed N0", "classifier.N0")
        if not self.growth_tol > 1:
            raise ConfigurationError("growth_tol must exceed 1", "classifier.growth_tol")
        if not self.C_cap > 0:
            raise ConfigurationError("C_cap must be positive", "classifier.C_cap")
        if self.xi_min < 1:
            raise ConfigurationError("xi_min must be >= 1", "classifier.xi_min")
        if not 0 < self.band_fraction <= 1:
            raise ConfigurationError("band_fraction must lie in (0, 1]", "classifier.band_fraction")
        if not self.band_ratio > 1:
            raise ConfigurationError("band_ratio must exceed 1", "classifier.band_ratio")
        if not 0 < self.leak_eps < 1:
            raise ConfigurationError("leak_eps must lie in (0, 1)", "extension.leak_eps")

    @property
    def N_max(self) -> int:
        return max(self.N_sweep)

    @property
    def decisive_tol(self) -> float:
        return self.growth_tol**2

    def with_s(self, s) -> "ClassifierParams":
        return replace(self, s=s)


@dataclass
class CandidateTrace:
    kind: str
    sweep: list  # (N, fitted C_N)
    growth: float
    band_ratio: float
    status: str  # "regular", "fail", "marginal"

    @property
    def max_C(self) -> float:
        return max(c for _, c in self.sweep)


@dataclass
class DecayReport:
    x0: float
    cone: Cone
    s: float
    v: int
    N0: int
    sweep: list
    M_table: dict
    decision: str
    s_star: float | None = None
    best_candidate: str | None = None
    candidates: list = field(default_factory=list)
    growth: float = 1.0
    band_ratio: float = 1.0

    @property
    def max_C(self) -> float:
        return max((c for _, c in self.sweep), default=0.0)

    def to_record(self) -> dict:
        return {
            "x0": float(self.x0),
            "direction": float(self.cone.direction),
            "s": float(self.s),
            "v": int(self.v),
            "N0": int(self.N0),
            "decision": self.decision,
            "s_star": None if self.s_star is None else float(self.s_star),
            "best_candidate": self.best_candidate,
            "fitted_C": [[int(n), _finite(c)] for n, c in self.sweep],
            "growth": _finite(self.growth),
            "band_ratio": _finite(self.band_ratio),
            "candidates": [
                {"kind": t.kind, "status": t.status, "growth": _finite(t.growth),
                 "band_ratio": _finite(t.band_ratio), "fitted_C": [[int(n), _finite(c)] for n, c in t.sweep]}
                for t in self.candidates
            ],
        }


def _finite(x):
    x = float(x)
    return x if np.isfinite(x) else None


# -- spectra -------------------------------------------------------------------

def _as_signal(ext) -> GridSignal:
    return ext.signal if isinstance(ext, ExtensionCandidate) else ext


def check_window_budget(signal: GridSignal, x0: float, n_eff: int, leak_eps: float):
    """The window must have decayed below ``leak_eps`` at both box edges."""
    g = signal.grid
    need = leakage_required_radius(1, n_eff, leak_eps)
    room = min(x0 - g.x_min, g.x_max - g.spacing - x0)
    if room < need:
        raise BudgetError(
            f"window E[{x0},{n_eff}] needs {need:.2f} of room to the box edge for leak_eps={leak_eps:g}, "
            f"only {room:.2f} available"
        )


def windowed_spectrum(ext, w: WindowSpec, leak_eps: float = 1e-12) -> Spectrum:
    f = _as_signal(ext)
    check_window_budget(f, w.center_x0, w.effective_N, leak_eps)
    win = gaussian_window(f.x, w.center_x0, w.effective_N)
    return forward_transform(f.with_values(f.values * win))


def windowed_l1(ext, w: WindowSpec) -> float:
    f = _as_signal(ext)
    win = gaussian_window(f.x, w.center_x0, w.effective_N)
    return float(np.sum(np.abs(f.values) * win) * f.grid.spacing)


def resolve_cone(cone: Cone, spec: Spectrum, band_fraction: float = 1.0) -> Cone:
    """Cap an open-ended cone at ``band_fraction`` of the spectrum's Nyquist frequency."""
    nyq = float(np.max(np.abs(spec.freqs)))
    cap = band_fraction * nyq
    return cone.with_xi_max(min(cone.xi_max, cap)) if cone.xi_max > cap else cone


def majorant_sequence(S: Spectrum, cone: Cone, N: int, floor: float = 0.0) -> np.ndarray:
    """``M_n = max_{xi in cone} <xi>^n |S(xi)|`` for ``n = 0..N``, evaluated in log space.

    Samples with ``|S| <= floor`` count as zero.
    """
    if not np.isfinite(cone.xi_max):
        cone = resolve_cone(cone, S)
    inside = cone.contains(S.freqs)
    if inside.sum() < 8:
        raise GeometryError(f"cone {cone} holds only {int(inside.sum())} grid frequencies (need >= 8)")
    mags = np.abs(S.values[inside])
    keep = mags > floor
    if not keep.any():
        return np.zeros(N + 1)
    log_s = np.log(mags[keep])
    log_b = np.log(bracket_norm(S.freqs[inside][keep]))
    n = np.arange(N + 1)[:, None]
    return np.exp(np.max(n * log_b[None, :] + log_s[None, :], axis=1))


def _gevrey_log(n, s):
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(n > 0, s * n * np.log(np.where(n > 0, n, 1.0)), 0.0)


def fit_constant(M, s: float) -> float:
    """Least ``C >= 0`` with ``M_n <= C^(n+1) n^(sn)`` for every ``n`` (``0^0 = 1``)."""
    M = np.asarray(M, dtype=float)
    if np.any(M < 0):
        raise ConfigurationError("majorants must be non-negative", "fit_constant.M")
    n = np.arange(M.size)
    pos = M > 0
    if not pos.any():
        return 0.0
    expo = (np.log(M[pos]) - _gevrey_log(n[pos], s)) / (n[pos] + 1)
    return float(np.exp(expo.max()))


def _ratio(a: float, b: float) -> float:
    if a == 0 and b == 0:
        return 1.0
    if b == 0:
        return inf
    return a / b


def band_ratio_of(M_full, M_sub) -> float:
    """``max_n (M_full_n / M_sub_n)^(1/(n+1))`` -- independent of ``s``."""
    worst = 1.0
    for n, (a, b) in enumerate(zip(M_full, M_sub)):
        r = _ratio(a, b)
        if r == inf:
            return inf
        worst = max(worst, r ** (1.0 / (n + 1)))
    return worst


# -- per-probe analysis ----------------------------------------------------------

class ProbeAnalysis:
    """Caches windowed spectra and majorant tables for one probe centre.

    Spectra depend on the candidate and ``N`` only; majorants add the cone;
    the fitted constants add ``s``.  Classifying one probe at several ``s`` or in
    several directions therefore costs one FFT per (candidate, N).
    """

    def __init__(self, candidates, x0: float, params: ClassifierParams):
        if isinstance(candidates, (GridSignal, ExtensionCandidate)):
            candidates = [candidates]
        self.candidates = list(candidates)
        if not self.candidates:
            raise ConfigurationError("at least one extension candidate is required", "extension.kinds")
        self.x0 = float(x0)
        self.params = params
        self._spectra = {}
        self._majorants = {}
        self._floor = {}

    def kinds(self):
        return [getattr(c, "kind", "given") for c in self.candidates]

    def spectrum(self, i: int, N: int) -> Spectrum:
        key = (i, N)
        if key not in self._spectra:
            w = WindowSpec(self.x0, N, self.params.v)
            self._spectra[key] = windowed_spectrum(self.candidates[i], w, self.params.leak_eps)
        return self._spectra[key]

    def floor(self, N: int) -> float:
        if N not in self._floor:
            w = WindowSpec(self.x0, N, self.params.v)
            scale = max(windowed_l1(c, w) for c in self.candidates)
            self._floor[N] = self.params.floor * scale
        return self._floor[N]

    def cones_for(self, cone: Cone, spec: Spectrum):
        full = resolve_cone(cone, spec, self.params.band_fraction)
        sub = full.with_xi_max(max(full.xi_min * 1.0001, full.xi_max / self.params.band_ratio))
        return full, sub

    def majorants(self, i: int, N: int, cone: Cone):
        key = (i, N, cone)
        if key not in self._majorants:
            spec = self.spectrum(i, N)
            full, sub = self.cones_for(cone, spec)
            fl = self.floor(N)
            self._majorants[key] = (majorant_sequence(spec, full, N, fl), majorant_sequence(spec, sub, N, fl))
        return self._majorants[key]

    def trace(self, i: int, cone: Cone, s: float) -> CandidateTrace:
        p = self.params
        sweep = []
        for N in p.N_sweep:
            full, _ = self.majorants(i, N, cone)
            sweep.append((N, fit_constant(full, s)))
        growth = _ratio(sweep[-1][1], sweep[0][1])
        full, sub = self.majorants(i, p.N_max, cone)
        rho = band_ratio_of(full, sub)
        max_c = max(c for _, c in sweep)
        if max_c <= p.C_cap and growth <= p.growth_tol and rho <= p.growth_tol:
            status = "regular"
        elif max_c > p.C_cap or growth > p.decisive_tol or rho > p.decisive_tol:
            status = "fail"
        else:
            status = "marginal"
        return CandidateTrace(self.kinds()[i], sweep, growth, rho, status)

    def classify(self, cone: Cone, s: float | None = None) -> DecayReport:
        p = self.params
        s = p.s if s is None else s
        if not 0.5 <= s < 1:
            raise ConfigurationError("s must lie in [1/2, 1)", "classifier.s")
        traces = [self.trace(i, cone, s) for i in range(len(self.candidates))]
        regular = [t for t in traces if t.status == "regular"]
        if regular:
            decision, pick = REGULAR, min(regular, key=lambda t: t.max_C)
        elif all(t.status == "fail" for t in traces):
            decision, pick = SINGULAR, min(traces, key=lambda t: (t.band_ratio, t.growth))
        else:
            decision = INCONCLUSIVE
            pick = min((t for t in traces if t.status == "marginal"), key=lambda t: (t.band_ratio, t.growth))
        idx = traces.index(pick)
        table = {N: self.majorants(idx, N, cone)[0].tolist() for N in p.N_sweep}
        return DecayReport(self.x0, cone, s, p.v, p.N0, pick.sweep, table, decision,
                           best_candidate=pick.kind, candidates=traces,
                           growth=pick.growth, band_ratio=pick.band_ratio)

    def is_regular(self, cone: Cone, s: float) -> bool:
        return self.classify(cone, s).decision == REGULAR

    def s_star(self, cone: Cone, tol: float = 1 / 64):
        """Least ``s`` in ``[1/2, 1)`` classified regular, by bisection."""
        lo, hi = 0.5, 1.0 - tol
        if self.is_regular(cone, lo):
            return lo
        if not self.is_regular(cone, hi):
            return None
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if self.is_regular(cone, mid):
                hi = mid
            else:
                lo = mid
        return hi


def classify(candidates, x0: float, cone: Cone, params: ClassifierParams | None = None, **overrides) -> DecayReport:
    params = _params(params, overrides)
    return ProbeAnalysis(candidates, x0, params).classify(cone)


def estimate_s_star(candidates, x0: float, cone: Cone, params: ClassifierParams | None = None, **overrides):
    params = _params(params, overrides)
    return ProbeAnalysis(candidates, x0, params).s_star(cone)


def _params(params, overrides) -> ClassifierParams:
    if params is None:
        return ClassifierParams(**overrides)
    return replace(params, **overrides) if overrides else params


# -- polynomial growth ----------------------------------------------------------

@dataclass
class GrowthFit:
    exponent: float
    slope: float
    residual: float


def polynomial_growth_exponent(S: Spectrum, xi_min: float = 1.0, floor: float = 1e-12) -> GrowthFit:
    """Least ``l >= 0`` with ``<xi>^(-l) |S|`` bounded, from a log-log slope fit.

    Returns an infinite exponent when the local slope keeps steepening upward
    across the band (super-polynomial growth).
    """
    mags = np.abs(S.values)
    peak = mags.max() if mags.size else 0.0
    if peak == 0:
        raise FitError("spectrum vanishes identically")
    use = (np.abs(S.freqs) >= xi_min) & (mags > floor * peak)
    if use.sum() < 8:
        raise FitError(f"only {int(use.sum())} usable frequencies (need >= 8)")
    lx = np.log(bracket_norm(S.freqs[use]))
    ly = np.log(mags[use])
    A = np.vstack([lx, np.ones_like(lx)]).T
    (slope, _), res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    residual = float(np.sqrt(res[0] / lx.size)) if res.size else 0.0
    exponent = max(0.0, float(slope))
    # curvature check on the upper part of the band
    order = np.argsort(lx)
    lx_s, ly_s = lx[order], ly[order]
    half = lx_s.size // 2
    if half >= 8 and lx_s[-1] - lx_s[half] > 1e-6:
        hi_slope = np.polyfit(lx_s[half:], ly_s[half:], 1)[0]
        if hi_slope > max(slope, 0.0) + 2.0 and hi_slope > 1.0:
            exponent = inf
    return GrowthFit(exponent, float(slope), residual)


def uniform_window_l1(l: float, N: int, grid) -> float:
    """Discrete ``|| <xi>^l F(E_N) ||_{L1}`` over the grid's frequency lattice."""
    spec = forward_transform(GridSignal(grid, gaussian_window(grid.x, 0.0, N)))
    dxi = grid.freq_spacing
    return float(np.sum(bracket_norm(spec.freqs) ** l * np.abs(spec.values)) * dxi)


def log_fit_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


__all__ = [
    "Cone", "ClassifierParams", "CandidateTrace", "DecayReport", "ProbeAnalysis", "GrowthFit",
    "windowed_spectrum", "majorant_sequence", "fit_constant", "classify", "estimate_s_star",
    "polynomial_growth_exponent", "uniform_window_l1", "band_ratio_of", "covering_cones_2d",
    "REGULAR", "SINGULAR", "INCONCLUSIVE", "log_fit_slope",
]
