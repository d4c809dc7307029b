"""Wave-front set estimates over probe families, singular supports and Gevrey membership tests."""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import lgamma, log10

import numpy as np

from .decay import (INCONCLUSIVE, REGULAR, SINGULAR, ClassifierParams, Cone, ProbeAnalysis,
                    polynomial_growth_exponent)
from .exceptions import BudgetError, ConfigurationError, FitError, WavefrontError
from .finite_diff import MAX_FD_ORDER, central_difference, local_gevrey_test
from .grid import GridSignal, bracket_norm, forward_transform
from .localization import EXTENSION_KINDS, ExtensionCandidate, extension_candidates

ERROR = "error"
THREADS_ENV = "QM_THREADS"


@dataclass(frozen=True)
class ProbeSet:
    """Probe centres and direction cones; in d=1 the directions must be exactly ``{+1, -1}``."""

    centers: tuple
    directions: tuple = (1, -1)
    radius: float = 1.0

    def __post_init__(self):
        centers = tuple(float(c) for c in self.centers)
        if not centers:
            raise ConfigurationError("probe set needs at least one centre", "probes.centers")
        if len(set(centers)) != len(centers):
            raise ConfigurationError("probe centres must be distinct", "probes.centers")
        dirs = tuple(int(d) for d in self.directions)
        if sorted(set(dirs)) != [-1, 1] or len(dirs) != 2:
            raise ConfigurationError("d=1 directions must cover the sphere: exactly +1 and -1",
                                     "probes.directions")
        if not self.radius > 0:
            raise ConfigurationError("probe radius must be positive", "probes.radius")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "directions", dirs)

    @classmethod
    def from_range(cls, start: float, stop: float, count: int, radius: float = 1.0) -> "ProbeSet":
        return cls(tuple(np.linspace(start, stop, count)), (1, -1), radius)

    def pairs(self):
        return [(x0, d) for x0 in self.centers for d in self.directions]


@dataclass
class ProbeEntry:
    x0: float
    direction: int
    s: float
    decision: str
    s_star: float | None = None
    best_candidate: str | None = None
    fitted_C: list = field(default_factory=list)  # (N, C_N)
    report: object = None
    error: str | None = None

    @property
    def max_C(self) -> float:
        return max((c for _, c in self.fitted_C), default=float("nan"))

    def to_record(self) -> dict:
        rec = {
            "x0": self.x0, "direction": self.direction, "s": self.s, "decision": self.decision,
            "s_star": self.s_star, "best_candidate": self.best_candidate,
            "fitted_C": [[int(n), _json_float(c)] for n, c in self.fitted_C],
        }
        if self.report is not None:
            rec["growth"] = _json_float(self.report.growth)
            rec["band_ratio"] = _json_float(self.report.band_ratio)
            rec["candidates"] = self.report.to_record()["candidates"]
        if self.error is not None:
            rec["error"] = self.error
        return rec


def _json_float(x):
    x = float(x)
    return x if np.isfinite(x) else None


@dataclass
class WavefrontEstimate:
    """Verdicts at probed ``(x0, direction)`` pairs, one entry per pair and ``s``."""

    entries: list
    probes: ProbeSet
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            key = (e.x0, e.direction, e.s)
            if key in seen:
                raise WavefrontError(f"duplicate entry for {key}")
            seen.add(key)
        self.entries.sort(key=lambda e: (e.s, e.x0, -e.direction))

    @property
    def s_values(self):
        return sorted({e.s for e in self.entries})

    def at(self, s: float | None = None):
        if s is None:
            if len(self.s_values) != 1:
                raise ConfigurationError("estimate holds several s values; pass one", "scan.s")
            s = self.s_values[0]
        return [e for e in self.entries if e.s == s]

    def decision(self, x0: float, direction: int, s: float | None = None) -> str:
        for e in self.at(s):
            if e.x0 == x0 and e.direction == direction:
                return e.decision
        raise KeyError((x0, direction, s))

    def singular_set(self, s: float | None = None) -> set:
        return {(e.x0, e.direction) for e in self.at(s) if e.decision == SINGULAR}

    def regular_set(self, s: float | None = None) -> set:
        return {(e.x0, e.direction) for e in self.at(s) if e.decision == REGULAR}

    def uniformity(self, s: float | None = None) -> dict:
        """Whether one constant, and one candidate kind, serves every probe of the cover."""
        entries = self.at(s)
        regular = [e for e in entries if e.decision == REGULAR]
        all_regular = len(regular) == len(entries)
        if not regular:
            return {"all_regular": False, "C": None, "kinds": [], "single_kind": False}
        C = max(e.max_C for e in regular)
        kinds = sorted({e.best_candidate for e in regular})
        return {"all_regular": all_regular, "C": float(C), "kinds": kinds, "single_kind": len(kinds) == 1}

    def to_records(self):
        return [e.to_record() for e in self.entries]


def _thread_count(threads):
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {env!r}", THREADS_ENV) from None
        else:
            threads = min(8, os.cpu_count() or 1)
    if threads < 1:
        raise ConfigurationError("thread count must be >= 1", THREADS_ENV)
    return threads


def _scan_center(f, x0, probes, params, kinds, s_values, with_s_star):
    out = []
    try:
        cands = extension_candidates(f, x0, probes.radius, kinds, params.v, params.N_max)
        analysis = ProbeAnalysis(cands, x0, params)
        for d in probes.directions:
            cone = Cone(direction=d, xi_min=params.xi_min)
            s_star = analysis.s_star(cone) if with_s_star else None
            for s in s_values:
                rep = analysis.classify(cone, s)
                rep.s_star = s_star
                out.append(ProbeEntry(x0, d, s, rep.decision, s_star, rep.best_candidate, list(rep.sweep), rep))
    except WavefrontError as exc:
        for d in probes.directions:
            for s in s_values:
                out.append(ProbeEntry(x0, d, s, ERROR, error=f"{type(exc).__name__}: {exc}"))
    return out


def scan(f: GridSignal, probes: ProbeSet, params: ClassifierParams | None = None, kinds=EXTENSION_KINDS,
         s_values=None, with_s_star: bool = False, threads: int | None = None) -> WavefrontEstimate:
    """Classify every probe of ``probes``; per-probe geometry or budget errors become ``error`` entries.

    Probe centres run in a thread pool capped by ``QM_THREADS``; results are
    ordered deterministically regardless of completion order.
    """
    params = params or ClassifierParams()
    s_values = tuple(sorted(set(s_values))) if s_values is not None else (params.s,)
    for s in s_values:
        params.with_s(s)  # validates
    n_threads = min(_thread_count(threads), len(probes.centers))
    args = [(f, x0, probes, params, tuple(kinds), s_values, with_s_star) for x0 in probes.centers]
    if n_threads == 1:
        chunks = [_scan_center(*a) for a in args]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            chunks = list(pool.map(lambda a: _scan_center(*a), args))
    entries = [e for chunk in chunks for e in chunk]
    wf = WavefrontEstimate(entries, probes)
    wf.warnings = consistency_warnings(wf)
    return wf


def consistency_warnings(wf: WavefrontEstimate) -> list:
    """Singular probes lying inside the ball of a regular probe in the same direction.

    A regular verdict at ``x0`` certifies every point of the ball around ``x0``
    for that cone, so such a pair cannot both be right.
    """
    out = []
    r = wf.probes.radius
    for s in wf.s_values:
        entries = wf.at(s)
        for sing in (e for e in entries if e.decision == SINGULAR):
            for reg in (e for e in entries if e.decision == REGULAR):
                if reg.direction == sing.direction and abs(reg.x0 - sing.x0) < r:
                    out.append(f"s={s:g}: singular probe ({sing.x0:g}, {sing.direction:+d}) lies inside the "
                               f"regular ball around {reg.x0:g}")
    return out


def singular_support(wf: WavefrontEstimate, s: float | None = None) -> set:
    """Centres with at least one singular direction."""
    return {x0 for x0, _ in wf.singular_set(s)}


# -- local derivative tests -------------------------------------------------------

def gevrey_failures(f: GridSignal, centers, s: float = 0.5, **kwargs) -> set:
    """Centres at which the finite-difference Gevrey bound test fails."""
    return {float(x0) for x0 in centers if not local_gevrey_test(f, x0, s, **kwargs).passed}


# -- Gevrey-type membership of multipliers -----------------------------------------

@dataclass
class MembershipReport:
    admissible: bool
    h: float | None  # largest admissible constant (inf for theta = 0)
    q: list  # q_a = || <xi>^a theta_hat ||_inf / a!^s
    s: float
    reason: str = ""


EDGE_TOL = 1e-10


def tilde_es_membership(theta: GridSignal, s: float, alpha_max: int = 16, floor: float = 1e-13,
                        edge_tol: float = EDGE_TOL) -> MembershipReport:
    """Largest ``h`` with ``sup_a h^a q_a <= 10 q_0`` for ``a <= alpha_max``, or none.

    Spectral samples below ``floor * max|theta_hat|`` are treated as zero.  The
    answer is none when a weighted maximum sits in the outer tenth of the grid
    band, which is where a spectrum that does not decay faster than every
    power of ``<xi>`` puts it.
    """
    if alpha_max < 1:
        raise ConfigurationError("alpha_max must be >= 1", "membership.alpha_max")
    vals = np.abs(theta.values)
    peak = float(vals.max())
    if peak == 0:
        return MembershipReport(True, float("inf"), [0.0] * (alpha_max + 1), s, "theta vanishes")
    edge = max(vals[0], vals[-1])
    if edge > edge_tol * max(1.0, peak):
        raise BudgetError(f"theta is {edge:.2e} at the box edge (needs <= {edge_tol:g} relative)")
    spec = forward_transform(theta)
    mags = np.abs(spec.values)
    keep = mags > floor * mags.max()
    xi = spec.freqs[keep]
    log_m = np.log(mags[keep])
    log_b = np.log(bracket_norm(xi))
    band_edge = 0.9 * theta.grid.nyquist
    q = []
    for a in range(alpha_max + 1):
        weighted = a * log_b + log_m
        k = int(np.argmax(weighted))
        if a >= 1 and abs(xi[k]) >= band_edge:
            return MembershipReport(False, None, q, s, f"order {a} maximum sits at the band edge")
        q.append(float(np.exp(weighted[k] - s * lgamma(a + 1))))
    h = min((10.0 * q[0] / q[a]) ** (1.0 / a) for a in range(1, alpha_max + 1))
    return MembershipReport(True, float(h), q, s)


@dataclass
class SupDerivativeCheck:
    passed: bool
    h1: float
    measured: list  # h1^a ||theta^(a)||_inf / a!^s
    bounds: list


def cross_check_sup_derivatives(theta: GridSignal, s: float, h: float, alpha_max: int = 16,
                                step_points: int = 8, slack: float = 1.05) -> SupDerivativeCheck:
    """Check ``h1^a ||theta^(a)||_inf / a!^s`` against the bound implied by membership, ``h1 = h/2``.

    From ``|theta^(a)| <= (1/2pi) int |xi|^a |theta_hat|`` and
    ``int <xi>^-2 = pi`` one gets
    ``h1^a ||theta^(a)||_inf / a!^s <= 5 q_0 h^-2 2^-a ((a+1)(a+2))^s``
    whenever ``h^(a+2) q_(a+2) <= 10 q_0``.  Derivatives come from central
    differences (orders up to 6 and ``alpha_max - 2``).
    """
    h1 = h / 2.0
    vals = np.abs(theta.values)
    if vals.max() == 0:
        return SupDerivativeCheck(True, h1, [], [])
    top = min(MAX_FD_ORDER, alpha_max - 2)
    if top < 0:
        raise ConfigurationError("alpha_max must be >= 2", "membership.alpha_max")
    q0 = float(np.abs(forward_transform(theta).values).max())
    reach = MAX_FD_ORDER * step_points // 2 + 1
    mask = np.zeros(vals.size, dtype=bool)
    mask[reach:-reach] = True
    measured, bounds = [], []
    for a in range(top + 1):
        sup = float(np.max(np.abs(central_difference(theta, a, step_points, mask))))
        measured.append(h1**a * sup / np.exp(s * lgamma(a + 1)))
        bounds.append(5.0 * q0 * h**-2 * 2.0**-a * ((a + 1) * (a + 2)) ** s)
    passed = all(m <= slack * b for m, b in zip(measured, bounds))
    return SupDerivativeCheck(passed, h1, measured, bounds)


# -- product stability ---------------------------------------------------------------

@dataclass
class ProductStabilityReport:
    passed: bool
    checked: list = field(default_factory=list)  # (x0, direction)
    violations: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (what, reason)
    growth_exponent: float | None = None
    membership: MembershipReport | None = None


def _growth_exponent(sig: GridSignal, xi_min: float) -> float:
    spec = forward_transform(sig)
    try:
        return polynomial_growth_exponent(spec, xi_min).exponent
    except FitError:
        # nothing measurable beyond xi_min: the spectrum is negligible there
        return 0.0


def product_stability_check(f: GridSignal, theta: GridSignal, probes: ProbeSet, s: float = 0.5,
                            params: ClassifierParams | None = None, kinds=EXTENSION_KINDS) -> ProductStabilityReport:
    """Every probe regular for ``f`` must stay regular for ``theta * f``.

    The candidates for ``theta f`` are ``theta`` times the candidates of ``f``
    (the extension used in the stability argument) together with the standard
    candidates of ``theta f`` itself.
    """
    params = (params or ClassifierParams()).with_s(s)
    report = ProductStabilityReport(True)
    if np.abs(f.values).max() == 0:
        return report
    try:
        member = tilde_es_membership(theta, s)
    except BudgetError as exc:
        report.skipped.append(("theta", str(exc)))
        return report
    report.membership = member
    if not member.admissible:
        report.skipped.append(("theta", member.reason))
        return report
    prod = theta * f
    for x0 in probes.centers:
        try:
            cands = extension_candidates(f, x0, probes.radius, kinds, params.v, params.N_max)
        except WavefrontError as exc:
            report.skipped.append(((x0,), str(exc)))
            continue
        growths = [_growth_exponent(c.signal, params.xi_min) for c in cands]
        report.growth_exponent = max([report.growth_exponent or 0.0] + growths)
        usable = [c for c, l in zip(cands, growths) if np.isfinite(l)]
        if not usable:
            report.skipped.append(((x0,), "no extension with polynomially bounded spectrum"))
            continue
        base = ProbeAnalysis(usable, x0, params)
        prod_cands = [ExtensionCandidate(f"theta*{c.kind}", theta * c.signal, c.leak_budget, c.restriction)
                      for c in usable]
        prod_cands += extension_candidates(prod, x0, probes.radius, kinds, params.v, params.N_max)
        after = ProbeAnalysis(prod_cands, x0, params)
        for d in probes.directions:
            cone = Cone(direction=d, xi_min=params.xi_min)
            if base.classify(cone).decision != REGULAR:
                continue
            report.checked.append((x0, d))
            if after.classify(cone).decision == SINGULAR:
                report.violations.append((x0, d))
    report.passed = not report.violations
    return report


# -- export ------------------------------------------------------------------------

def write_json(wf: WavefrontEstimate, path, extra: dict | None = None):
    doc = {"probes": wf.to_records(), "warnings": list(wf.warnings)}
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


HEATMAP_HEADER = ["x0", "direction", "s", "log10_fitted_C", "decision"]


def heatmap_rows(records):
    rows = []
    for rec in records:
        cs = [c for _, c in rec.get("fitted_C", []) if c is not None]
        logc = repr(log10(max(cs))) if cs and max(cs) > 0 else ""
        rows.append([repr(float(rec["x0"])), str(int(rec["direction"])), repr(float(rec["s"])), logc,
                     rec["decision"]])
    return rows


def write_heatmap_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEATMAP_HEADER)
        w.writerows(heatmap_rows(records))


__all__ = [
    "ProbeSet", "ProbeEntry", "WavefrontEstimate", "scan", "singular_support", "consistency_warnings",
    "gevrey_failures", "tilde_es_membership", "MembershipReport", "cross_check_sup_derivatives",
    "product_stability_check", "ProductStabilityReport", "write_json", "write_heatmap_csv", "heatmap_rows",
    "REGULAR", "SINGULAR", "INCONCLUSIVE", "ERROR",
]
