"""Constant-coefficient operators ``P(D)`` with ``D = -i d/dx`` and their propagation checks.

Under this convention ``F(D f)(xi) = xi F f(xi)``, so ``P(D)`` acts on spectra
by multiplication with the symbol ``P(xi) = sum_a c_a xi^a``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decay import REGULAR, ClassifierParams, Cone, ProbeAnalysis, polynomial_growth_exponent
from .exceptions import ConfigurationError, FitError, ResolutionError
from .grid import GridSignal, forward_transform, inverse_transform, require_band_limited
from .localization import EXTENSION_KINDS, ExtensionCandidate, extension_candidates
from .scanner import scan
from .windows import gaussian_window

CHAR_TOL = 1e-12


def _order_of(key) -> int:
    return int(key) if np.isscalar(key) else int(sum(key))


@dataclass(frozen=True)
class OperatorSpec:
    """``P(D) = sum_a coefficients[a] D^a``.

    Keys are non-negative integers in d=1 and tuples of them in d>1.  Zero
    coefficients are dropped; the order is the largest remaining ``|a|``.
    """

    coefficients: dict
    order_m: int | None = None
    coeff_sup_h: float = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        coeffs = {}
        dims = set()
        for key, val in dict(self.coefficients).items():
            if np.isscalar(key):
                key = int(key)
                if key < 0:
                    raise ConfigurationError("derivative orders must be non-negative", "operator.coefficients")
                dims.add(1)
            else:
                key = tuple(int(k) for k in key)
                if any(k < 0 for k in key):
                    raise ConfigurationError("derivative orders must be non-negative", "operator.coefficients")
                dims.add(len(key))
            val = complex(val)
            if val != 0:
                coeffs[key] = val
        if len(dims) > 1:
            raise ConfigurationError("mixed multi-index lengths", "operator.coefficients")
        if not coeffs:
            raise ConfigurationError("operator has no nonzero coefficient", "operator.coefficients")
        order = max(_order_of(k) for k in coeffs)
        if self.order_m is not None and int(self.order_m) != order:
            raise ConfigurationError(f"declared order {self.order_m} but the highest nonzero term has order {order}",
                                     "operator.order_m")
        object.__setattr__(self, "coefficients", dict(sorted(coeffs.items())))
        object.__setattr__(self, "order_m", order)
        object.__setattr__(self, "coeff_sup_h", max(abs(v) for v in coeffs.values()))
        object.__setattr__(self, "dim", dims.pop())

    @classmethod
    def from_list(cls, coeffs) -> "OperatorSpec":
        """``[c_0, c_1, ..., c_m]`` in d=1."""
        return cls({k: c for k, c in enumerate(coeffs)})

    @classmethod
    def parse(cls, text: str) -> "OperatorSpec":
        """Comma-separated d=1 coefficients, lowest order first, e.g. ``"0,0,1"`` for ``D^2``.

        Entries may be complex literals such as ``1j`` or ``2+3j``.
        """
        try:
            vals = [complex(t.strip().replace(" ", "")) for t in str(text).split(",") if t.strip()]
        except ValueError:
            raise ConfigurationError(f"cannot parse coefficient list {text!r}", "operator.coefficients") from None
        return cls.from_list(vals)

    def to_list(self):
        if self.dim != 1:
            raise ConfigurationError("coefficient lists are d=1 only", "operator.coefficients")
        return [self.coefficients.get(k, 0j) for k in range(self.order_m + 1)]

    def _eval(self, xi, principal: bool):
        xi = np.asarray(xi, dtype=complex)
        out = np.zeros(xi.shape if self.dim == 1 else xi.shape[:-1], dtype=complex)
        for key, c in self.coefficients.items():
            if principal and _order_of(key) != self.order_m:
                continue
            if self.dim == 1:
                out = out + c * xi**key
            else:
                term = np.ones(out.shape, dtype=complex)
                for i, k in enumerate(key):
                    term = term * xi[..., i] ** k
                out = out + c * term
        return out

    def symbol(self, xi):
        return self._eval(xi, principal=False)

    def principal(self, xi):
        return self._eval(xi, principal=True)

    def homogeneous_part(self, degree: int) -> dict:
        return {k: c for k, c in self.coefficients.items() if _order_of(k) == degree}

    def transpose(self) -> "OperatorSpec":
        """``P(-D)``: the formal transpose of a constant-coefficient operator."""
        return OperatorSpec({k: c * (-1) ** _order_of(k) for k, c in self.coefficients.items()})


def apply_operator(P: OperatorSpec, f: GridSignal, tail_tol: float = 1e-10) -> GridSignal:
    """``P(D) f`` computed spectrally; refuses signals that are not band-limited."""
    if P.dim != 1:
        raise ConfigurationError("apply_operator works on d=1 grids", "operator.coefficients")
    require_band_limited(f, tail_tol)
    spec = forward_transform(f)
    return inverse_transform(spec.with_values(spec.values * P.symbol(spec.freqs)), f.grid, f"P(D){f.label}")


def characteristic_set(P: OperatorSpec, directions, tol: float = CHAR_TOL) -> list:
    """Directions where the principal symbol vanishes on the unit sphere.

    ``directions`` are signs in d=1, and angles or 2-vectors in d=2.
    """
    out = []
    for d in directions:
        if P.dim == 1:
            if d == 0:
                raise ConfigurationError("direction must be nonzero", "probes.directions")
            unit = np.sign(float(d))
            val = P.principal(unit)
        else:
            vec = np.asarray(d, dtype=float)
            if vec.ndim == 0:
                vec = np.array([np.cos(vec), np.sin(vec)])
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise ConfigurationError("direction must be nonzero", "probes.directions")
            val = P.principal(vec / norm)
        if abs(complex(val)) <= tol:
            out.append(d)
    return out


# -- Reg(s, P, u) ---------------------------------------------------------------------

@dataclass
class RegSPUReport:
    member: bool
    x0: float
    direction: int
    s: float
    growth_exponent: float | None = None  # l of the chosen extension
    C: float | None = None
    candidate: str | None = None
    skipped: list = field(default_factory=list)  # (kind, reason)
    decision: str | None = None


def _growth(sig: GridSignal, xi_min: float) -> float:
    try:
        return polynomial_growth_exponent(forward_transform(sig), xi_min).exponent
    except FitError:
        return 0.0  # spectrum negligible beyond xi_min


def reg_spu_test(u: GridSignal, P: OperatorSpec, x0: float, direction: int, s: float = 0.5,
                 params: ClassifierParams | None = None, radius: float = 1.0,
                 kinds=EXTENSION_KINDS) -> RegSPUReport:
    """Is ``(x0, direction)`` in ``Reg(s, P, u)``?

    Member iff some extension of ``u`` has a polynomially bounded spectrum and
    ``P(D)`` of that same extension is classified regular at the probe.
    Extensions that are not band-limited cannot be differentiated spectrally and
    are skipped with a reason.
    """
    params = (params or ClassifierParams()).with_s(s)
    rep = RegSPUReport(False, float(x0), int(direction), s)
    cands = extension_candidates(u, x0, radius, kinds, params.v, params.N_max)
    usable, growths = [], {}
    for c in cands:
        l = _growth(c.signal, params.xi_min)
        if not np.isfinite(l):
            rep.skipped.append((c.kind, "spectrum grows faster than any polynomial"))
            continue
        try:
            pu = apply_operator(P, c.signal)
        except ResolutionError as exc:
            rep.skipped.append((c.kind, str(exc)))
            continue
        usable.append(ExtensionCandidate(c.kind, pu, c.leak_budget, c.restriction))
        growths[c.kind] = l
    if not usable:
        return rep
    report = ProbeAnalysis(usable, x0, params).classify(Cone(direction=direction, xi_min=params.xi_min), s)
    rep.decision = report.decision
    rep.candidate = report.best_candidate
    rep.growth_exponent = growths[report.best_candidate]
    rep.C = report.max_C
    rep.member = report.decision == REGULAR
    return rep


@dataclass
class InclusionReport:
    passed: bool
    s: float
    singular_u: set
    singular_pu: set
    characteristic: list
    first_violations: list = field(default_factory=list)  # singular(Pu) but u not singular
    second_violations: list = field(default_factory=list)  # singular(u) but in Reg and not characteristic
    reg: dict = field(default_factory=dict)


def inclusion_check(u: GridSignal, P: OperatorSpec, probes, s: float = 0.5,
                    params: ClassifierParams | None = None, kinds=EXTENSION_KINDS) -> InclusionReport:
    """Probe-wise check of ``WF_s(P(D)u) subset WF_s(u) subset WF(s,P,u) union Char(P)``."""
    params = (params or ClassifierParams()).with_s(s)
    pu = apply_operator(P, u)
    wf_u = scan(u, probes, params, kinds)
    wf_pu = scan(pu, probes, params, kinds)
    sing_u, sing_pu = wf_u.singular_set(s), wf_pu.singular_set(s)
    char = characteristic_set(P, probes.directions)
    rep = InclusionReport(True, s, sing_u, sing_pu, char)
    for probe in sorted(sing_pu):
        if probe not in sing_u:
            rep.first_violations.append(probe)
    for x0, d in sorted(sing_u):
        if d in char:
            continue
        r = reg_spu_test(u, P, x0, d, s, params, probes.radius, kinds)
        rep.reg[(x0, d)] = r
        if r.member:
            rep.second_violations.append((x0, d))
    rep.passed = not rep.first_violations and not rep.second_violations
    return rep


# -- derivative-window identity -------------------------------------------------------

def derivative_window_identity_check(f: GridSignal, x0: float, N: float, derivative: GridSignal | None = None,
                                     v: int = 1) -> float:
    """Relative sup deviation between both sides of the identity, on the frequency grid.

    Written with ``D = -i d/dx``::

        F((D f) E)(xi) = xi F(f E)(xi) - (i / (2 vN)) F(f (x - x0) E)(xi)

    with ``E = E_{x0, vN}``.  ``D f`` is computed spectrally unless the exact
    derivative ``f'`` is supplied as ``derivative``.
    """
    n_eff = v * N
    if np.abs(f.values).max() == 0:
        return 0.0
    if derivative is None:
        df = apply_operator(OperatorSpec({1: 1}), f)
    else:
        df = derivative.with_values(-1j * derivative.values)
    win = gaussian_window(f.x, x0, n_eff)
    lhs = forward_transform(df.with_values(df.values * win)).values
    fe = forward_transform(f.with_values(f.values * win))
    fxe = forward_transform(f.with_values(f.values * (f.x - x0) * win)).values
    rhs = fe.freqs * fe.values - 1j / (2.0 * n_eff) * fxe
    scale = max(np.abs(lhs).max(), np.abs(rhs).max())
    return float(np.abs(lhs - rhs).max() / scale)


def differentiation_inclusion(f: GridSignal, probes, P: OperatorSpec | None = None, s: float = 0.5,
                              params: ClassifierParams | None = None) -> list:
    """Probes singular for ``P(D) f`` but not for ``f`` (should be empty)."""
    P = P or OperatorSpec({1: 1})
    params = (params or ClassifierParams()).with_s(s)
    sing_f = scan(f, probes, params).singular_set(s)
    sing_pf = scan(apply_operator(P, f), probes, params).singular_set(s)
    return sorted(sing_pf - sing_f)


__all__ = [
    "OperatorSpec", "apply_operator", "characteristic_set", "reg_spu_test", "RegSPUReport",
    "inclusion_check", "InclusionReport", "derivative_window_identity_check", "differentiation_inclusion",
]
