"""Desk-scale Neumann parametrix for the transposed operator, d=1.

For a frequency ``xi`` away from the characteristic set one seeks ``w`` with

    P(-D) (exp(-i x xi) w / P_m(xi)) = exp(-i x xi) E_{r^2 N}.

Because ``P(-D)(exp(-i x xi) w) = exp(-i x xi) P(xi - D) w``, dividing the
Taylor expansion of ``P(xi - D)`` by ``P_m(xi)`` gives ``I - R`` with
``R = R_1 + ... + R_m``, where ``R_j`` collects the terms homogeneous of degree
``-j`` in ``xi``.  All ``R_j`` are polynomials in ``D`` and commute, so the sum
over compositions ``j_1 + ... + j_k = p`` of ``R_{j_1} ... R_{j_k}`` is the
polynomial ``T_p = sum_j R_j T_{p-j}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, e, factorial, log, pi, sqrt

import numpy as np
from numpy.polynomial import polynomial as npoly

from .decay import fit_constant, log_fit_slope
from .exceptions import CharacteristicError, ConfigurationError, ResolutionError
from .grid import Grid, GridSignal, bracket_norm, forward_transform, inverse_transform
from .operators import OperatorSpec
from .windows import MAX_DERIVATIVE_ORDER, gaussian_derivative

MAX_PARAMETRIX_ORDER = 3
MAX_PARAMETRIX_N = 8
PRINCIPAL_TOL = 1e-10


# -- composition counting ---------------------------------------------------------------

@lru_cache(maxsize=None)
def _composition_table(m: int, p_max: int) -> tuple:
    # sigma[p] = number of ordered ways to write p with parts in 1..m; sigma[0] = 1 (empty)
    sigma = [1] + [0] * p_max
    for p in range(1, p_max + 1):
        sigma[p] = sum(sigma[p - j] for j in range(1, min(m, p) + 1))
    return tuple(sigma)


def composition_counts(p_max: int, m: int) -> tuple:
    """Exact ``sigma_0..sigma_{p_max}`` as Python integers (no overflow)."""
    if m < 1 or p_max < 0:
        raise ConfigurationError("need m >= 1 and p >= 0", "composition")
    return _composition_table(int(m), int(p_max))


def _binom(n: int, k: int) -> int:
    return comb(n, k) if n >= 0 and k >= 0 else 0


def binomial_bound(p: int, m: int) -> int:
    """``C(2p-1, p) - C(2p-2m-3, p-m-1)``; binomials with a negative entry count as 0."""
    return _binom(2 * p - 1, p) - _binom(2 * p - 2 * m - 3, p - m - 1)


@dataclass(frozen=True)
class CompositionCount:
    p: int
    m: int
    exact: int
    bound: int
    ratio_to_4p: float


def composition_count(p: int, m: int) -> CompositionCount:
    if p < 1 or m < 1:
        raise ConfigurationError("composition_count needs p >= 1 and m >= 1", "composition")
    exact = composition_counts(p, m)[p]
    ratio = float(np.exp(log(exact) - p * log(4.0)))
    return CompositionCount(p, m, exact, binomial_bound(p, m), ratio)


def term_counts(N: int, m: int) -> tuple:
    """``(S, s)``: addends of ``w_N`` and of ``e_N`` (counted as compositions)."""
    K = truncation_order(N, m)
    sigma = composition_counts(K, m)
    S = sum(sigma[:K])
    s_count = sum(sigma[q] * (m - (K - 1 - q)) for q in range(max(0, K - m), K))
    return S, s_count


def truncation_order(N: int, m: int) -> int:
    """``2N - m``, floored at 1 so that ``w_N`` always holds the empty composition."""
    return max(2 * N - m, 1)


# -- symbol expansion --------------------------------------------------------------------

def remainder_polynomials(P: OperatorSpec, xi: float) -> dict:
    """``{j: coefficients of R_j in powers of D}`` for ``j = 1..m``.

    ``P(xi - D) / P_m(xi) = I - sum_j R_j`` where a term
    ``P_{m'}^{(k)}(xi) (-D)^k / k!`` contributes to ``j = m - m' + k``.
    """
    m = P.order_m
    pm = complex(P.principal(xi))
    if abs(pm) < PRINCIPAL_TOL:
        raise CharacteristicError(f"P_m({xi}) = {pm:.3g} vanishes: characteristic direction")
    out = {j: np.zeros(m + 1, dtype=complex) for j in range(1, m + 1)}
    for mp in range(m + 1):
        part = P.homogeneous_part(mp)
        if not part:
            continue
        coef = np.zeros(mp + 1, dtype=complex)
        coef[mp] = part[mp]
        poly = coef
        for k in range(mp + 1):
            if k > 0:
                poly = npoly.polyder(poly)
            if (mp, k) == (m, 0):
                continue
            val = complex(npoly.polyval(xi, poly)) if poly.size else 0j
            j = m - mp + k
            out[j][k] += -val * (-1) ** k / (factorial(k) * pm)
    return {j: npoly.polytrim(c, tol=0) if np.any(c) else np.zeros(1, dtype=complex) for j, c in out.items()}


def _polymul(a, b):
    return npoly.polymul(a, b) if a.size and b.size else np.zeros(1, dtype=complex)


def composition_polynomials(R: dict, K: int) -> list:
    """``T_0..T_{K-1}`` with ``T_0 = 1`` and ``T_p = sum_j R_j T_{p-j}``."""
    T = [np.ones(1, dtype=complex)]
    for p in range(1, K):
        acc = np.zeros(1, dtype=complex)
        for j, r in R.items():
            if j <= p:
                acc = npoly.polyadd(acc, _polymul(r, T[p - j]))
        T.append(acc)
    return T


def apply_polynomial_in_D(coeffs, x, x0: float, n_eff: float) -> np.ndarray:
    """``sum_k c_k D^k E_{x0, n_eff}`` evaluated exactly at ``x`` (``D^k = (-i)^k d^k``)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    for k, c in enumerate(coeffs):
        if c != 0:
            out += c * (-1j) ** k * gaussian_derivative(x, x0, n_eff, k)
    return out


# -- state --------------------------------------------------------------------------------

@dataclass
class ParametrixState:
    operator: OperatorSpec
    scale_r: float
    N: int
    xi: float
    grid: Grid
    w_coeffs: np.ndarray  # w_N = sum_k w_coeffs[k] D^k E_{r^2 N}
    e_coeffs: np.ndarray  # e_N likewise
    term_count_S: int
    remainder_count_s: int
    center: float = 0.0
    w_N: GridSignal = field(init=False, repr=False)
    e_N: GridSignal = field(init=False, repr=False)

    def __post_init__(self):
        self.w_N = GridSignal(self.grid, self.evaluate_w(self.grid.x), "w_N")
        self.e_N = GridSignal(self.grid, self.evaluate_e(self.grid.x), "e_N")

    @property
    def n_eff(self) -> float:
        return self.scale_r**2 * self.N

    @property
    def truncation(self) -> int:
        return truncation_order(self.N, self.operator.order_m)

    def evaluate_w(self, x):
        return apply_polynomial_in_D(self.w_coeffs, x, self.center, self.n_eff)

    def evaluate_e(self, x):
        return apply_polynomial_in_D(self.e_coeffs, x, self.center, self.n_eff)


def scale_threshold(P: OperatorSpec) -> float:
    """``4 h / e`` with ``h`` the largest coefficient modulus."""
    return 4.0 * P.coeff_sup_h / e


def auto_grid(n_eff: float, degree: int, xi: float) -> Grid:
    """A grid wide enough for the highest Hermite factor and fine enough for ``xi``."""
    half = 2.0 * sqrt(n_eff) * (sqrt(2.0 * degree + 1.0) + 6.5)
    band = abs(xi) + 12.0 * sqrt(degree + 1.0) / sqrt(n_eff) + 40.0
    spacing = pi / band
    n = 1 << int(np.ceil(np.log2(2.0 * half / spacing)))
    return Grid(-half, half, max(n, 256))


def build_parametrix(P: OperatorSpec, N: int, xi: float, scale_r: float, grid: Grid | None = None, v: int = 1,
                     check_scale: bool = True, center: float = 0.0) -> ParametrixState:
    """Assemble ``w_N`` and ``e_N`` at frequency ``xi``.

    ``check_scale=False`` skips the ``r^2 > v`` and ``r > 4h/e`` constraints;
    it exists for experiments that show what goes wrong below the threshold.
    """
    if P.dim != 1:
        raise ConfigurationError("the parametrix is implemented for d=1", "operator.coefficients")
    m = P.order_m
    if not 1 <= m <= MAX_PARAMETRIX_ORDER:
        raise ConfigurationError(f"operator order must lie in 1..{MAX_PARAMETRIX_ORDER}", "operator.order_m")
    if int(N) != N or not 1 <= N <= MAX_PARAMETRIX_N:
        raise ConfigurationError(f"N must be an integer in 1..{MAX_PARAMETRIX_N}", "parametrix.N")
    if not scale_r > 0:
        raise ConfigurationError("scale_r must be positive", "parametrix.scale_r")
    if check_scale:
        if not scale_r**2 > v:
            raise ConfigurationError(f"scale_r^2 must exceed v = {v}", "parametrix.scale_r")
        if not scale_r > scale_threshold(P):
            raise ConfigurationError(f"scale_r must exceed 4h/e = {scale_threshold(P):.4g}", "parametrix.scale_r")
    N = int(N)
    K = truncation_order(N, m)
    R = remainder_polynomials(P, xi)
    T = composition_polynomials(R, K)
    w = np.zeros(1, dtype=complex)
    for t in T:
        w = npoly.polyadd(w, t)
    e_poly = np.zeros(1, dtype=complex)
    for q in range(max(0, K - m), K):
        for j, r in R.items():
            if q + j >= K:
                e_poly = npoly.polyadd(e_poly, _polymul(r, T[q]))
    degree = max(w.size, e_poly.size) - 1
    if degree > MAX_DERIVATIVE_ORDER:
        raise ConfigurationError("parametrix needs derivatives beyond the overflow guard", "parametrix.N")
    S, s_count = term_counts(N, m)
    n_eff = scale_r**2 * N
    if grid is None:
        grid = auto_grid(n_eff, degree, xi)
    return ParametrixState(P, float(scale_r), N, float(xi), grid, w, e_poly, S, s_count, center)


# -- verification ---------------------------------------------------------------------------

@dataclass
class ParametrixReport:
    identity_residual: float  # relative to sup |E_{r^2 N}| = 1
    remainder_sup: float
    remainder_constant: float  # sup |e_N| * |xi|^(2N - m)
    pairing: dict = field(default_factory=dict)  # {"values": [...], "C": ..., "M": [...]}


def transpose_residual(state: ParametrixState, tail_tol: float = 1e-10) -> float:
    """Sup of ``P(-D)(exp(-i x xi) w_N / P_m) - exp(-i x xi)(E - e_N)`` over the grid."""
    g = state.grid
    x = g.x
    phase = np.exp(-1j * x * state.xi)
    pm = complex(state.operator.principal(state.xi))
    v = GridSignal(g, phase * state.w_N.values / pm)
    spec = forward_transform(v)
    mags = np.abs(spec.values)
    outer = np.abs(spec.freqs) >= 0.9 * g.nyquist
    if mags[outer].max() > tail_tol * mags.max():
        raise ResolutionError("parametrix grid does not resolve exp(-i x xi) w_N")
    lhs = inverse_transform(spec.with_values(spec.values * state.operator.transpose().symbol(spec.freqs)), g).values
    E = gaussian_derivative(x, state.center, state.n_eff, 0)
    rhs = phase * (E - state.e_N.values)
    return float(np.abs(lhs - rhs).max())


def verify_parametrix(P: OperatorSpec, state: ParametrixState, u: GridSignal | None = None, s: float = 0.5,
                      xi_values=None) -> ParametrixReport:
    """Identity residual, remainder size and, when ``u`` is given, the pairing bound.

    The pairing ``<u, exp(-i x xi) e_N(x, xi)>`` is evaluated over ``xi_values``
    (default ``2, 4, ..., 64`` on the side of ``state.xi``) and the least
    ``C`` with ``|pairing| <= C^(n+1) n^(sn) / <xi>^n`` for ``n <= N`` is reported.
    """
    if P != state.operator:
        raise ConfigurationError("state was built for a different operator", "parametrix.operator")
    if abs(state.xi) < 2:
        raise ConfigurationError("verification needs |xi| >= 2", "parametrix.xi")
    res = transpose_residual(state)
    sup_e = float(np.abs(state.e_N.values).max())
    K = state.truncation
    report = ParametrixReport(res, sup_e, sup_e * abs(state.xi) ** K)
    if u is not None:
        sign = 1.0 if state.xi > 0 else -1.0
        xs = np.asarray(xi_values if xi_values is not None else sign * 2.0 ** np.arange(1, 7), dtype=float)
        vals = []
        for xv in xs:
            st = build_parametrix(P, state.N, xv, state.scale_r, check_scale=False, center=state.center)
            e_u = st.evaluate_e(u.x)
            vals.append(complex(np.sum(u.values * np.exp(-1j * u.x * xv) * e_u) * u.grid.spacing))
        mags = np.abs(vals)
        M = [float(np.max(bracket_norm(xs) ** n * mags)) for n in range(state.N + 1)]
        report.pairing = {"xi": xs.tolist(), "values": [abs(z) for z in vals], "M": M, "C": fit_constant(M, s)}
    return report


def remainder_sweep(P: OperatorSpec, N: int, xi_values, scale_r: float, check_scale: bool = True):
    """``(sup |e_N| per xi, fitted log-log slope, fitted constant c)``."""
    sups = []
    for xv in xi_values:
        st = build_parametrix(P, N, xv, scale_r, check_scale=check_scale)
        sups.append(float(np.abs(st.e_N.values).max()))
    K = truncation_order(N, P.order_m)
    slope = log_fit_slope(np.abs(xi_values), sups)
    c = max(sv * abs(xv) ** K for sv, xv in zip(sups, xi_values))
    return sups, slope, c


def fitted_term_constant(N_max: int = MAX_PARAMETRIX_N, m_max: int = MAX_PARAMETRIX_ORDER) -> float:
    """Least ``c`` with ``S <= c 4^(2N-m)`` over ``N <= N_max``, ``m <= m_max`` (``2N > m``)."""
    best = 0.0
    for m in range(1, m_max + 1):
        for N in range(1, N_max + 1):
            if 2 * N - m < 1:
                continue
            S, _ = term_counts(N, m)
            best = max(best, S / 4.0 ** (2 * N - m))
    return best


__all__ = [
    "composition_count", "composition_counts", "binomial_bound", "CompositionCount", "term_counts",
    "truncation_order", "remainder_polynomials", "composition_polynomials", "ParametrixState",
    "build_parametrix", "verify_parametrix", "ParametrixReport", "transpose_residual", "remainder_sweep",
    "scale_threshold", "fitted_term_constant", "auto_grid",
]
