import itertools
from math import comb

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from qmwf.exceptions import CharacteristicError, ConfigurationError
from qmwf.grid import GridSignal
from qmwf.operators import OperatorSpec
from qmwf.parametrix import (binomial_bound, build_parametrix, composition_count, composition_counts,
                             fitted_term_constant, remainder_polynomials, remainder_sweep, scale_threshold,
                             term_counts, transpose_residual, truncation_order, verify_parametrix)

X = sp.symbols("x", real=True)


def _brute_compositions(p, m):
    return [c for k in range(1, p + 1) for c in itertools.product(range(1, m + 1), repeat=k) if sum(c) == p]


# -- counting ---------------------------------------------------------------------------

@pytest.mark.parametrize("p,m", [(p, m) for p in range(1, 11) for m in range(1, 5)])
def test_composition_count_brute_force(p, m):
    assert composition_count(p, m).exact == len(_brute_compositions(p, m))


def test_composition_count_examples():
    assert composition_count(1, 3).exact == 1
    c = composition_count(4, 2)
    assert c.exact == 5 and c.bound == 34
    assert np.isclose(c.ratio_to_4p, 5 / 256)
    # [DERIVED] parts in {1, 2} give Fibonacci numbers
    assert composition_counts(10, 2)[1:] == (1, 2, 3, 5, 8, 13, 21, 34, 55, 89)
    # unrestricted parts give 2^(p-1)
    assert composition_count(12, 12).exact == 2**11


def test_composition_count_big_integers():
    c = composition_count(200, 3)
    assert isinstance(c.exact, int) and c.exact > 2**63
    assert 0 < c.ratio_to_4p < 1


def test_binomial_bound_dominates():
    for p in range(1, 41):
        for m in range(1, 6):
            assert composition_count(p, m).exact <= binomial_bound(p, m)
    assert binomial_bound(4, 2) == comb(7, 4) - comb(1, 1)


@pytest.mark.parametrize("p,m", [(0, 1), (1, 0)])
def test_composition_count_validation(p, m):
    with pytest.raises(ConfigurationError):
        composition_count(p, m)


def test_term_counts():
    # P = D, N = 3: compositions of 0..4 with unit parts, one each
    assert truncation_order(3, 1) == 5
    assert term_counts(3, 1) == (5, 1)
    assert truncation_order(1, 2) == 1 and term_counts(1, 2)[0] == 1
    # [DERIVED] brute force: e-terms are (q-composition, j) pairs with q < K <= q + j
    for N, m in [(2, 1), (3, 2), (4, 3)]:
        K = truncation_order(N, m)
        S = 1 + sum(len(_brute_compositions(p, m)) for p in range(1, K))
        s_count = sum(len(_brute_compositions(q, m)) if q else 1
                      for q in range(K) for j in range(1, m + 1) if q + j >= K)
        assert term_counts(N, m) == (S, s_count)


def test_term_count_constant():
    c = fitted_term_constant()
    assert 0 < c <= 2
    for m in (1, 2, 3):
        for N in range(1, 9):
            if 2 * N > m:
                assert term_counts(N, m)[0] <= c * 4.0 ** (2 * N - m)


# -- symbolic oracle --------------------------------------------------------------------

def _sym_remainders(coeffs, xi):
    # R = I - P(xi - D)/P_m(xi); D is the formal symbol t, grouped by degree -j in xi
    t, z = sp.symbols("t z")
    m = max(coeffs)
    expr = sp.expand(sum(sp.nsimplify(c) * (z - t) ** k for k, c in coeffs.items()) / (sp.nsimplify(coeffs[m]) * z**m))
    R = {}
    for term in sp.Add.make_args(expr):
        deg_z = sp.degree(term * z**m, z) - m
        j = -deg_z
        if j == 0:
            continue
        R[j] = R.get(j, 0) - term
    return {j: sp.expand(r.subs(z, xi)) for j, r in R.items()}, t, m


def _apply_poly(poly, t, expr):
    poly = sp.Poly(poly, t)
    return sum(c * (-sp.I) ** k * sp.diff(expr, X, k) for (k,), c in poly.terms())


def _sym_parametrix(coeffs, N, xi, n_eff):
    R, t, m = _sym_remainders(coeffs, xi)
    E = sp.exp(-X**2 / (4 * n_eff))
    K = max(2 * N - m, 1)
    w = E
    for p in range(1, K):
        for comp in _brute_compositions(p, m):
            w += _apply_poly(sp.expand(sp.prod([R.get(j, 0) for j in comp])), t, E)
    e = 0
    for p in range(K, K + m):
        for comp in _brute_compositions(p, m):
            if p - comp[0] < K:
                e += _apply_poly(sp.expand(sp.prod([R.get(j, 0) for j in comp])), t, E)
    # P(xi - D) w / P_m(xi) must equal E - e identically
    lhs = sum(sp.nsimplify(c) * _apply_poly(sp.expand((xi - t) ** k), t, w) for k, c in coeffs.items())
    resid = sp.simplify(sp.expand(lhs / (sp.nsimplify(coeffs[m]) * xi**m) - (E - e)) / E)
    return w, e, resid


@pytest.mark.parametrize("coeffs,N,r", [({1: 1}, 1, 2), ({1: 1}, 2, 2), ({1: 1}, 3, 2), ({0: 5, 1: 1}, 2, 8),
                                        ({0: 1, 2: 1}, 2, 2), ({0: 1, 1: 1, 2: 1}, 3, 2), ({0: 1, 3: 1}, 3, 2)])
def test_parametrix_matches_symbolic_assembly(coeffs, N, r):
    xi = 4
    w, e, resid = _sym_parametrix(coeffs, N, xi, r**2 * N)
    assert resid == 0
    st_ = build_parametrix(OperatorSpec(coeffs), N, float(xi), float(r))
    x = np.linspace(-3 * r * np.sqrt(N), 3 * r * np.sqrt(N), 41)
    want_w = sp.lambdify(X, w, "numpy")(x) * np.ones_like(x)
    np.testing.assert_allclose(st_.evaluate_w(x), want_w, atol=1e-12, rtol=1e-10)
    want_e = sp.lambdify(X, e, "numpy")(x) * np.ones_like(x) if e != 0 else np.zeros_like(x)
    np.testing.assert_allclose(st_.evaluate_e(x), want_e, atol=1e-13, rtol=1e-10)


def test_remainder_polynomials_first_order():
    # P = D + c: P(xi - D)/xi = 1 - (D - c)/xi, so R_1 = (D - c)/xi
    R = remainder_polynomials(OperatorSpec({0: 3, 1: 1}), 4.0)
    np.testing.assert_allclose(R[1], [-3 / 4, 1 / 4])


def test_empty_composition_only():
    st_ = build_parametrix(OperatorSpec({0: 1, 2: 1}), 1, 4.0, 2.0)
    np.testing.assert_allclose(st_.w_N.values, np.exp(-st_.grid.x**2 / 16), atol=1e-15)
    assert st_.term_count_S == 1


# -- residuals ----------------------------------------------------------------------------

@pytest.mark.parametrize("coeffs", [{1: 1}, {0: 1, 2: 1}, {0: 2, 1: 1j, 3: 1}])
@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_transpose_identity_residual(coeffs, N):
    P = OperatorSpec(coeffs)
    r = max(2.0, 1.1 * scale_threshold(P))
    for xi in (4.0, -8.0):
        assert transpose_residual(build_parametrix(P, N, xi, r)) <= 1e-6


@pytest.mark.parametrize("coeffs", [{1: 1}, {0: 1, 2: 1}])
@pytest.mark.parametrize("N", [2, 3, 4])
def test_remainder_slope(coeffs, N):
    P = OperatorSpec(coeffs)
    r = max(2.0, 1.1 * scale_threshold(P))
    _, slope, c = remainder_sweep(P, N, [4.0, 8.0, 16.0, 32.0], r)
    assert slope <= -(2 * N - P.order_m) + 0.3
    assert np.isfinite(c)


def test_scale_gate_negative():
    # below 4h/e the remainder constant grows with N
    P = OperatorSpec({0: 5, 1: 1})
    assert scale_threshold(P) > 2
    cs = [remainder_sweep(P, N, [8.0, 16.0, 32.0], 2.0, check_scale=False)[2] for N in (2, 3, 4)]
    assert cs[0] < cs[1] < cs[2]


def test_verify_parametrix_report():
    P = OperatorSpec({1: 1})
    st_ = build_parametrix(P, 3, 8.0, 2.0)
    rep = verify_parametrix(P, st_)
    assert rep.identity_residual <= 1e-6 and not rep.pairing
    assert np.isclose(rep.remainder_constant, rep.remainder_sup * 8.0**5)
    zero = GridSignal(st_.grid, np.zeros(st_.grid.num_points))
    rep0 = verify_parametrix(P, st_, zero)
    assert rep0.pairing["values"] == [0.0] * 6 and rep0.pairing["C"] == 0
    g = GridSignal(st_.grid, np.exp(-st_.grid.x**2))
    rep1 = verify_parametrix(P, st_, g)
    assert np.isfinite(rep1.pairing["C"]) and len(rep1.pairing["M"]) == 4


def test_parametrix_validation():
    D = OperatorSpec({1: 1})
    with pytest.raises(CharacteristicError):
        build_parametrix(OperatorSpec({1: 1, 2: 1e-12}), 2, 4.0, 2.0)
    with pytest.raises(CharacteristicError):
        remainder_polynomials(D, 0.0)
    with pytest.raises(ConfigurationError, match="4h/e"):
        build_parametrix(D, 2, 4.0, 1.2)
    with pytest.raises(ConfigurationError):
        build_parametrix(D, 2, 4.0, 2.0, v=8)
    with pytest.raises(ConfigurationError):
        build_parametrix(D, 9, 4.0, 2.0)
    with pytest.raises(ConfigurationError):
        build_parametrix(OperatorSpec({4: 1}), 2, 4.0, 2.0)
    with pytest.raises(ConfigurationError):
        build_parametrix(OperatorSpec({0: 1}), 2, 4.0, 2.0)
    st_ = build_parametrix(D, 2, 1.0, 2.0)
    with pytest.raises(ConfigurationError):
        verify_parametrix(D, st_)
    with pytest.raises(ConfigurationError):
        verify_parametrix(OperatorSpec({1: 2}), build_parametrix(D, 2, 4.0, 2.0))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 60), st.integers(1, 6))
def test_count_recurrence_property(p, m):
    sigma = composition_counts(p, m)
    assert sigma[p] == sum(sigma[p - j] for j in range(1, min(m, p) + 1))
    assert sigma[p] <= 2 ** (p - 1)
