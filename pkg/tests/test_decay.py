import json
from math import lgamma

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmwf.corpus import DEFAULT_GRID
from qmwf.decay import (INCONCLUSIVE, REGULAR, SINGULAR, ClassifierParams, Cone, ProbeAnalysis, band_ratio_of,
                        classify, covering_cones_2d, estimate_s_star, fit_constant, log_fit_slope,
                        majorant_sequence, polynomial_growth_exponent, uniform_window_l1, windowed_spectrum)
from qmwf.exceptions import BudgetError, ConfigurationError, FitError, GeometryError
from qmwf.finite_diff import local_gevrey_test
from qmwf.grid import Grid, GridSignal, Spectrum, bracket_norm
from qmwf.localization import extension_candidates
from qmwf.windows import WindowSpec


def test_cone_validation_and_membership():
    c = Cone(1, xi_min=2.0, xi_max=10.0)
    assert list(c.contains([-5.0, 1.0, 2.0, 5.0, 10.0, 11.0])) == [False, False, True, True, True, False]
    assert list(Cone(-1).contains([-3.0, 3.0])) == [True, False]
    with pytest.raises(ConfigurationError):
        Cone(1, xi_min=0.5)
    with pytest.raises(ConfigurationError):
        Cone(0.3)
    with pytest.raises(ConfigurationError):
        Cone(1, xi_min=2.0, xi_max=2.0)


def test_covering_cones_2d_cover_the_circle():
    cones = covering_cones_2d(16)
    assert len(cones) == 16 and np.isclose(cones[0].half_angle, np.pi / 8)
    ang = np.linspace(0, 2 * np.pi, 721)
    pts = np.stack([5 * np.cos(ang), 5 * np.sin(ang)], axis=-1)
    counts = sum(c.contains(pts).astype(int) for c in cones)
    assert counts.min() >= 2  # overlapping by half: every direction lies in two sectors


@pytest.mark.parametrize("kwargs,path", [
    ({"s": 1.0}, "classifier.s"),
    ({"s": 0.4}, "classifier.s"),
    ({"N0": 16}, "classifier.N0"),
    ({"N_sweep": (4, 2)}, "classifier.N_sweep"),
    ({"N_sweep": ()}, "classifier.N_sweep"),
    ({"growth_tol": 1.0}, "classifier.growth_tol"),
    ({"v": 0}, "classifier.v"),
    ({"xi_min": 0.5}, "classifier.xi_min"),
    ({"C_cap": 0}, "classifier.C_cap"),
])
def test_params_validation(kwargs, path):
    with pytest.raises(ConfigurationError, match=path):
        ClassifierParams(**kwargs)


def test_params_defaults():
    p = ClassifierParams()
    assert (p.s, p.v, p.N0, p.N_sweep, p.C_cap, p.growth_tol, p.xi_min) == (0.5, 1, 1, (2, 4, 8, 16), 1e6, 1.5, 1.0)
    assert p.N_max == 16 and p.decisive_tol == 2.25


def test_fit_constant_recovers_exact_sequence():
    s, C = 0.6, 2.5
    n = np.arange(10)
    M = C ** (n + 1) * np.where(n > 0, n ** (s * n), 1.0)
    assert np.isclose(fit_constant(M, s), C)
    assert fit_constant(np.zeros(5), s) == 0.0
    with pytest.raises(ConfigurationError):
        fit_constant([-1.0, 1.0], s)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(1e-8, 1e8), min_size=2, max_size=12), st.floats(0.5, 0.99))
def test_fit_constant_is_least_admissible(M, s):
    C = fit_constant(M, s)
    logs = [(n + 1) * np.log(C) + (s * n * np.log(n) if n else 0.0) for n in range(len(M))]
    slack = [lg - np.log(m) for lg, m in zip(logs, M)]
    assert min(slack) > -1e-9  # admissible
    assert min(slack) < 1e-9  # and tight somewhere


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(1e-6, 1e6), min_size=3, max_size=10), st.floats(0.5, 0.9), st.floats(0.5, 0.9))
def test_fit_constant_monotone_in_s(M, s1, s2):
    lo, hi = sorted((s1, s2))
    assert fit_constant(M, hi) <= fit_constant(M, lo) * (1 + 1e-12)


def test_majorant_sequence_matches_brute_force():
    rng = np.random.default_rng(3)
    freqs = np.linspace(-20, 20, 401)
    vals = rng.normal(size=401) * np.exp(-np.abs(freqs) / 4)
    S = Spectrum(freqs, vals)
    cone = Cone(1, xi_min=1.0, xi_max=15.0)
    M = majorant_sequence(S, cone, 6)
    inside = (freqs >= 1.0) & (freqs <= 15.0)
    for n in range(7):
        assert np.isclose(M[n], np.max(bracket_norm(freqs[inside]) ** n * np.abs(vals[inside])), rtol=1e-12)


def test_majorant_floor_and_geometry():
    freqs = np.linspace(-20, 20, 401)
    S = Spectrum(freqs, np.full(401, 1e-14))
    assert np.all(majorant_sequence(S, Cone(1), 4, floor=1e-12) == 0)
    with pytest.raises(GeometryError):
        majorant_sequence(Spectrum(np.linspace(-3, 3, 7), np.ones(7)), Cone(1), 3)


def test_band_ratio():
    assert band_ratio_of([1, 2, 4], [1, 2, 4]) == 1.0
    assert np.isclose(band_ratio_of([1, 8, 4], [1, 2, 4]), 2.0)
    assert band_ratio_of([0, 0], [0, 0]) == 1.0
    assert band_ratio_of([1, 1], [0, 1]) == np.inf


def test_budget_error_on_small_box():
    g = Grid(-16.0, 16.0, 2**11)
    f = GridSignal(g, np.exp(-g.x**2))
    with pytest.raises(BudgetError):
        windowed_spectrum(f, WindowSpec(0.0, 16), 1e-12)


def _analysis(sig, x0, **kw):
    params = ClassifierParams(**kw)
    return ProbeAnalysis(extension_candidates(sig, x0, 1.0, v=params.v, N_max=params.N_max), x0, params)


def test_gaussian_regular_and_s_star(corpus_signals):
    a = _analysis(corpus_signals["gaussian"], 0.0)
    for d in (1, -1):
        rep = a.classify(Cone(d))
        assert rep.decision == REGULAR and rep.best_candidate == "global"
        assert rep.max_C < 10
        assert a.s_star(Cone(d)) == 0.5
    json.dumps(rep.to_record())


def test_heaviside_singular_at_jump(corpus_signals):
    a = _analysis(corpus_signals["heaviside"], 0.0)
    rep = a.classify(Cone(1))
    assert rep.decision == SINGULAR
    assert rep.band_ratio > 2.25
    assert a.s_star(Cone(1)) is None


def test_chirp_inconclusive_at_high_s(corpus_signals):
    # growth N^(1/4) sits between growth_tol and growth_tol^2 on the N sweep
    rep = _analysis(corpus_signals["chirp"], 0.0).classify(Cone(1), 0.9)
    assert rep.decision == INCONCLUSIVE


def test_zero_restriction_is_regular_everywhere():
    g = DEFAULT_GRID
    f = GridSignal(g, np.where(np.abs(g.x) > 5, np.exp(-((g.x - 10) ** 2)), 0.0))
    a = _analysis(f, 0.0)
    for d in (1, -1):
        for s in (0.5, 0.7, 0.95):
            assert a.classify(Cone(d), s).decision == REGULAR


@pytest.mark.parametrize("name,x0", [("heaviside", 0.0), ("gaussian", 1.0), ("chirp", 0.0),
                                     ("one_sided_spectrum", 0.0)])
def test_verdicts_monotone_in_s(corpus_signals, name, x0):
    a = _analysis(corpus_signals[name], x0)
    order = {SINGULAR: 0, INCONCLUSIVE: 1, REGULAR: 2}
    for d in (1, -1):
        ranks = [order[a.classify(Cone(d), s).decision] for s in np.linspace(0.5, 0.95, 10)]
        assert ranks == sorted(ranks)
        Cs = [a.trace(0, Cone(d), s).max_C for s in np.linspace(0.5, 0.95, 10)]
        assert all(b <= c * (1 + 1e-12) for c, b in zip(Cs, Cs[1:]))


def test_functional_wrappers(corpus_signals):
    f = corpus_signals["impulse"]
    cands = extension_candidates(f, 2.0, 1.0)
    assert classify(cands, 2.0, Cone(1)).decision == REGULAR
    assert classify(cands, 2.0, Cone(1), s=0.8).s == 0.8
    assert estimate_s_star(cands, 2.0, Cone(-1)) == 0.5


def test_derivative_bound_consequence_on_gaussian(corpus_signals):
    # both directions regular with all-frequency cones => local Gevrey derivative bounds
    f = corpus_signals["gaussian"]
    for x0 in (-1.0, 0.0, 1.0):
        a = _analysis(f, x0)
        assert all(a.classify(Cone(d)).decision == REGULAR for d in (1, -1))
        t = local_gevrey_test(f, x0, 0.5)
        assert t.passed and np.isfinite(t.C1)
        for k, m in enumerate(t.sups):
            assert m <= t.C1 ** (k + 1) * np.exp(0.5 * lgamma(k + 1)) * (1 + 1e-12)


def test_polynomial_growth_exponent():
    xi = np.linspace(-200, 200, 4001)
    assert abs(polynomial_growth_exponent(Spectrum(xi, bracket_norm(xi) ** 2)).exponent - 2) < 0.01
    assert polynomial_growth_exponent(Spectrum(xi, 1 / bracket_norm(xi))).exponent == 0.0
    assert polynomial_growth_exponent(Spectrum(xi, np.exp(np.abs(xi) / 10))).exponent == np.inf
    with pytest.raises(FitError):
        polynomial_growth_exponent(Spectrum(xi, np.zeros_like(xi)))


def test_uniform_window_l1_l0_is_two_pi():
    # [DERIVED] integral of sqrt(4 pi N) exp(-N xi^2) over the line is 2 pi for every N
    g = Grid(-256.0, 256.0, 2**14)
    for N in (1, 8, 64):
        assert np.isclose(uniform_window_l1(0, N, g), 2 * np.pi, rtol=1e-9)


def test_log_fit_slope():
    x = np.array([4.0, 8.0, 16.0])
    assert np.isclose(log_fit_slope(x, 3 * x**-2.5), -2.5)
