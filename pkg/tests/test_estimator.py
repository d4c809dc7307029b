import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from qmwf.corpus import DEFAULT_GRID, heaviside
from qmwf.estimator import WavefrontEstimator
from qmwf.exceptions import ConfigurationError
from qmwf.grid import Grid, GridSignal
from qmwf.scanner import ProbeSet, scan
from qmwf.validation import as_grid_signal, check_gevrey_index, check_probes


def test_get_params_and_clone():
    est = WavefrontEstimator(s=0.7, N_sweep=(2, 4, 8))
    params = est.get_params()
    assert params["s"] == 0.7 and params["N_sweep"] == (2, 4, 8)
    c = clone(est)
    assert c.get_params() == params and not hasattr(c, "signal_")
    assert est.set_params(v=2).v == 2


def test_not_fitted():
    with pytest.raises(NotFittedError):
        WavefrontEstimator().predict([[0.0, 1.0]])


def test_predict_matches_scan():
    f = heaviside()
    est = WavefrontEstimator().fit(f)
    probes = np.array([[0.0, 1], [0.0, -1], [2.0, 1], [-2.0, -1]])
    got = est.predict(probes)
    wf = scan(f, ProbeSet((-2.0, 0.0, 2.0)))
    assert got.tolist() == [wf.decision(x0, int(d)) for x0, d in probes]
    assert got.tolist() == ["singular", "singular", "regular", "regular"]
    C = est.transform(probes)
    assert C.shape == (4, 4) and np.all(C >= 0)
    assert np.all(C[3] == 0)  # the step vanishes near x0 = -2
    assert C[0, -1] > C[2, -1]


def test_s_star():
    g = DEFAULT_GRID
    est = WavefrontEstimator().fit(GridSignal(g, np.exp(-g.x**2)))
    np.testing.assert_allclose(est.s_star([[0.0, 1.0]]), [0.5])


def test_fit_array_input():
    g = Grid(-64.0, 64.0, 2**13)
    X = np.column_stack([g.x, np.exp(-g.x**2)])
    est = WavefrontEstimator().fit(X)
    assert est.signal_.grid.num_points == 2**13
    assert est.predict([[0.0, -1.0]]).tolist() == ["regular"]


def test_invalid_s_raises_on_fit():
    with pytest.raises(ConfigurationError):
        WavefrontEstimator(s=1.0).fit(heaviside())


def test_as_grid_signal():
    g = Grid(-4.0, 4.0, 16)
    sig = GridSignal(g, np.ones(16))
    assert as_grid_signal(sig) is sig
    X = np.column_stack([g.x, g.x, -g.x])
    out = as_grid_signal(X, "t")
    assert out.grid == g and np.allclose(out.values, g.x - 1j * g.x) and out.label == "t"
    with pytest.raises(ConfigurationError):
        as_grid_signal(np.ones((16, 4)))
    with pytest.raises(ConfigurationError):
        as_grid_signal(np.column_stack([g.x[::-1], g.x]))
    with pytest.raises(ConfigurationError):
        as_grid_signal(np.column_stack([g.x[:12], g.x[:12]]))
    with pytest.raises(ValueError):
        as_grid_signal(np.array([[0.0, np.nan], [1.0, 0.0]]))


def test_check_probes_and_index():
    assert check_probes([[0, 1], [1, -1]]).shape == (2, 2)
    with pytest.raises(ConfigurationError):
        check_probes([[0, 2]])
    with pytest.raises(ConfigurationError):
        check_probes([[0, 1, 1]])
    assert check_gevrey_index(0.5) == 0.5
    for bad in (0.49, 1.0):
        with pytest.raises(ConfigurationError):
            check_gevrey_index(bad)


def test_docstring_example():
    import doctest

    import qmwf.estimator
    assert doctest.testmod(qmwf.estimator).failed == 0
