import numpy as np
import pytest

from cepvad.exceptions import OptimizationError
from cepvad.simplex import initial_simplex, nelder_mead


def test_quadratic_minimum():
    f = lambda x: float(np.sum((x - np.array([1.0, -2.0, 0.5])) ** 2))
    res = nelder_mead(f, np.array([3.0, 3.0, 3.0]), xtol=1e-8, max_evals=5000)
    np.testing.assert_allclose(res.x, [1.0, -2.0, 0.5], atol=1e-5)
    assert res.fun < 1e-9


def test_rosenbrock():
    f = lambda x: float((1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2)
    res = nelder_mead(f, np.array([-1.2, 1.0]), xtol=1e-10, max_evals=5000)
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-4)


def test_never_worse_than_start():
    f = lambda x: float(np.floor(np.sum(np.abs(x))))
    x0 = np.array([0.4, 0.3])
    res = nelder_mead(f, x0)
    assert res.fun <= f(x0)


def test_restart_on_plateau():
    res = nelder_mead(lambda x: 1.0, np.ones(3), max_evals=500)
    assert res.restarts == 1
    assert res.fun == 1.0


def test_budget_respected():
    f = lambda x: float(np.sum(x**2))
    res = nelder_mead(f, np.full(4, 10.0), xtol=0.0, max_evals=60)
    assert res.nfev <= 60 + 4


def test_deterministic():
    f = lambda x: float(np.sum(np.abs(x - 0.3)))
    a = nelder_mead(f, np.arange(1.0, 5.0))
    b = nelder_mead(f, np.arange(1.0, 5.0))
    np.testing.assert_array_equal(a.x, b.x)


def test_initial_simplex_edges():
    S = initial_simplex(np.array([2.0, 0.0, -4.0]), 0.25)
    np.testing.assert_array_equal(S[0], [2, 0, -4])
    np.testing.assert_array_equal(np.diag(S[1:] - S[0]), [0.5, 0.1, 1.0])


def test_non_finite_objective():
    with pytest.raises(OptimizationError):
        nelder_mead(lambda x: float("nan"), np.ones(2))
