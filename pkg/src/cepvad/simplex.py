"""Deterministic Nelder-Mead simplex minimizer.

Follows the Lagarias et al. (1998) formulation of the method: reflection,
expansion, outside/inside contraction and shrink, with vertices kept sorted
by a stable sort so ties always resolve the same way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import OptimizationError


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    nfev: int
    nit: int
    restarts: int


def initial_simplex(x0, scale=0.25, zero_step=0.025):
    """x0 plus one vertex per axis, displaced by ``scale * |x0_i|``.

    Axes where x0_i == 0 use ``zero_step * max|x0|`` (or ``zero_step`` if x0 is 0).
    """
    x0 = np.asarray(x0, dtype=np.float64)
    steps = scale * np.abs(x0)
    fallback = zero_step * (np.abs(x0).max() or 1.0)
    steps[steps == 0] = fallback
    return np.vstack([x0, x0 + np.diag(steps)])


def _run(f, simplex, fvals, nfev, max_evals, xtol, rho, chi, gamma, sigma):
    n = simplex.shape[1]
    nit = 0
    while nfev < max_evals:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        size = np.abs(simplex[1:] - simplex[0]).max()
        if size <= xtol:
            break
        nit += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]

        xr = centroid + rho * (centroid - worst)
        fr = f(xr)
        nfev += 1
        if fr < fvals[0]:
            xe = centroid + rho * chi * (centroid - worst)
            fe = f(xe)
            nfev += 1
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue

        if fr < fvals[-1]:
            xc = centroid + gamma * rho * (centroid - worst)
            fc = f(xc)
            nfev += 1
            if fc <= fr:
                simplex[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = centroid - gamma * (centroid - worst)
            fc = f(xc)
            nfev += 1
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
                continue

        best = simplex[0]
        simplex[1:] = best + sigma * (simplex[1:] - best)
        for i in range(1, n + 1):
            fvals[i] = f(simplex[i])
        nfev += n
    order = np.argsort(fvals, kind="stable")
    return simplex[order], fvals[order], nfev, nit


def nelder_mead(f, x0, *, scale=0.25, reflection=1.0, expansion=2.0, contraction=0.5,
                shrink=0.5, max_evals=800, xtol=1e-4, restart=True):
    """Minimize ``f`` starting from ``x0``.

    ``xtol`` is relative to ``max|x0|``: the search stops once every vertex
    lies within ``xtol * max|x0|`` of the best one (or the evaluation budget
    runs out).  When ``restart`` is set and the first pass found nothing
    better than ``f(x0)``, the search is restarted once from the best vertex
    with a fresh simplex.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.ndim != 1 or not np.all(np.isfinite(x0)):
        raise OptimizationError("x0 must be a finite 1-D vector")

    def fun(x):
        v = float(f(x))
        if not np.isfinite(v):
            raise OptimizationError(f"objective returned non-finite value {v} at {x}")
        return v

    abs_xtol = xtol * (np.abs(x0).max() or 1.0)
    simplex = initial_simplex(x0, scale)
    fvals = np.array([fun(x) for x in simplex])
    f0 = fvals[0]
    simplex, fvals, nfev, nit = _run(fun, simplex, fvals, len(fvals), max_evals, abs_xtol,
                                     reflection, expansion, contraction, shrink)
    restarts = 0
    if restart and fvals[0] >= f0 and nfev < max_evals:
        restarts = 1
        fresh = initial_simplex(simplex[0], scale)
        fresh_vals = np.concatenate([[fvals[0]], [fun(x) for x in fresh[1:]]])
        nfev += len(fresh) - 1
        simplex, fvals, nfev, more = _run(fun, fresh, fresh_vals, nfev, max_evals, abs_xtol,
                                          reflection, expansion, contraction, shrink)
        nit += more
    return SimplexResult(simplex[0].copy(), float(fvals[0]), nfev, nit, restarts)
