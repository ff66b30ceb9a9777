"""Globally adaptive 7/15-point Gauss-Kronrod quadrature with batched evaluation.

The integrand is called once per refinement round with every new node at once,
so a vectorised integrand (here: one kernel call maximising the fidelity at
all nodes) pays its per-call overhead only a few dozen times per integral.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Kronrod nodes on [0, 1] (symmetric); even indices 1, 3, 5, 7 are the Gauss nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-point rule on [-1, 1]
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    panels: int
    evaluations: int
    converged: bool


def _rule(f, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    y = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    k = half * (y @ KRONROD_WEIGHTS)
    g = half * (y @ GAUSS_WEIGHTS)
    return k, np.abs(k - g)


def integrate(f, a, b, *, epsabs=1e-13, epsrel=1e-10, points=(), initial_panels=16,
              max_panels=8000, min_width=1e-13):
    """Integrate a vectorised ``f`` over [a, b].

    Each round splits the largest-error panels until the unsplit remainder
    carries at most half the tolerance. Stops when the summed |K15 - G7|
    estimate is below max(epsabs, epsrel * |value|).
    """
    a = float(a)
    b = float(b)
    if not b > a:
        raise ValueError("integration interval must satisfy b > a")
    cuts = np.unique(np.concatenate([[a, b], [p for p in points if a < p < b]]))
    edges = []
    per = max(1, initial_panels // (cuts.size - 1))
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        edges.append(np.linspace(lo, hi, per + 1)[:-1])
    lo = np.concatenate(edges)
    hi = np.append(lo[1:], b)
    val, err = _rule(f, lo, hi)
    evals = 15 * lo.size
    width_floor = min_width * (b - a)
    while True:
        total = float(np.sum(val))
        tol = max(epsabs, epsrel * abs(total))
        total_err = float(np.sum(err))
        if total_err <= tol:
            return QuadResult(total, total_err, lo.size, evals, True)
        splittable = (hi - lo) > width_floor
        order = np.argsort(-np.where(splittable, err, -1.0), kind="stable")
        cum = np.cumsum(err[order])
        need = np.searchsorted(cum, total_err - 0.5 * tol) + 1
        pick = order[:need]
        pick = pick[splittable[pick]]
        if pick.size == 0 or lo.size + pick.size > max_panels:
            return QuadResult(total, total_err, lo.size, evals, False)
        mid = 0.5 * (lo[pick] + hi[pick])
        nlo = np.concatenate([lo[pick], mid])
        nhi = np.concatenate([mid, hi[pick]])
        nval, nerr = _rule(f, nlo, nhi)
        evals += 15 * nlo.size
        keep = np.ones(lo.size, dtype=bool)
        keep[pick] = False
        lo = np.concatenate([lo[keep], nlo])
        hi = np.concatenate([hi[keep], nhi])
        val = np.concatenate([val[keep], nval])
        err = np.concatenate([err[keep], nerr])


def simpson(y, x):
    """Composite Simpson rule on a uniform grid with an odd number of points."""
    y = np.asarray(y, dtype=float)
    if y.size < 3 or y.size % 2 == 0:
        raise ValueError("Simpson's rule needs an odd number (>= 3) of samples")
    h = (x[-1] - x[0]) / (y.size - 1)
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())
