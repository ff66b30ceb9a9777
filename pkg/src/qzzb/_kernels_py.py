"""Pure numpy implementation of the variational-fidelity kernels.

This is the fallback for the compiled ``_kernels`` extension and must follow
the same algorithm step for step: a dense grid scan, golden-section refinement
of the three best grid-local maxima, then a comparison against fixed anchor
points. Both backends expose the same five names.

State kinds are the integer codes of :class:`qzzb.states.StateKind`
(0 = CS, 1 = SMSVS, 2 = TMSVS).
"""

import math

import numpy as np

GRID_POINTS = 257
MIN_POINTS_PER_PERIOD = 64
REFINE_CANDIDATES = 3
GOLDEN_TOL = 1e-10
THETA_FLOOR = 1e-300

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_TWO_PI = 2.0 * math.pi

BACKEND = "python"


def loss_objective(kind, n, eta, beta, phi):
    """|<psi| Y^n |psi>|^2 with Y = eta e^{-i beta} + (1 - eta) e^{i phi}.

    ``phi`` is the variational phase beta * lambda1. Broadcasts over arrays.
    """
    beta = np.asarray(beta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    sb = np.sin(0.5 * beta)
    sp = np.sin(0.5 * phi)
    # u = 1 - Y, written with half-angle sines to keep precision near Y = 1
    ur = 2.0 * (eta * sb * sb + (1.0 - eta) * sp * sp)
    ui = eta * np.sin(beta) - (1.0 - eta) * np.sin(phi)
    if kind == 0:
        return np.exp(-2.0 * n * ur)
    if kind == 1:
        # 1 + N (1 - Y^2) = 1 + N u (2 - u)
        zr = 1.0 + n * (2.0 * ur - ur * ur + ui * ui)
        zi = n * (2.0 * ui - 2.0 * ur * ui)
        return 1.0 / np.hypot(zr, zi)
    if kind == 2:
        zr = 1.0 + 0.5 * n * ur
        zi = 0.5 * n * ui
        return 1.0 / (zr * zr + zi * zi)
    raise ValueError(f"bad state kind {kind}")


def diffusion_objective(kind, n, kappa, beta, lam):
    """Theta(kappa, beta, lam) * |<psi| e^{i beta (lam - 1) n} |psi>|^2."""
    beta = np.asarray(beta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    bl = beta * lam
    theta = np.exp(-(bl * bl) / (8.0 * kappa * kappa))
    s = np.sin(0.5 * beta * (lam - 1.0))
    big_lambda = 2.0 * s * s
    if kind == 0:
        return theta * np.exp(-2.0 * n * big_lambda)
    if kind == 1:
        s2 = np.sin(beta * (lam - 1.0))
        return theta / np.sqrt(1.0 + 2.0 * n * (1.0 + n) * (2.0 * s2 * s2))
    if kind == 2:
        return theta / (1.0 + n * (1.0 + 0.5 * n) * big_lambda)
    raise ValueError(f"bad state kind {kind}")


def _wrap_phase(phi):
    r = np.fmod(phi + math.pi, _TWO_PI)
    r = np.where(r < 0.0, r + _TWO_PI, r) - math.pi
    return np.where(r == -math.pi, math.pi, r)


def _golden(g, rb, a, b):
    """Vectorised golden-section maximisation; each row stops independently."""
    a = a.copy()
    b = b.copy()
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = g(rb, c)
    fd = g(rb, d)
    active = (b - a) > GOLDEN_TOL
    while active.any():
        idx = np.nonzero(active)[0]
        left = fc[idx] > fd[idx]
        # maximum in [a, d]
        il = idx[left]
        b[il] = d[il]
        d[il] = c[il]
        fd[il] = fc[il]
        c[il] = b[il] - _INVPHI * (b[il] - a[il])
        # maximum in [c, b]
        ir = idx[~left]
        a[ir] = c[ir]
        c[ir] = d[ir]
        fc[ir] = fd[ir]
        d[ir] = a[ir] + _INVPHI * (b[ir] - a[ir])
        if il.size:
            fc[il] = g(rb[il], c[il])
        if ir.size:
            fd[ir] = g(rb[ir], d[ir])
        active[idx] = (b[idx] - a[idx]) > GOLDEN_TOL
    x = 0.5 * (a + b)
    return g(rb, x), x


def _grid_maximize(g, rb, lo, hi, m, periodic, anchors):
    """Maximise ``g(beta, x)`` over x in [lo, hi] for every row of ``rb``.

    ``anchors`` is a list of x arrays (one value per row) that are always
    evaluated. Ties go to the earliest entry in the order: anchors, then for
    each refined candidate its grid point and its golden-section optimum.
    """
    nb = rb.size
    t = np.arange(m, dtype=float) / (m - 1)
    x = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    v = g(rb[:, None], x)
    if periodic:
        vv = v[:, : m - 1]
        left = np.roll(vv, 1, axis=1)
        right = np.roll(vv, -1, axis=1)
    else:
        vv = v
        ninf = np.full((nb, 1), -np.inf)
        left = np.concatenate([ninf, v[:, :-1]], axis=1)
        right = np.concatenate([v[:, 1:], ninf], axis=1)
    masked = np.where((vv >= left) & (vv >= right), vv, -np.inf)
    k = min(REFINE_CANDIDATES, masked.shape[1])
    order = np.argsort(-masked, axis=1, kind="stable")[:, :k]

    cand_f = [g(rb, xa) for xa in anchors]
    cand_x = [np.asarray(xa, dtype=float) for xa in anchors]

    rows = np.repeat(np.arange(nb), k)
    j = order.reshape(-1)
    jl = j - 1
    jr = j + 1
    if not periodic:
        jl = np.maximum(jl, 0)
        jr = np.minimum(jr, m - 1)
    a = lo[rows] + (hi - lo)[rows] * (jl / (m - 1))
    b = lo[rows] + (hi - lo)[rows] * (jr / (m - 1))
    fr, xr = _golden(g, rb[rows], a, b)
    fgrid = v[rows, j]
    xgrid = x[rows, j]
    fr = fr.reshape(nb, k)
    xr = xr.reshape(nb, k)
    fgrid = fgrid.reshape(nb, k)
    xgrid = xgrid.reshape(nb, k)
    for c in range(k):
        cand_f.append(fgrid[:, c])
        cand_x.append(xgrid[:, c])
        cand_f.append(fr[:, c])
        cand_x.append(xr[:, c])
    F = np.stack(cand_f, axis=1)
    X = np.stack(cand_x, axis=1)
    best = np.argmax(F, axis=1)
    return F[np.arange(nb), best], X[np.arange(nb), best]


def maximize_loss(kind, n, eta, betas):
    """Maximise :func:`loss_objective` over phi in (-pi, pi] for each beta.

    Returns ``(f_max, phi_opt)`` arrays. beta = 0 rows give (1, 0).
    """
    betas = np.ascontiguousarray(betas, dtype=float)
    f = np.ones_like(betas)
    phi = np.zeros_like(betas)
    sel = np.nonzero(betas != 0.0)[0]
    if sel.size == 0:
        return f, phi

    def g(b, p):
        return loss_objective(kind, n, eta, b, p)

    rb = betas[sel]
    lo = np.full(sel.size, -math.pi)
    hi = np.full(sel.size, math.pi)
    fs, xs = _grid_maximize(g, rb, lo, hi, GRID_POINTS, True, [np.zeros(sel.size)])
    f[sel] = fs
    phi[sel] = _wrap_phase(xs)
    return f, phi


def diffusion_grid_points(kind, beta, half_width):
    """Grid size used for a search interval [-half_width, half_width]."""
    per = 2.0 if kind == 1 else 1.0
    periods = half_width * abs(beta) * per / math.pi
    return max(GRID_POINTS, int(math.ceil(MIN_POINTS_PER_PERIOD * periods)) + 1)


def maximize_diffusion(kind, n, kappa, betas):
    """Maximise :func:`diffusion_objective` over lambda2 for each beta.

    Theta is a Gaussian in lambda2 and the overlap factor is at most 1, so no
    lambda2 with Theta below g0 = max(g(0), g(1)) can beat g0. The search
    interval is therefore [-L, L] with Theta(L) = g0, and L <= 1 because
    g(1) = Theta(1).
    """
    betas = np.ascontiguousarray(betas, dtype=float)
    f = np.ones_like(betas)
    lam = np.zeros_like(betas)
    sel = np.nonzero(betas != 0.0)[0]
    if sel.size == 0:
        return f, lam

    def g(b, x):
        return diffusion_objective(kind, n, kappa, b, x)

    rb = betas[sel]
    f0 = g(rb, np.zeros(sel.size))
    f1 = g(rb, np.ones(sel.size))
    g0 = np.maximum(np.maximum(f0, f1), THETA_FLOOR)
    half = np.sqrt(-8.0 * kappa * kappa * np.log(g0)) / np.abs(rb)
    half = np.minimum(half, 1.0)

    # anchors alone when the interval collapses (g0 == 1)
    fs = np.where(f1 > f0, f1, f0)
    xs = np.where(f1 > f0, 1.0, 0.0)

    live = half > 0.0
    sizes = np.array(
        [diffusion_grid_points(kind, b, h) for b, h in zip(rb, half)], dtype=int
    )
    for m in np.unique(sizes[live]):
        grp = np.nonzero(live & (sizes == m))[0]
        ng = grp.size
        fg, xg = _grid_maximize(
            g, rb[grp], -half[grp], half[grp], int(m), False,
            [np.zeros(ng), np.ones(ng)],
        )
        fs[grp] = fg
        xs[grp] = xg
    f[sel] = fs
    lam[sel] = xs
    return f, lam
