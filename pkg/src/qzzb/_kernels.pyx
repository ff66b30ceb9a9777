# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled variational-fidelity kernels.

Same algorithm and tie-breaking as ``_kernels_py``: the numpy fallback is the
reference, this module is the fast path. Row loops run without the GIL.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, exp, sqrt, hypot, log, fmod, ceil, fabs, M_PI, INFINITY

cnp.import_array()

GRID_POINTS = 257
MIN_POINTS_PER_PERIOD = 64
REFINE_CANDIDATES = 3
GOLDEN_TOL = 1e-10
THETA_FLOOR = 1e-300

BACKEND = "cython"

DEF C_GRID = 257
DEF C_PER_PERIOD = 64
DEF C_K = 3
DEF C_TOL = 1e-10
DEF C_FLOOR = 1e-300

cdef double INVPHI = (sqrt(5.0) - 1.0) / 2.0
cdef double TWO_PI = 2.0 * M_PI


cdef inline double c_loss(int kind, double n, double eta, double beta, double phi) noexcept nogil:
    cdef double sb = sin(0.5 * beta)
    cdef double sp = sin(0.5 * phi)
    cdef double ur = 2.0 * (eta * sb * sb + (1.0 - eta) * sp * sp)
    cdef double ui = eta * sin(beta) - (1.0 - eta) * sin(phi)
    cdef double zr, zi
    if kind == 0:
        return exp(-2.0 * n * ur)
    if kind == 1:
        zr = 1.0 + n * (2.0 * ur - ur * ur + ui * ui)
        zi = n * (2.0 * ui - 2.0 * ur * ui)
        return 1.0 / hypot(zr, zi)
    zr = 1.0 + 0.5 * n * ur
    zi = 0.5 * n * ui
    return 1.0 / (zr * zr + zi * zi)


cdef inline double c_diffusion(int kind, double n, double kappa, double beta, double lam) noexcept nogil:
    cdef double bl = beta * lam
    cdef double theta = exp(-(bl * bl) / (8.0 * kappa * kappa))
    cdef double s = sin(0.5 * beta * (lam - 1.0))
    cdef double big_lambda = 2.0 * s * s
    cdef double s2
    if kind == 0:
        return theta * exp(-2.0 * n * big_lambda)
    if kind == 1:
        s2 = sin(beta * (lam - 1.0))
        return theta / sqrt(1.0 + 2.0 * n * (1.0 + n) * (2.0 * s2 * s2))
    return theta / (1.0 + n * (1.0 + 0.5 * n) * big_lambda)


cdef inline double c_eval(bint loss, int kind, double n, double s, double beta, double x) noexcept nogil:
    if loss:
        return c_loss(kind, n, s, beta, x)
    return c_diffusion(kind, n, s, beta, x)


cdef inline double c_wrap(double phi) noexcept nogil:
    cdef double r = fmod(phi + M_PI, TWO_PI)
    if r < 0.0:
        r = r + TWO_PI
    r = r - M_PI
    if r == -M_PI:
        r = M_PI
    return r


cdef void c_golden(bint loss, int kind, double n, double s, double beta,
                   double a, double b, double* fout, double* xout) noexcept nogil:
    cdef double c = b - INVPHI * (b - a)
    cdef double d = a + INVPHI * (b - a)
    cdef double fc = c_eval(loss, kind, n, s, beta, c)
    cdef double fd = c_eval(loss, kind, n, s, beta, d)
    while (b - a) > C_TOL:
        if fc > fd:
            b = d
            d = c
            fd = fc
            c = b - INVPHI * (b - a)
            fc = c_eval(loss, kind, n, s, beta, c)
        else:
            a = c
            c = d
            fc = fd
            d = a + INVPHI * (b - a)
            fd = c_eval(loss, kind, n, s, beta, d)
    xout[0] = 0.5 * (a + b)
    fout[0] = c_eval(loss, kind, n, s, beta, xout[0])


cdef void c_grid_max(bint loss, int kind, double n, double s, double beta,
                     double lo, double hi, int m, bint periodic,
                     double* anchors, int nanchors, double* work,
                     double* fout, double* xout) noexcept nogil:
    cdef int j, c, jl, jr, npts, slot
    cdef int best_j[C_K]
    cdef double best_v[C_K]
    cdef double v, left, right, fbest, xbest, fr, xr, xj, a, b
    cdef int k = C_K

    for j in range(m):
        work[j] = c_eval(loss, kind, n, s, beta, lo + (hi - lo) * (<double>j / (m - 1)))

    npts = m - 1 if periodic else m
    if npts < k:
        k = npts
    for c in range(k):
        best_j[c] = -1
        best_v[c] = -INFINITY
    for j in range(npts):
        v = work[j]
        if periodic:
            left = work[j - 1] if j > 0 else work[npts - 1]
            right = work[j + 1] if j < npts - 1 else work[0]
        else:
            left = work[j - 1] if j > 0 else -INFINITY
            right = work[j + 1] if j < npts - 1 else -INFINITY
        if not (v >= left and v >= right):
            v = -INFINITY
        # stable top-k: strictly greater displaces, equal keeps earlier index
        slot = k
        for c in range(k):
            if best_j[c] < 0 or v > best_v[c]:
                slot = c
                break
        if slot < k:
            for c in range(k - 1, slot, -1):
                best_j[c] = best_j[c - 1]
                best_v[c] = best_v[c - 1]
            best_j[slot] = j
            best_v[slot] = v

    fbest = -INFINITY
    xbest = 0.0
    for c in range(nanchors):
        v = c_eval(loss, kind, n, s, beta, anchors[c])
        if v > fbest:
            fbest = v
            xbest = anchors[c]
    for c in range(k):
        j = best_j[c]
        jl = j - 1
        jr = j + 1
        if not periodic:
            if jl < 0:
                jl = 0
            if jr > m - 1:
                jr = m - 1
        a = lo + (hi - lo) * (<double>jl / (m - 1))
        b = lo + (hi - lo) * (<double>jr / (m - 1))
        c_golden(loss, kind, n, s, beta, a, b, &fr, &xr)
        xj = lo + (hi - lo) * (<double>j / (m - 1))
        if work[j] > fbest:
            fbest = work[j]
            xbest = xj
        if fr > fbest:
            fbest = fr
            xbest = xr
    fout[0] = fbest
    xout[0] = xbest


def loss_objective(int kind, double n, double eta, beta, phi):
    """Compiled twin of ``_kernels_py.loss_objective`` (broadcasting)."""
    if kind < 0 or kind > 2:
        raise ValueError(f"bad state kind {kind}")
    b, p = np.broadcast_arrays(np.asarray(beta, dtype=float), np.asarray(phi, dtype=float))
    cdef double[::1] bf = np.ascontiguousarray(b).ravel()
    cdef double[::1] pf = np.ascontiguousarray(p).ravel()
    out = np.empty(bf.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(bf.shape[0]):
            o[i] = c_loss(kind, n, eta, bf[i], pf[i])
    return out.reshape(b.shape) if b.ndim else out[0]


def diffusion_objective(int kind, double n, double kappa, beta, lam):
    """Compiled twin of ``_kernels_py.diffusion_objective`` (broadcasting)."""
    if kind < 0 or kind > 2:
        raise ValueError(f"bad state kind {kind}")
    b, l = np.broadcast_arrays(np.asarray(beta, dtype=float), np.asarray(lam, dtype=float))
    cdef double[::1] bf = np.ascontiguousarray(b).ravel()
    cdef double[::1] lf = np.ascontiguousarray(l).ravel()
    out = np.empty(bf.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(bf.shape[0]):
            o[i] = c_diffusion(kind, n, kappa, bf[i], lf[i])
    return out.reshape(b.shape) if b.ndim else out[0]


def diffusion_grid_points(int kind, double beta, double half_width):
    return c_grid_points(kind, beta, half_width)


cdef inline int c_grid_points(int kind, double beta, double half_width) noexcept nogil:
    cdef double per = 2.0 if kind == 1 else 1.0
    cdef double periods = half_width * fabs(beta) * per / M_PI
    cdef int m = <int>ceil(C_PER_PERIOD * periods) + 1
    return m if m > C_GRID else C_GRID


def maximize_loss(int kind, double n, double eta, betas):
    if kind < 0 or kind > 2:
        raise ValueError(f"bad state kind {kind}")
    cdef double[::1] b = np.ascontiguousarray(betas, dtype=float).ravel()
    f = np.ones(b.shape[0])
    phi = np.zeros(b.shape[0])
    cdef double[::1] fv = f
    cdef double[::1] pv = phi
    cdef double[C_GRID] work
    cdef double anchor = 0.0
    cdef double fo, xo
    cdef Py_ssize_t i
    with nogil:
        for i in range(b.shape[0]):
            if b[i] == 0.0:
                continue
            c_grid_max(True, kind, n, eta, b[i], -M_PI, M_PI, C_GRID, True,
                       &anchor, 1, work, &fo, &xo)
            fv[i] = fo
            pv[i] = c_wrap(xo)
    return f, phi


def maximize_diffusion(int kind, double n, double kappa, betas):
    if kind < 0 or kind > 2:
        raise ValueError(f"bad state kind {kind}")
    cdef double[::1] b = np.ascontiguousarray(betas, dtype=float).ravel()
    f = np.ones(b.shape[0])
    lam = np.zeros(b.shape[0])
    cdef double[::1] fv = f
    cdef double[::1] lv = lam
    cdef double anchors[2]
    anchors[0] = 0.0
    anchors[1] = 1.0
    cdef Py_ssize_t i
    cdef int m, mmax = C_GRID
    cdef double f0, f1, g0, half, fo, xo
    # scratch sized for the largest grid in this batch
    for i in range(b.shape[0]):
        m = c_grid_points(kind, b[i], 1.0)
        if m > mmax:
            mmax = m
    cdef double[::1] work = np.empty(mmax)
    with nogil:
        for i in range(b.shape[0]):
            if b[i] == 0.0:
                continue
            f0 = c_diffusion(kind, n, kappa, b[i], 0.0)
            f1 = c_diffusion(kind, n, kappa, b[i], 1.0)
            g0 = f0 if f0 >= f1 else f1
            if g0 < C_FLOOR:
                g0 = C_FLOOR
            half = sqrt(-8.0 * kappa * kappa * log(g0)) / fabs(b[i])
            if half > 1.0:
                half = 1.0
            if not (half > 0.0):
                if f1 > f0:
                    fv[i] = f1
                    lv[i] = 1.0
                else:
                    fv[i] = f0
                    lv[i] = 0.0
                continue
            m = c_grid_points(kind, b[i], half)
            c_grid_max(False, kind, n, kappa, b[i], -half, half, m, False,
                       anchors, 2, &work[0], &fo, &xo)
            fv[i] = fo
            lv[i] = xo
    return f, lam
