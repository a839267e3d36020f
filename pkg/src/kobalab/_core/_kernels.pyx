# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``kernels_py``.

Same packed-parameter layout, same public signatures, and deliberately the
same grids, iteration counts and tie-breaking rules, so the two backends
agree to rounding error and either one can serve as the oracle for the
other.  See ``kernels_py`` for the layout documentation.
"""

import numpy as np

from libc.math cimport (INFINITY, cbrt, cos, exp, fabs, hypot, log, log10,
                        pow, sin, sqrt)

KIND_EXPPOWER = 1
KIND_PIECEWISE = 2
KIND_MOLLIFIED = 3

cdef int _HDR = 8
cdef int _CHORD_STRIDE = 4
cdef int _BAND_STRIDE = 6
cdef double _INVPHI = (sqrt(5.0) - 1.0) / 2.0

# fixed sizes of the scan grid: 2*64 log-spaced points, the origin, and at
# most 3 anchors * 3 factors * 2 signs of crossing candidates
cdef enum:
    XI_HALF = 64
    XI_MAX = 147


# ---------------------------------------------------------------------------
# profile evaluation


cdef double _base(const double[::1] P, double ax) noexcept nogil:
    cdef double d
    if ax <= 0.0:
        return 0.0
    if ax <= P[2]:
        return exp(-P[1] / pow(ax, P[0]))
    d = ax - P[2]
    return P[3] + P[4] * d + P[5] * d * d * d


cdef double _rho(double u, double rho_norm, double rho_scale) noexcept nogil:
    cdef double w = u / rho_scale
    if fabs(w) >= 1.0:
        return 0.0
    return (rho_norm / rho_scale) * exp(-1.0 / (1.0 - w * w))


cdef double _smooth_abs(const double[::1] P, int goff, double vhat) noexcept nogil:
    """m(v) = (|.| * rho)(v) in unit mollifier coordinates, scalar."""
    cdef int n = <int> P[goff]
    cdef double rho_norm = P[goff + 1 + 2 * n]
    cdef double rho_scale = P[goff + 2 + 2 * n]
    cdef double lo, half, mid, s, r, w, f, g
    cdef int i
    if fabs(vhat) >= rho_scale:
        return fabs(vhat)
    lo = -rho_scale
    half = (vhat - lo) / 2.0
    mid = (vhat + lo) / 2.0
    f = 0.0
    g = 0.0
    for i in range(n):
        s = mid + half * P[goff + 1 + i]
        r = _rho(s, rho_norm, rho_scale)
        w = P[goff + 1 + n + i]
        f += w * r
        g += w * s * r
    f *= half
    g *= half
    return vhat * (2.0 * f - 1.0) - 2.0 * g


cdef double _eval(const double[::1] P, int kind, double x) noexcept nogil:
    cdef double ax = fabs(x)
    cdef double base = _base(P, ax)
    cdef double val = base
    cdef double line, eps
    cdef int nc, nb, boff, goff, i, o
    if kind == 1:
        return val
    nc = <int> P[6]
    for i in range(nc):
        o = _HDR + _CHORD_STRIDE * i
        if P[o] <= ax <= P[o + 1]:
            line = P[o + 2] * ax + P[o + 3]
            if line > val:
                val = line
    if kind == 2:
        return val
    nb = <int> P[7]
    boff = _HDR + _CHORD_STRIDE * nc
    goff = boff + _BAND_STRIDE * nb
    for i in range(nb):
        o = boff + _BAND_STRIDE * i
        if P[o + 2] <= ax <= P[o + 3]:
            eps = P[o + 1]
            line = P[o + 4] * ax + P[o + 5]
            val = 0.5 * (base + line) + \
                0.5 * eps * _smooth_abs(P, goff, (base - line) / eps)
    return val


def eval_profile_batch(params, kind, xs):
    cdef double[::1] P = np.ascontiguousarray(params, dtype=np.float64)
    arr = np.asarray(xs, dtype=np.float64)
    shape = arr.shape
    cdef double[::1] xv = np.ascontiguousarray(arr.ravel())
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef int k = kind
    cdef Py_ssize_t i
    for i in range(xv.shape[0]):
        ov[i] = _eval(P, k, xv[i])
    return out.reshape(shape)


def eval_profile(params, kind, x):
    cdef double[::1] P = np.ascontiguousarray(params, dtype=np.float64)
    return _eval(P, kind, x)


# ---------------------------------------------------------------------------
# inverse


cdef double _base_inv(const double[::1] P, double y) noexcept nogil:
    cdef double psi_xstar = P[3]
    cdef double xstar = P[2]
    cdef double dpsi, lo, hi, mid, d, v
    cdef int it
    if y <= 0.0:
        return 0.0
    if y <= psi_xstar:
        return pow(P[1] / log(1.0 / y), 1.0 / P[0])
    dpsi = P[4]
    if dpsi < 1e-300:
        dpsi = 1e-300
    lo = xstar
    hi = xstar + cbrt(y / P[5]) + (y - psi_xstar) / dpsi + 1.0
    for it in range(90):
        mid = 0.5 * (lo + hi)
        d = mid - xstar
        v = psi_xstar + P[4] * d + P[5] * d * d * d
        if v > y:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


cdef double _inv(const double[::1] P, int kind, double y) noexcept nogil:
    cdef double lo, hi, mid
    cdef int it
    if kind == 1:
        return _base_inv(P, y)
    if y <= 0.0:
        return 0.0
    # the constructed profiles dominate the base, so its inverse brackets
    hi = _base_inv(P, y)
    lo = 0.0
    for it in range(90):
        mid = 0.5 * (lo + hi)
        if _eval(P, kind, mid) > y:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def inverse_profile_batch(params, kind, ys):
    cdef double[::1] P = np.ascontiguousarray(params, dtype=np.float64)
    arr = np.asarray(ys, dtype=np.float64)
    shape = arr.shape
    cdef double[::1] yv = np.ascontiguousarray(arr.ravel())
    out = np.empty(yv.shape[0])
    cdef double[::1] ov = out
    cdef int k = kind
    cdef Py_ssize_t i
    for i in range(yv.shape[0]):
        ov[i] = _inv(P, k, yv[i])
    return out.reshape(shape)


def inverse_profile(params, kind, y):
    cdef double[::1] P = np.ascontiguousarray(params, dtype=np.float64)
    return _inv(P, kind, y)


# ---------------------------------------------------------------------------
# Euclidean boundary distance in the (Re z1, Re z2) plane


cdef double _dist2(const double[::1] P, int kind, double x0, double b,
                   double x) noexcept nogil:
    cdef double dy = _eval(P, kind, x) - b
    return (x - x0) * (x - x0) + dy * dy


cdef void _golden_dist(const double[::1] P, int kind, double x0, double b,
                       double lo, double hi, double* xm,
                       double* fm) noexcept nogil:
    cdef double a = lo, bb = hi, c, d, fc, fd
    cdef int it
    c = bb - _INVPHI * (bb - a)
    d = a + _INVPHI * (bb - a)
    fc = _dist2(P, kind, x0, b, c)
    fd = _dist2(P, kind, x0, b, d)
    for it in range(70):
        if fc < fd:
            bb = d
            d = c
            fd = fc
            c = bb - _INVPHI * (bb - a)
            fc = _dist2(P, kind, x0, b, c)
        else:
            a = c
            c = d
            fc = fd
            d = a + _INVPHI * (bb - a)
            fd = _dist2(P, kind, x0, b, d)
    if fc < fd:
        xm[0] = c
        fm[0] = fc
    else:
        xm[0] = d
        fm[0] = fd


def boundary_distance_batch(params, kind, x0s, bs):
    cdef double[::1] P = np.ascontiguousarray(params, dtype=np.float64)
    cdef double[::1] xv = np.ascontiguousarray(x0s, dtype=np.float64).ravel()
    cdef double[::1] bv = np.ascontiguousarray(bs, dtype=np.float64).ravel()
    cdef Py_ssize_t n = xv.shape[0]
    out = np.empty(n)
    cdef double[::1] ov = out
    cdef int k = kind
    cdef Py_ssize_t i, j, idx
    cdef double span, x0, b, best, v, x, lo, hi, xm, fm
    for i in range(n):
        x0 = xv[i]
        b = bv[i]
        span = 1.05 * b + 1e-12
        idx = 0
        best = INFINITY
        for j in range(257):
            x = x0 + span * (-1.0 + 2.0 * j / 256.0)
            v = _dist2(P, k, x0, b, x)
            if v < best:
                best = v
                idx = j
        j = idx - 1 if idx > 0 else 0
        lo = x0 + span * (-1.0 + 2.0 * j / 256.0)
        j = idx + 1 if idx < 256 else 256
        hi = x0 + span * (-1.0 + 2.0 * j / 256.0)
        _golden_dist(P, k, x0, b, lo, hi, &xm, &fm)
        ov[i] = sqrt(fm)
    return out


def boundary_distance(params, kind, x0, b):
    """Distance to the profile graph plus the minimizing abscissa.

    Ties (symmetric minima) resolve to the smallest |x|, then positive x.
    """
    cdef double[::1] P = np.ascontiguousarray(params, dtype=np.float64)
    cdef int k = kind
    cdef double xx0 = x0, bb = b
    cdef double glo = xx0 - 1.05 * bb - 1e-12
    cdef double ghi = xx0 + 1.05 * bb + 1e-12
    cdef double step = (ghi - glo) / 512.0
    cdef double[513] grid
    cdef double[513] vals
    cdef int[513] locs
    cdef int n_loc = 0, i, j, m, pick, take
    cdef double[4] cf
    cdef double[4] cx
    cdef double lo, hi, xm, fm, best, vbest, tol
    cdef double xhat, sx, sc
    for i in range(513):
        grid[i] = glo + step * i
    grid[512] = ghi
    for i in range(513):
        vals[i] = _dist2(P, k, xx0, bb, grid[i])
    for i in range(1, 512):
        if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]:
            locs[n_loc] = i
            n_loc += 1
    if n_loc == 0:
        pick = 0
        for i in range(1, 513):
            if vals[i] < vals[pick]:
                pick = i
        locs[0] = pick
        n_loc = 1
    # refine the (up to) four lowest basins, then tie-break
    take = 4 if n_loc > 4 else n_loc
    for m in range(take):
        pick = -1
        vbest = INFINITY
        for j in range(n_loc):
            if locs[j] >= 0 and vals[locs[j]] < vbest:
                vbest = vals[locs[j]]
                pick = j
        i = locs[pick]
        locs[pick] = -1
        lo = grid[i - 1] if i > 0 else grid[0]
        hi = grid[i + 1] if i < 512 else grid[512]
        _golden_dist(P, k, xx0, bb, lo, hi, &xm, &fm)
        cf[m] = fm
        cx[m] = xm
    best = cf[0]
    for m in range(1, take):
        if cf[m] < best:
            best = cf[m]
    tol = best + 1e-14 * (1.0 + best)
    xhat = 0.0
    pick = 0
    for m in range(take):
        if cf[m] > tol:
            continue
        if pick == 0:
            xhat = cx[m]
            pick = 1
            continue
        sx = 0.0 if cx[m] == 0.0 else (1.0 if cx[m] > 0.0 else -1.0)
        sc = 0.0 if xhat == 0.0 else (1.0 if xhat > 0.0 else -1.0)
        if fabs(cx[m]) < fabs(xhat) or \
                (fabs(cx[m]) == fabs(xhat) and -sx < -sc):
            xhat = cx[m]
    return float(sqrt(best)), float(xhat)


# ---------------------------------------------------------------------------
# directional boundary distance


cdef int _xi_grid(double a0, double a1, double a2, double reach,
                  double* xi) noexcept nogil:
    """Sign-symmetric logarithmic xi grid with crossing anchors included."""
    cdef double amin = a0
    cdef double scale, la, lb, step, v, t
    cdef double[XI_HALF] g
    cdef int n = 0, i, j, m
    if a1 < amin:
        amin = a1
    if a2 < amin:
        amin = a2
    scale = amin * 1e-4
    if scale < 1e-12:
        scale = 1e-12
    la = log10(scale)
    lb = log10(reach)
    step = (lb - la) / (XI_HALF - 1.0)
    for i in range(XI_HALF):
        g[i] = pow(10.0, la + step * i)
    g[0] = scale
    g[XI_HALF - 1] = reach
    for i in range(XI_HALF):
        xi[n] = -g[XI_HALF - 1 - i]
        n += 1
    xi[n] = 0.0
    n += 1
    for i in range(XI_HALF):
        xi[n] = g[i]
        n += 1
    for i in range(3):
        v = a0 if i == 0 else (a1 if i == 1 else a2)
        for j in range(3):
            t = v * (0.9 if j == 0 else (1.0 if j == 1 else 1.1))
            if t <= reach:
                xi[n] = t
                n += 1
                xi[n] = -t
                n += 1
    # sort + exact dedup, matching np.unique
    for i in range(1, n):
        v = xi[i]
        j = i - 1
        while j >= 0 and xi[j] > v:
            xi[j + 1] = xi[j]
            j -= 1
        xi[j + 1] = v
    m = 1
    for i in range(1, n):
        if xi[i] != xi[m - 1]:
            xi[m] = xi[i]
            m += 1
    return m


cdef double _hval(const double[::1] P, int kind, double x0, double b,
                  double b1, double b2, double a1, double a2, double det,
                  double x) noexcept nogil:
    cdef double sig = _eval(P, kind, x0 + x) - b
    cdef double p = (-b2 * x + b1 * sig) / det
    cdef double q = (-a2 * x + a1 * sig) / det
    return p * p + q * q


cdef void _golden_h(const double[::1] P, int kind, double x0, double b,
                    double b1, double b2, double a1, double a2, double det,
                    double lo, double hi, double* xm,
                    double* fm) noexcept nogil:
    cdef double a = lo, bb = hi, c, d, fc, fd
    cdef int it
    c = bb - _INVPHI * (bb - a)
    d = a + _INVPHI * (bb - a)
    fc = _hval(P, kind, x0, b, b1, b2, a1, a2, det, c)
    fd = _hval(P, kind, x0, b, b1, b2, a1, a2, det, d)
    for it in range(70):
        if fc < fd:
            bb = d
            d = c
            fd = fc
            c = bb - _INVPHI * (bb - a)
            fc = _hval(P, kind, x0, b, b1, b2, a1, a2, det, c)
        else:
            a = c
            c = d
            fc = fd
            d = a + _INVPHI * (bb - a)
            fd = _hval(P, kind, x0, b, b1, b2, a1, a2, det, d)
    if fc < fd:
        xm[0] = c
        fm[0] = fc
    else:
        xm[0] = d
        fm[0] = fd


cdef double _scan(const double[::1] P, int kind, double x0, double b,
                  double a1, double b1, double a2, double b2,
                  double depth_cap) noexcept nogil:
    cdef double v1n = hypot(a1, b1)
    cdef double v2n = hypot(a2, b2)
    cdef double psi0 = _eval(P, kind, x0)
    cdef double det, xb, an0, an1, an2, reach, mu, best
    cdef double lo, hi, mid, qm, root, s0, s1, xm, fm, vbest
    cdef double[XI_MAX] xi
    cdef double[XI_MAX] vals
    cdef int[XI_MAX] locs
    cdef int n, i, j, it, n_loc, take, m, pick
    cdef bint found
    if b <= psi0:
        return -1.0
    if v1n == 0.0:
        return (b - psi0) / v2n
    xb = _inv(P, kind, b)
    if v2n == 0.0:
        lo = fabs(xb - x0)
        hi = fabs(xb + x0)
        return (lo if lo < hi else hi) / v1n
    det = a2 * b1 - a1 * b2
    an0 = fabs(xb - x0)
    if an0 < 1e-9:
        an0 = 1e-9
    an1 = fabs(xb + x0)
    if an1 < 1e-9:
        an1 = 1e-9
    an2 = xb
    if an2 < 1e-9:
        an2 = 1e-9
    reach = an0
    if an1 > reach:
        reach = an1
    if an2 > reach:
        reach = an2
    reach = 10.0 * depth_cap * v1n + reach
    n = _xi_grid(an0, an1, an2, reach, xi)

    if fabs(det) <= 1e-14 * v1n * v2n:
        mu = (a1 * a2 + b1 * b2) / (v1n * v1n)
        for i in range(n):
            vals[i] = _eval(P, kind, x0 + xi[i]) - b - mu * xi[i]
        best = INFINITY
        found = False
        for i in range(n):
            if vals[i] == 0.0:
                found = True
                if fabs(xi[i]) < best:
                    best = fabs(xi[i])
        for i in range(n - 1):
            s0 = 0.0 if vals[i] == 0.0 else (1.0 if vals[i] > 0.0 else -1.0)
            s1 = 0.0 if vals[i + 1] == 0.0 else \
                (1.0 if vals[i + 1] > 0.0 else -1.0)
            if s0 * s1 < 0.0:
                lo = xi[i]
                hi = xi[i + 1]
                for it in range(80):
                    mid = 0.5 * (lo + hi)
                    qm = _eval(P, kind, x0 + mid) - b - mu * mid
                    if qm * vals[i] > 0.0:
                        lo = mid
                    else:
                        hi = mid
                root = 0.5 * (lo + hi)
                found = True
                if fabs(root) < best:
                    best = fabs(root)
        if not found:
            return INFINITY
        return best / v1n

    for i in range(n):
        vals[i] = _hval(P, kind, x0, b, b1, b2, a1, a2, det, xi[i])
    n_loc = 0
    for i in range(1, n - 1):
        if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]:
            locs[n_loc] = i
            n_loc += 1
    if n_loc == 0:
        pick = 0
        for i in range(1, n):
            if vals[i] < vals[pick]:
                pick = i
        locs[0] = pick
        n_loc = 1
    take = 3 if n_loc > 3 else n_loc
    best = INFINITY
    for m in range(take):
        pick = -1
        vbest = INFINITY
        for j in range(n_loc):
            if locs[j] >= 0 and vals[locs[j]] < vbest:
                vbest = vals[locs[j]]
                pick = j
        i = locs[pick]
        locs[pick] = -1
        lo = xi[i - 1] if i > 0 else xi[0]
        hi = xi[i + 1] if i < n - 1 else xi[n - 1]
        _golden_h(P, kind, x0, b, b1, b2, a1, a2, det, lo, hi, &xm, &fm)
        if fm < best:
            best = fm
    return sqrt(best)


def directional_distance_scan(params, kind, x0, b, a1, b1, a2, b2, depth_cap):
    """Least |alpha| with z + alpha*v on the boundary, reduced to 1-D in xi.

    Same reduction as the reference backend: xi = Re(alpha v1) determines
    sigma = psi(x0+xi) - b, and |alpha| follows from a 2x2 solve.  Returns
    -1.0 if the point is outside, inf if no hit within 10*depth_cap.
    """
    cdef double[::1] P = np.ascontiguousarray(params, dtype=np.float64)
    return float(_scan(P, kind, x0, b, a1, b1, a2, b2, depth_cap))


def directional_distance_scan_batch(params, kind, x0s, bs, a1s, b1s, a2s, b2s,
                                    depth_cap):
    """Row-wise scan solver; one row per (point, direction) query."""
    cdef double[::1] P = np.ascontiguousarray(params, dtype=np.float64)
    cdef double[::1] xv = np.ascontiguousarray(x0s, dtype=np.float64).ravel()
    cdef double[::1] bv = np.ascontiguousarray(bs, dtype=np.float64).ravel()
    cdef double[::1] a1v = np.ascontiguousarray(a1s, dtype=np.float64).ravel()
    cdef double[::1] b1v = np.ascontiguousarray(b1s, dtype=np.float64).ravel()
    cdef double[::1] a2v = np.ascontiguousarray(a2s, dtype=np.float64).ravel()
    cdef double[::1] b2v = np.ascontiguousarray(b2s, dtype=np.float64).ravel()
    cdef Py_ssize_t n = xv.shape[0]
    out = np.empty(n)
    cdef double[::1] ov = out
    cdef int k = kind
    cdef double cap = depth_cap
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            ov[i] = _scan(P, k, xv[i], bv[i], a1v[i], b1v[i], a2v[i], b2v[i],
                          cap)
    return out


cdef double _ray_root(const double[::1] P, int kind, double x0, double b,
                      double ct1, double ct2, double reach,
                      double root_tol) noexcept nogil:
    # g(t) = b + t*ct2 - psi(x0 + t*ct1), g(0) > 0
    cdef double hi = root_tol if root_tol > 1e-6 else 1e-6
    cdef double g_hi = b + hi * ct2 - _eval(P, kind, x0 + hi * ct1)
    cdef double lo = 0.0, mid
    cdef int it
    while g_hi > 0.0:
        hi *= 2.0
        if hi > reach:
            return INFINITY
        g_hi = b + hi * ct2 - _eval(P, kind, x0 + hi * ct1)
    for it in range(100):
        mid = 0.5 * (lo + hi)
        if b + mid * ct2 - _eval(P, kind, x0 + mid * ct1) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


cdef double _best_for(const double[::1] P, int kind, double x0, double b,
                      double a1, double b1, double a2, double b2,
                      double theta, double reach,
                      double root_tol) noexcept nogil:
    cdef double ct = cos(theta)
    cdef double st = sin(theta)
    cdef double v1r = a1 * ct - b1 * st
    cdef double v2r = a2 * ct - b2 * st
    cdef double r_pos = _ray_root(P, kind, x0, b, v1r, v2r, reach, root_tol)
    cdef double r_neg = _ray_root(P, kind, x0, b, -v1r, -v2r, reach, root_tol)
    return r_pos if r_pos < r_neg else r_neg


def directional_distance_phase(params, kind, x0, b, a1, b1, a2, b2,
                               depth_cap, root_tol=1e-10, n_phase=128):
    """Brute-force reference: sweep complex phases of alpha, bisect each ray.

    Along every line t -> z + t e^{i theta} v the defining function is
    concave in t, so each ray crosses the boundary at most once.
    """
    cdef double[::1] P = np.ascontiguousarray(params, dtype=np.float64)
    cdef int k = kind
    cdef int nph = n_phase
    cdef double xx0 = x0, bb = b, aa1 = a1, bb1 = b1, aa2 = a2, bb2 = b2
    cdef double rtol = root_tol
    cdef double psi0 = _eval(P, k, xx0)
    cdef double reach, theta, v, best, lo, hi, c, d, fc, fd
    cdef double pi = 3.141592653589793
    cdef int i, ibest, it
    if bb <= psi0:
        return -1.0
    reach = 10.0 * depth_cap
    best = INFINITY
    ibest = 0
    for i in range(nph):
        theta = pi * i / nph
        v = _best_for(P, k, xx0, bb, aa1, bb1, aa2, bb2, theta, reach, rtol)
        if v < best:
            best = v
            ibest = i
    lo = pi * ibest / nph - pi / nph
    hi = pi * ibest / nph + pi / nph
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc = _best_for(P, k, xx0, bb, aa1, bb1, aa2, bb2, c, reach, rtol)
    fd = _best_for(P, k, xx0, bb, aa1, bb1, aa2, bb2, d, reach, rtol)
    for it in range(40):
        if fc < fd:
            hi = d
            d = c
            fd = fc
            c = hi - _INVPHI * (hi - lo)
            fc = _best_for(P, k, xx0, bb, aa1, bb1, aa2, bb2, c, reach, rtol)
        else:
            lo = c
            c = d
            fc = fd
            d = lo + _INVPHI * (hi - lo)
            fd = _best_for(P, k, xx0, bb, aa1, bb1, aa2, bb2, d, reach, rtol)
    v = fc if fc < fd else fd
    if best < v:
        v = best
    return float(v)


# ---------------------------------------------------------------------------
# per-segment pseudometric bounds (used for grid edges and curve quadrature)


def segment_kappa_batch(params, kind, x0s, bs, a1s, b1s, a2s, b2s,
                        lower_coeff, depth_cap):
    """Pointwise [lower, upper] on kappa(z; v) for batched (z, v).

    lower = lower_coeff / delta(z; v); upper = min(1/delta(z; v),
    coordinate split).  The pure-(0,v2) case is an exact half-plane slice
    and collapses to a point interval.
    """
    cdef double[::1] P = np.ascontiguousarray(params, dtype=np.float64)
    cdef double[::1] xv = np.ascontiguousarray(x0s, dtype=np.float64).ravel()
    cdef double[::1] bv = np.ascontiguousarray(bs, dtype=np.float64).ravel()
    cdef double[::1] a1v = np.ascontiguousarray(a1s, dtype=np.float64).ravel()
    cdef double[::1] b1v = np.ascontiguousarray(b1s, dtype=np.float64).ravel()
    cdef double[::1] a2v = np.ascontiguousarray(a2s, dtype=np.float64).ravel()
    cdef double[::1] b2v = np.ascontiguousarray(b2s, dtype=np.float64).ravel()
    cdef Py_ssize_t n = xv.shape[0]
    lower = np.empty(n)
    upper = np.empty(n)
    cdef double[::1] lv = lower
    cdef double[::1] uv = upper
    cdef int k = kind
    cdef double lc = lower_coeff
    cdef double cap = depth_cap
    cdef Py_ssize_t i
    cdef double v1n, v2n, psi0, depth, d_full, xb, d_tan, split, lo, hi
    with nogil:
        for i in range(n):
            v1n = hypot(a1v[i], b1v[i])
            v2n = hypot(a2v[i], b2v[i])
            psi0 = _eval(P, k, xv[i])
            depth = bv[i] - psi0
            d_full = _scan(P, k, xv[i], bv[i], a1v[i], b1v[i], a2v[i], b2v[i],
                           cap)
            if d_full > 0.0:
                lv[i] = lc / d_full
                uv[i] = 1.0 / d_full
            else:
                lv[i] = INFINITY
                uv[i] = INFINITY
            # coordinate split upper: tangential slice + exact normal slice
            split = 0.0
            if v1n > 0.0:
                xb = _inv(P, k, bv[i])
                lo = fabs(xb - xv[i])
                hi = fabs(xb + xv[i])
                d_tan = (lo if lo < hi else hi) / v1n
                split += 1.0 / d_tan
            if v2n > 0.0:
                split += v2n / (2.0 * depth)
            if split < uv[i]:
                uv[i] = split
            if v1n == 0.0 and v2n > 0.0:
                lv[i] = v2n / (2.0 * depth)
                uv[i] = v2n / (2.0 * depth)
    return lower, upper
