"""Reference numpy backend for the profile/distance kernels.

All hot numerical primitives live behind this flat function API so a compiled
backend can replace them one-for-one.  Profile data is passed as a packed
float64 parameter vector (see ``profiles.pack_params`` for the layout):

    [0] alpha   [1] c       [2] x*        [3] psi(x*)
    [4] psi'(x*)            [5] cubic coefficient of the convex extension
    [6] n_chords            [7] n_bands
    8 .. 8+4*n_chords       chords, 4 floats each: x_lo, x_hi, slope, intercept
    .. + 6*n_bands          bands, 6 floats each: t_j, eps_j, lo, hi,
                            chord slope, chord intercept
    (mollified only)        n_gl, GL nodes, GL weights, rho_norm, rho_scale

Profile kinds: 1 = bare exp-power with cubic convex extension,
2 = piecewise chord max, 3 = band-mollified chord max.
"""

import numpy as np

KIND_EXPPOWER = 1
KIND_PIECEWISE = 2
KIND_MOLLIFIED = 3

_HDR = 8
_CHORD_STRIDE = 4
_BAND_STRIDE = 6


def _chord_block(params):
    n = int(params[6])
    return params[_HDR:_HDR + _CHORD_STRIDE * n].reshape(n, _CHORD_STRIDE)


def _band_block(params):
    nc = int(params[6])
    nb = int(params[7])
    off = _HDR + _CHORD_STRIDE * nc
    return params[off:off + _BAND_STRIDE * nb].reshape(nb, _BAND_STRIDE)


def _gl_block(params):
    nc = int(params[6])
    nb = int(params[7])
    off = _HDR + _CHORD_STRIDE * nc + _BAND_STRIDE * nb
    n_gl = int(params[off])
    nodes = params[off + 1:off + 1 + n_gl]
    weights = params[off + 1 + n_gl:off + 1 + 2 * n_gl]
    rho_norm = params[off + 1 + 2 * n_gl]
    rho_scale = params[off + 2 + 2 * n_gl]
    return n_gl, nodes, weights, rho_norm, rho_scale


# ---------------------------------------------------------------------------
# profile evaluation


def _base_profile(params, ax):
    """Convex base profile on |x|: exp(-c/x^alpha) continued by a cubic."""
    alpha, c, xstar = params[0], params[1], params[2]
    ax = np.asarray(ax, dtype=float)
    out = np.zeros_like(ax)
    pos = ax > 0.0
    inner = pos & (ax <= xstar)
    if np.any(inner):
        with np.errstate(over="ignore", under="ignore", divide="ignore"):
            out[inner] = np.exp(-c / ax[inner] ** alpha)
    outer = ax > xstar
    if np.any(outer):
        d = ax[outer] - xstar
        out[outer] = params[3] + params[4] * d + params[5] * d ** 3
    return out


def _rho_unit(u, rho_norm, rho_scale):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    w = u / rho_scale
    mask = np.abs(w) < 1.0
    if np.any(mask):
        with np.errstate(over="ignore", under="ignore", divide="ignore"):
            out[mask] = (rho_norm / rho_scale) * np.exp(-1.0 / (1.0 - w[mask] ** 2))
    return out


def _smooth_abs_unit(vhat, n_gl, nodes, weights, rho_norm, rho_scale):
    """m(v) = (|.| * rho)(v) in unit mollifier coordinates, vectorized.

    Uses m(v) = v*(2F(v)-1) - 2G(v) with F, G the mass / first-moment
    integrals of rho over [-1, v]; exact |v| outside the support.
    """
    vhat = np.atleast_1d(np.asarray(vhat, dtype=float))
    out = np.abs(vhat)
    mask = np.abs(vhat) < rho_scale
    if np.any(mask):
        v = vhat[mask]
        lo = -rho_scale
        half = (v - lo) / 2.0
        mid = (v + lo) / 2.0
        s = mid[:, None] + half[:, None] * nodes[None, :]
        rho = _rho_unit(s, rho_norm, rho_scale)
        f = half * np.sum(weights[None, :] * rho, axis=1)
        g = half * np.sum(weights[None, :] * s * rho, axis=1)
        out[mask] = v * (2.0 * f - 1.0) - 2.0 * g
    return out


def eval_profile_batch(params, kind, xs):
    xs = np.asarray(xs, dtype=float)
    shape = xs.shape
    ax = np.abs(xs).ravel()
    val = _base_profile(params, ax)
    if kind == KIND_EXPPOWER:
        return val.reshape(shape)
    chords = _chord_block(params)
    for x_lo, x_hi, slope, intercept in chords:
        m = (ax >= x_lo) & (ax <= x_hi)
        if np.any(m):
            val[m] = np.maximum(val[m], slope * ax[m] + intercept)
    if kind == KIND_PIECEWISE:
        return val.reshape(shape)
    bands = _band_block(params)
    n_gl, nodes, weights, rho_norm, rho_scale = _gl_block(params)
    base_all = _base_profile(params, ax)
    for t_j, eps, lo, hi, cs, ci in bands:
        m = (ax >= lo) & (ax <= hi)
        if not np.any(m):
            continue
        g = base_all[m]
        line = cs * ax[m] + ci
        u = g - line
        smooth = eps * _smooth_abs_unit(u / eps, n_gl, nodes, weights,
                                        rho_norm, rho_scale)
        val[m] = 0.5 * (g + line) + 0.5 * smooth
    return val.reshape(shape)


def eval_profile(params, kind, x):
    return float(eval_profile_batch(params, kind, np.array([x]))[0])


# ---------------------------------------------------------------------------
# inverse


def _base_inverse(params, y):
    """Inverse of the base profile on [0, inf), scalar or array."""
    alpha, c = params[0], params[1]
    psi_xstar, dpsi, a3 = params[3], params[4], params[5]
    xstar = params[2]
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inner = (y > 0.0) & (y <= psi_xstar)
    if np.any(inner):
        with np.errstate(divide="ignore", over="ignore"):
            out[inner] = (c / np.log(1.0 / y[inner])) ** (1.0 / alpha)
    outer = y > psi_xstar
    if np.any(outer):
        yy = y[outer]
        lo = np.full(yy.shape, xstar)
        hi = xstar + np.cbrt(yy / a3) + (yy - psi_xstar) / max(dpsi, 1e-300) + 1.0
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            d = mid - xstar
            v = psi_xstar + dpsi * d + a3 * d ** 3
            high = v > yy
            hi = np.where(high, mid, hi)
            lo = np.where(high, lo, mid)
        out[outer] = 0.5 * (lo + hi)
    return out


def inverse_profile_batch(params, kind, ys):
    ys = np.asarray(ys, dtype=float)
    shape = ys.shape
    yy = ys.ravel()
    if kind == KIND_EXPPOWER:
        return _base_inverse(params, yy).reshape(shape)
    # the constructed profiles dominate the base, so its inverse brackets
    hi = _base_inverse(params, yy)
    lo = np.zeros_like(hi)
    pos = yy > 0.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        v = eval_profile_batch(params, kind, mid)
        high = v > yy
        hi = np.where(high & pos, mid, hi)
        lo = np.where((~high) & pos, mid, lo)
    out = 0.5 * (lo + hi)
    out[~pos] = 0.0
    return out.reshape(shape)


def inverse_profile(params, kind, y):
    return float(inverse_profile_batch(params, kind, np.array([y]))[0])


# ---------------------------------------------------------------------------
# Euclidean boundary distance in the (Re z1, Re z2) plane


def _golden_min(fun, lo, hi, iters=70):
    """Vectorized golden-section minimization; lo/hi arrays."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo.astype(float).copy(), hi.astype(float).copy()
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        left = fc < fd
        a_new = np.where(left, a, c)
        b_new = np.where(left, d, b)
        x_reuse = np.where(left, c, d)
        f_reuse = np.where(left, fc, fd)
        x_fresh = np.where(left, b_new - invphi * (b_new - a_new),
                           a_new + invphi * (b_new - a_new))
        f_fresh = fun(x_fresh)
        a, b = a_new, b_new
        c = np.where(left, x_fresh, x_reuse)
        d = np.where(left, x_reuse, x_fresh)
        fc = np.where(left, f_fresh, f_reuse)
        fd = np.where(left, f_reuse, f_fresh)
    xm = np.where(fc < fd, c, d)
    fm = np.where(fc < fd, fc, fd)
    return xm, fm


def boundary_distance_batch(params, kind, x0s, bs):
    x0s = np.asarray(x0s, dtype=float)
    bs = np.asarray(bs, dtype=float)
    n = x0s.size
    grid = np.linspace(-1.0, 1.0, 257)
    span = 1.05 * bs + 1e-12
    xs = x0s[:, None] + span[:, None] * grid[None, :]

    def g(x):
        return (x - x0s) ** 2 + (eval_profile_batch(params, kind, x) - bs) ** 2

    vals = (xs - x0s[:, None]) ** 2 + \
        (eval_profile_batch(params, kind, xs) - bs[:, None]) ** 2
    idx = np.argmin(vals, axis=1)
    lo = xs[np.arange(n), np.maximum(idx - 1, 0)]
    hi = xs[np.arange(n), np.minimum(idx + 1, 256)]
    xm, fm = _golden_min(g, lo, hi)
    return np.sqrt(fm)


def boundary_distance(params, kind, x0, b):
    """Distance to the profile graph plus the minimizing abscissa.

    Ties (symmetric minima) resolve to the smallest |x|, then positive x.
    """
    grid = np.linspace(x0 - 1.05 * b - 1e-12, x0 + 1.05 * b + 1e-12, 513)
    psi = eval_profile_batch(params, kind, grid)
    vals = (grid - x0) ** 2 + (psi - b) ** 2
    # refine every local basin, then tie-break
    local = np.where((vals <= np.roll(vals, 1)) & (vals <= np.roll(vals, -1)))[0]
    local = local[(local > 0) & (local < grid.size - 1)]
    if local.size == 0:
        local = np.array([int(np.argmin(vals))])
    cands = []
    for i in local[np.argsort(vals[local])][:4]:
        lo = np.array([grid[max(i - 1, 0)]])
        hi = np.array([grid[min(i + 1, grid.size - 1)]])

        def g(x):
            return (x - x0) ** 2 + (eval_profile_batch(params, kind, x) - b) ** 2

        xm, fm = _golden_min(g, lo, hi)
        cands.append((float(fm[0]), float(xm[0])))
    best = min(c[0] for c in cands)
    tied = [x for f, x in cands if f <= best + 1e-14 * (1.0 + best)]
    tied.sort(key=lambda x: (abs(x), -np.sign(x)))
    xhat = tied[0]
    return float(np.sqrt(best)), xhat


# ---------------------------------------------------------------------------
# directional boundary distance


def _xi_grid(anchors, reach, n_half=64):
    """Sign-symmetric logarithmic xi grid with crossing anchors included."""
    scale = max(min(anchors) * 1e-4, 1e-12)
    g = np.geomspace(scale, reach, n_half)
    pts = np.concatenate([-g[::-1], [0.0], g])
    extra = []
    for a in anchors:
        for f in (0.9, 1.0, 1.1):
            if a * f <= reach:
                extra.extend([a * f, -a * f])
    return np.unique(np.concatenate([pts, np.asarray(extra)]))


def directional_distance_scan(params, kind, x0, b, a1, b1, a2, b2, depth_cap):
    """Least |alpha| with z + alpha*v on the boundary, reduced to 1-D in xi.

    Writing xi = Re(alpha v1) and sigma = Re(alpha v2), the boundary
    condition fixes sigma = psi(x0+xi) - b and the smallest admissible
    |alpha| for given (xi, sigma) is an explicit 2x2 solve.  Returns -1.0
    if the point is outside, inf if no hit within 10*depth_cap.
    """
    v1n = np.hypot(a1, b1)
    v2n = np.hypot(a2, b2)
    psi0 = eval_profile(params, kind, x0)
    if b <= psi0:
        return -1.0
    if v1n == 0.0:
        return (b - psi0) / v2n
    if v2n == 0.0:
        xb = inverse_profile(params, kind, b)
        return min(abs(xb - x0), abs(xb + x0)) / v1n
    det = a2 * b1 - a1 * b2
    xb = inverse_profile(params, kind, b)
    anchors = [max(abs(xb - x0), 1e-9), max(abs(xb + x0), 1e-9), max(xb, 1e-9)]
    reach = 10.0 * depth_cap * v1n + max(anchors)
    xi = _xi_grid(anchors, reach)

    if abs(det) <= 1e-14 * v1n * v2n:
        mu = (a1 * a2 + b1 * b2) / (v1n * v1n)
        q = eval_profile_batch(params, kind, x0 + xi) - b - mu * xi
        roots = []
        sgn = np.sign(q)
        hits = np.where(sgn == 0.0)[0]
        roots.extend(xi[hits])
        flips = np.where(sgn[:-1] * sgn[1:] < 0.0)[0]
        for i in flips:
            lo, hi = xi[i], xi[i + 1]
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                qm = eval_profile(params, kind, x0 + mid) - b - mu * mid
                if qm * q[i] > 0.0:
                    lo = mid
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
        if not roots:
            return np.inf
        return min(abs(r) for r in roots) / v1n

    def h(x):
        sig = eval_profile_batch(params, kind, x0 + x) - b
        p = (-b2 * x + b1 * sig) / det
        q = (-a2 * x + a1 * sig) / det
        return p * p + q * q

    vals = h(xi)
    local = np.where((vals <= np.roll(vals, 1)) & (vals <= np.roll(vals, -1)))[0]
    local = local[(local > 0) & (local < xi.size - 1)]
    if local.size == 0:
        local = np.array([int(np.argmin(vals))])
    best = np.inf
    for i in local[np.argsort(vals[local])][:3]:
        lo = np.array([xi[max(i - 1, 0)]])
        hi = np.array([xi[min(i + 1, xi.size - 1)]])
        _, fm = _golden_min(h, lo, hi)
        best = min(best, float(fm[0]))
    return float(np.sqrt(best))


def directional_distance_scan_batch(params, kind, x0s, bs, a1s, b1s, a2s, b2s,
                                    depth_cap):
    """Vectorized scan solver; one row per (point, direction) query."""
    x0s = np.asarray(x0s, dtype=float)
    bs = np.asarray(bs, dtype=float)
    a1s = np.asarray(a1s, dtype=float)
    b1s = np.asarray(b1s, dtype=float)
    a2s = np.asarray(a2s, dtype=float)
    b2s = np.asarray(b2s, dtype=float)
    n = x0s.size
    out = np.empty(n)
    v1n = np.hypot(a1s, b1s)
    v2n = np.hypot(a2s, b2s)
    psi0 = eval_profile_batch(params, kind, x0s)
    det = a2s * b1s - a1s * b2s

    outside = bs <= psi0
    pure2 = (~outside) & (v1n == 0.0)
    pure1 = (~outside) & (v2n == 0.0) & (v1n > 0.0)
    degen = (~outside) & (v1n > 0.0) & (v2n > 0.0) & \
        (np.abs(det) <= 1e-14 * v1n * v2n)
    generic = (~outside) & (v1n > 0.0) & (v2n > 0.0) & ~degen

    out[outside] = -1.0
    if np.any(pure2):
        out[pure2] = (bs[pure2] - psi0[pure2]) / v2n[pure2]
    if np.any(pure1):
        xb = inverse_profile_batch(params, kind, bs[pure1])
        out[pure1] = np.minimum(np.abs(xb - x0s[pure1]),
                                np.abs(xb + x0s[pure1])) / v1n[pure1]
    for mask in (degen, generic):
        idx = np.where(mask)[0]
        for i in idx:
            out[i] = directional_distance_scan(
                params, kind, x0s[i], bs[i], a1s[i], b1s[i], a2s[i], b2s[i],
                depth_cap)
    return out


def directional_distance_phase(params, kind, x0, b, a1, b1, a2, b2,
                               depth_cap, root_tol=1e-10, n_phase=128):
    """Brute-force reference: sweep complex phases of alpha, bisect each ray.

    Along every line t -> z + t e^{i theta} v the defining function is
    concave in t, so each ray crosses the boundary at most once.
    """
    psi0 = eval_profile(params, kind, x0)
    if b <= psi0:
        return -1.0
    reach = 10.0 * depth_cap

    def ray_root(ct1, ct2):
        # g(t) = b + t*ct2 - psi(x0 + t*ct1), g(0) > 0
        hi = max(root_tol, 1e-6)
        g_hi = b + hi * ct2 - eval_profile(params, kind, x0 + hi * ct1)
        while g_hi > 0.0:
            hi *= 2.0
            if hi > reach:
                return np.inf
            g_hi = b + hi * ct2 - eval_profile(params, kind, x0 + hi * ct1)
        lo = 0.0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if b + mid * ct2 - eval_profile(params, kind, x0 + mid * ct1) > 0.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def best_for(theta):
        e = np.exp(1j * theta)
        v1 = (a1 + 1j * b1) * e
        v2 = (a2 + 1j * b2) * e
        r_pos = ray_root(v1.real, v2.real)
        r_neg = ray_root(-v1.real, -v2.real)
        return min(r_pos, r_neg)

    thetas = np.linspace(0.0, np.pi, n_phase, endpoint=False)
    vals = np.array([best_for(t) for t in thetas])
    i = int(np.argmin(vals))
    lo = thetas[i] - np.pi / n_phase
    hi = thetas[i] + np.pi / n_phase
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = best_for(c), best_for(d)
    for _ in range(40):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = best_for(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = best_for(d)
    return float(min(fc, fd, vals[i]))


# ---------------------------------------------------------------------------
# per-segment pseudometric bounds (used for grid edges and curve quadrature)


def segment_kappa_batch(params, kind, x0s, bs, a1s, b1s, a2s, b2s,
                        lower_coeff, depth_cap):
    """Pointwise [lower, upper] on kappa(z; v) for batched (z, v).

    lower = lower_coeff / delta(z; v); upper = min(1/delta(z; v),
    coordinate split).  The pure-(0,v2) case is an exact half-plane slice
    and collapses to a point interval.
    """
    x0s = np.asarray(x0s, dtype=float)
    bs = np.asarray(bs, dtype=float)
    a1s = np.asarray(a1s, dtype=float)
    b1s = np.asarray(b1s, dtype=float)
    a2s = np.asarray(a2s, dtype=float)
    b2s = np.asarray(b2s, dtype=float)
    v1n = np.hypot(a1s, b1s)
    v2n = np.hypot(a2s, b2s)
    psi0 = eval_profile_batch(params, kind, x0s)
    depth = bs - psi0

    d_full = directional_distance_scan_batch(
        params, kind, x0s, bs, a1s, b1s, a2s, b2s, depth_cap)
    lower = np.where(d_full > 0.0, lower_coeff / d_full, np.inf)
    upper = np.where(d_full > 0.0, 1.0 / d_full, np.inf)

    # coordinate split: kappa(z; v) <= kappa(z; (v1,0)) + kappa(z; (0,v2)),
    # with the exact half-plane value on the second slice
    xb = inverse_profile_batch(params, kind, bs)
    d_tan = np.where(v1n > 0.0,
                     np.minimum(np.abs(xb - x0s), np.abs(xb + x0s)) /
                     np.where(v1n > 0.0, v1n, 1.0),
                     np.inf)
    with np.errstate(divide="ignore"):
        split = np.where(v1n > 0.0, 1.0 / d_tan, 0.0) + \
            np.where(v2n > 0.0, v2n / (2.0 * depth), 0.0)
    upper = np.minimum(upper, split)

    vertical = (v1n == 0.0) & (v2n > 0.0)
    exact = v2n / (2.0 * depth)
    lower = np.where(vertical, exact, lower)
    upper = np.where(vertical, exact, upper)
    return lower, upper
