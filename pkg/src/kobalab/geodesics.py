"""Boundary-hugging almost-geodesics: construction and certification.

The tangential curves gamma(t) = (i*span*t, f(t)) solve
f' = f / (c * D_dir(gamma(t))) where D_dir is the directional boundary
distance along a fixed face direction.  Terminal depths obey the scalar
integral equation int_{f0}^{D} PsiInv(y)/y dy = |dir| / c, which has no
solution below the escape cap in the convergent-integral regime.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import metric
from .errors import (BalanceViolation, ConfigError, EscapedDepthCap,
                     KobalabError)
from .geometry import CPoint, CVector

# Escape threshold for the depth variable.  The boundary-hugging analysis
# lives in the shallow regime; above this depth the profile's convex
# extension dominates and the curves are no longer meaningful.
DEFAULT_HEIGHT_CAP = 0.25

STATUS_REACHED = "Reached"
STATUS_ESCAPED = "Escaped"


@dataclass
class SampledCurve:
    """Polyline curve with parameters in [0, 1] and points as (n,4) reals.

    Point rows are (Re z1, Im z1, Re z2, Im z2).
    """

    t: np.ndarray
    points: np.ndarray
    meta: dict

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.t.ndim != 1 or self.points.shape != (self.t.size, 4):
            raise ValueError("curve arrays have inconsistent shapes")
        if self.t.size < 2:
            raise ValueError("a curve needs at least two nodes")
        if not np.all(np.diff(self.t) > 0.0):
            raise ValueError("curve parameters must be strictly increasing")
        if abs(self.t[0]) > 1e-12 or abs(self.t[-1] - 1.0) > 1e-12:
            raise ValueError("curve parameters must run from 0 to 1")

    @property
    def n_nodes(self):
        return self.t.size

    def cpoint(self, i):
        r = self.points[i]
        return CPoint(complex(r[0], r[1]), complex(r[2], r[3]))

    def interior_check(self, oracle):
        heights = self.points[:, 2] - np.asarray(
            oracle.profile.value(self.points[:, 0]))
        return bool(np.all(heights > 0.0))


@dataclass(frozen=True)
class TerminalDepth:
    f0: float
    c: float
    depth: float
    status: str

    @property
    def reached(self):
        return self.status == STATUS_REACHED


@dataclass(frozen=True)
class GeodesicCertificate:
    lambda_target: float
    eps_target: float
    observed_sup_ratio: float
    pair_grid_size: int
    status: str
    witness: tuple


def _depth_integral(profile, f_lo, f_hi):
    """int_{f_lo}^{f_hi} PsiInv(y)/y dy, integrated in s = log y."""
    if f_hi <= f_lo:
        return 0.0

    def g(s):
        return float(profile.inverse(math.exp(s)))

    val, _ = quad(g, math.log(f_lo), math.log(f_hi), limit=200)
    return val


def predicted_terminal_depth(profile, c, f0, dir_scale=1.0,
                             height_cap=DEFAULT_HEIGHT_CAP):
    """Solve the terminal-depth integral equation for the tangential ODE.

    Returns a TerminalDepth whose status is Escaped when the integral up
    to the height cap cannot reach dir_scale/c (the curve would climb past
    the cap before using up its parameter).
    """
    if not (0.0 < f0 < height_cap):
        raise ConfigError("f0 must lie in (0, height_cap)")
    if c <= 0.0 or dir_scale <= 0.0:
        raise ConfigError("c and dir_scale must be positive")
    target = dir_scale / c
    total = _depth_integral(profile, f0, height_cap)
    if total < target:
        return TerminalDepth(f0=f0, c=c, depth=float("nan"),
                             status=STATUS_ESCAPED)

    def shortfall(log_d):
        return _depth_integral(profile, f0, math.exp(log_d)) - target

    lo = math.log(f0)
    hi = math.log(height_cap)
    log_d = brentq(shortfall, lo, hi, xtol=1e-14, rtol=8.9e-16)
    return TerminalDepth(f0=f0, c=c, depth=math.exp(log_d),
                         status=STATUS_REACHED)


def _dir_scale_tangential(tangential_dir):
    v1, v2 = tangential_dir.v1, tangential_dir.v2
    if abs(v2) != 0.0 or v1.real != 0.0 or v1.imag == 0.0:
        return None
    return abs(v1.imag)


def construct_tangential_geodesic(oracle, c, f0, tangential_dir=None,
                                  span=1.0, height_cap=DEFAULT_HEIGHT_CAP,
                                  n_nodes=513, rtol=1e-9):
    """Integrate the tangential almost-geodesic ODE from depth f0.

    Returns a SampledCurve gamma(t) = (i*span*t, f(t)) on t in [0, 1]
    with at least 512 recorded nodes, clustered toward t = 1 where f
    grows fastest.  Raises EscapedDepthCap when f crosses the height cap
    before t = 1 (the convergent-integral regime).
    """
    if tangential_dir is None:
        tangential_dir = CVector(1j, 0j)
    if not (0.0 < f0 < height_cap):
        raise ConfigError("f0 must lie in (0, height_cap)")
    if c <= 0.0 or span <= 0.0:
        raise ConfigError("c and span must be positive")
    if n_nodes < 513:
        n_nodes = 513
    prof = oracle.profile
    s_fast = _dir_scale_tangential(tangential_dir)
    dir_norm = tangential_dir.norm()
    if dir_norm == 0.0:
        raise ConfigError("tangential direction must be nonzero")

    if s_fast is not None and not prof.is_stub:
        def d_dir(t, f):
            return float(prof.inverse(f)) / s_fast
    else:
        def d_dir(t, f):
            z = CPoint(complex(0.0, span * t), complex(f, 0.0))
            return oracle.directional_distance(z, tangential_dir)

    log_cap = math.log(height_cap)

    def rhs(t, y):
        f = math.exp(min(y[0], log_cap))
        return [1.0 / (c * d_dir(t, f))]

    def escape(t, y):
        return y[0] - log_cap
    escape.terminal = True
    escape.direction = 1.0

    u = np.linspace(0.0, 1.0, n_nodes)
    t_eval = 1.0 - (1.0 - u) ** 2
    t_eval[0], t_eval[-1] = 0.0, 1.0
    sol = solve_ivp(rhs, (0.0, 1.0), [math.log(f0)], method="RK45",
                    t_eval=t_eval, rtol=rtol, atol=1e-12, events=escape,
                    dense_output=False, max_step=0.05)
    if sol.t_events[0].size > 0:
        raise EscapedDepthCap(
            "curve reached the height cap %.3g at t = %.6f"
            % (height_cap, float(sol.t_events[0][0])))
    if not sol.success:
        raise KobalabError("ODE solver failed: %s" % sol.message)

    ts = sol.t
    ys = sol.y[0]
    fs = np.exp(ys)
    spline = CubicSpline(ts, ys)
    yd = spline(ts, 1)
    dvals = np.array([d_dir(t, f) for t, f in zip(ts, fs)])
    residual = np.abs(c * dvals * yd - 1.0)
    res_sup = float(residual.max())
    if res_sup > 1e-6:
        raise KobalabError(
            "ODE residual %.3g exceeds 1e-6; solution rejected" % res_sup)

    points = np.zeros((ts.size, 4))
    points[:, 1] = span * ts
    points[:, 2] = fs
    meta = {
        "kind": "tangential",
        "c": c,
        "f0": f0,
        "span": span,
        "dir_scale": dir_norm,
        "height_cap": height_cap,
        "terminal_depth": float(fs[-1]),
        "ode_residual_sup": res_sup,
    }
    return SampledCurve(t=ts, points=points, meta=meta)


def max_boundary_distance(oracle, curve):
    """Largest Euclidean boundary distance over the recorded nodes."""
    x0s = curve.points[:, 0]
    bs = curve.points[:, 2]
    d = oracle.boundary_distance_batch(x0s, bs)
    return float(np.max(d))


def endpoint_face_distance(oracle, curve):
    """Distance from gamma(1) to the boundary face {(i s, 0)}.

    For curves in the model slice this equals the terminal f-value.
    """
    r = curve.points[-1]
    return math.hypot(r[0], math.hypot(r[2], r[3]))


def certify_lambda_geodesic(oracle, curve, lambda_target, eps_target=0.0,
                            pair_grid=48, grid=None):
    """Check the almost-geodesic property over a triangular pair grid.

    Certification compares the certified length upper bound against the
    certified distance lower bound, so a Certified verdict is sound.
    Refutation needs a distance upper bound and is only attempted when a
    slice grid is supplied.
    """
    if pair_grid < 8:
        raise ConfigError("pair_grid must be at least 8")
    seg_lo, seg_up = metric.curve_segment_bounds(oracle, curve)
    pre_lo = np.concatenate([[0.0], np.cumsum(seg_lo)])
    pre_up = np.concatenate([[0.0], np.cumsum(seg_up)])
    idxs = np.unique(np.linspace(0, curve.n_nodes - 1, pair_grid).round()
                     .astype(int))
    deltas = oracle.boundary_distance_batch(curve.points[idxs, 0],
                                            curve.points[idxs, 2])
    logs = np.log(deltas)
    sup_ratio = -math.inf
    witness = (0.0, 0.0)
    for ai in range(idxs.size - 1):
        a = idxs[ai]
        bs = idxs[ai + 1:]
        ups = pre_up[bs] - pre_up[a]
        lows = np.maximum(oracle.lower_coeff * np.abs(logs[ai + 1:] - logs[ai]),
                          1e-12)
        ratios = (ups - eps_target) / lows
        j = int(np.argmax(ratios))
        if ratios[j] > sup_ratio:
            sup_ratio = float(ratios[j])
            witness = (float(curve.t[a]), float(curve.t[bs[j]]))
    if sup_ratio <= lambda_target:
        status = "Certified"
    else:
        status = "Inconclusive"
        if grid is not None:
            pts = [curve.cpoint(i) for i in idxs]
            dmat = metric.kdist_upper_multi(oracle, grid, pts, pts)
            for ai in range(idxs.size - 1):
                for bj in range(ai + 1, idxs.size):
                    lo_len = pre_lo[idxs[bj]] - pre_lo[idxs[ai]]
                    up_d = max(dmat[ai, bj], 1e-12)
                    if (lo_len - eps_target) / up_d > lambda_target:
                        status = "Refuted"
                        witness = (float(curve.t[idxs[ai]]),
                                   float(curve.t[idxs[bj]]))
                        break
                if status == "Refuted":
                    break
    return GeodesicCertificate(lambda_target=lambda_target,
                               eps_target=eps_target,
                               observed_sup_ratio=sup_ratio,
                               pair_grid_size=int(idxs.size),
                               status=status,
                               witness=witness)


# ---------------------------------------------------------------------------
# balanced Gromov parameter


class _GraphEstimator:
    """Midpoint Gromov-product estimates along a curve via one Dijkstra run.

    Uppers for k(., o) come from the slice graph; uppers between curve
    points come from the curve's own certified length; lowers are the
    closed-form log-ratio bounds.
    """

    def __init__(self, oracle, curve, o, grid):
        self.oracle = oracle
        self.curve = curve
        self.o = o
        self.grid = grid
        seg_lo, seg_up = metric.curve_segment_bounds(oracle, curve)
        self.pre_up = np.concatenate([[0.0], np.cumsum(seg_up)])
        self.node_dist = self._dijkstra_from(o)
        self.delta_o = oracle.boundary_distance(o)
        self.deltas = np.asarray(oracle.boundary_distance_batch(
            curve.points[:, 0], curve.points[:, 2]))
        self.psi0 = float(oracle.profile.value(0.0))
        self.up_zo = self._attach_upper(curve.points[0])
        self.up_wo = self._attach_upper(curve.points[-1])

    def _dijkstra_from(self, o):
        from scipy.sparse import coo_matrix
        from scipy.sparse.csgraph import dijkstra as _dij
        g = self.grid
        q_u, q_v = metric._slice_coords(g, o)
        idx, w = metric._attach(g, self.oracle, q_u, q_v)
        n = g.n_nodes
        base = g.matrix.tocoo()
        rr = np.concatenate([base.row, np.full(idx.size, n), idx])
        cc = np.concatenate([base.col, idx, np.full(idx.size, n)])
        dd = np.concatenate([base.data, w, w])
        aug = coo_matrix((dd, (rr, cc)), shape=(n + 1, n + 1)).tocsr()
        dist = _dij(aug, directed=False, indices=[n])[0][:n]
        return dist

    def _attach_upper(self, row):
        """Upper bound on k(x, o): best node distance plus attachment leg.

        The minimum runs over every node, so the bound varies continuously
        with x and the balance function has no jumps.
        """
        g = self.grid
        psi0 = self.psi0
        if g.slice_kind == "halfplane":
            u, v = row[3], row[2]
            iq = 1.0 / (2.0 * (v - psi0))
            du = np.abs(g.us - u)
            dv = np.abs(g.vs - v)
            seg = np.hypot(du, dv)
            w = seg * 0.5 * (iq + 1.0 / (2.0 * (g.vs - psi0)))
        else:
            u, v = row[1], row[2]
            sq = float(self.oracle.profile.inverse(v))
            iq_t = 1.0 / max(sq, 1e-300)
            iq_n = 1.0 / (2.0 * (v - psi0))
            du = np.abs(g.us - u)
            dv = np.abs(g.vs - v)
            w = du * 0.5 * (iq_t + 1.0 / np.maximum(g.scales, 1e-300)) + \
                dv * 0.5 * (iq_n + 1.0 / (2.0 * (g.vs - psi0)))
        return float(np.min(self.node_dist + w))

    def _point_row(self, tau):
        t = self.curve.t
        i = int(np.clip(np.searchsorted(t, tau) - 1, 0, t.size - 2))
        s = (tau - t[i]) / (t[i + 1] - t[i])
        p0, p1 = self.curve.points[i], self.curve.points[i + 1]
        row = (1.0 - s) * p0 + s * p1
        row[2] = math.exp((1.0 - s) * math.log(p0[2]) + s * math.log(p1[2]))
        return i, s, row

    def _partial_upper(self, i, s, row):
        """Length upper from node i to the interpolated point."""
        if s <= 0.0:
            return 0.0
        p0 = self.curve.points[i]
        mid = 0.5 * (p0 + row)
        chord = row - p0
        z = CPoint(complex(mid[0], mid[1]), complex(mid[2], mid[3]))
        v = CVector(complex(chord[0], chord[1]), complex(chord[2], chord[3]))
        if v.norm() == 0.0:
            return 0.0
        return metric.kappa_bounds(self.oracle, z, v).upper

    def products(self, tau):
        """Midpoint estimates of ((z|x)_o, (w|x)_o) at curve parameter tau."""
        i, s, row = self._point_row(tau)
        up_part = self._partial_upper(i, s, row)
        up_zx = self.pre_up[i] + up_part
        up_wx = (self.pre_up[-1] - self.pre_up[i + 1]) + \
            self._tail_upper(i, s, row)
        delta_x = self._delta(row)
        lc = self.oracle.lower_coeff
        lo_zx = max(0.0, lc * abs(math.log(self.deltas[0] / delta_x)))
        lo_wx = max(0.0, lc * abs(math.log(self.deltas[-1] / delta_x)))
        up_xo = self._attach_upper(row)
        lo_xo = max(0.0, lc * abs(math.log(delta_x / self.delta_o)))
        lo_zo = max(0.0, lc * abs(math.log(self.deltas[0] / self.delta_o)))
        lo_wo = max(0.0, lc * abs(math.log(self.deltas[-1] / self.delta_o)))
        up_zo = self.up_zo
        up_wo = self.up_wo

        def mid(lo_ao, up_ao, lo_ax, up_ax):
            lower = max(0.0, 0.5 * (lo_ao + lo_xo - up_ax))
            upper = 0.5 * (up_ao + up_xo - lo_ax)
            return 0.5 * (lower + max(lower, upper))

        gz = mid(lo_zo, up_zo, lo_zx, up_zx)
        gw = mid(lo_wo, up_wo, lo_wx, up_wx)
        return gz, gw

    def _tail_upper(self, i, s, row):
        if s >= 1.0:
            return 0.0
        p1 = self.curve.points[i + 1]
        mid = 0.5 * (row + p1)
        chord = p1 - row
        z = CPoint(complex(mid[0], mid[1]), complex(mid[2], mid[3]))
        v = CVector(complex(chord[0], chord[1]), complex(chord[2], chord[3]))
        if v.norm() == 0.0:
            return 0.0
        return metric.kappa_bounds(self.oracle, z, v).upper

    def _delta(self, row):
        return float(self.oracle.boundary_distance(
            CPoint(complex(row[0], row[1]), complex(row[2], row[3]))))

    def gromov_lower_zx(self, tau):
        """Certified lower bound on (z | gamma(tau))_o."""
        i, s, row = self._point_row(tau)
        up_zx = self.pre_up[i] + self._partial_upper(i, s, row)
        delta_x = self._delta(row)
        lc = self.oracle.lower_coeff
        lo_zo = max(0.0, lc * abs(math.log(self.deltas[0] / self.delta_o)))
        lo_xo = max(0.0, lc * abs(math.log(delta_x / self.delta_o)))
        return max(0.0, 0.5 * (lo_zo + lo_xo - up_zx))


class _ExactEstimator:
    """Gromov products from a caller-supplied exact distance function."""

    def __init__(self, distance_fn, curve_point_fn, z, w, o):
        self.dist = distance_fn
        self.point = curve_point_fn
        self.z, self.w, self.o = z, w, o
        self.k_zo = distance_fn(z, o)
        self.k_wo = distance_fn(w, o)

    def products(self, tau):
        x = self.point(tau)
        if not isinstance(x, CPoint):
            x = CPoint(0j, complex(x))
        k_xo = self.dist(x, self.o)
        gz = 0.5 * (self.k_zo + k_xo - self.dist(self.z, x))
        gw = 0.5 * (self.k_wo + k_xo - self.dist(self.w, x))
        return gz, gw

    def gromov_lower_zx(self, tau):
        # exact products bound themselves
        gz, _ = self.products(tau)
        return gz


def _balance_estimator(oracle, curve, z, w, o, grid, distance_fn,
                       curve_point_fn):
    rz = curve.points[0]
    rw = curve.points[-1]
    za = np.array([z.z1.real, z.z1.imag, z.z2.real, z.z2.imag])
    wa = np.array([w.z1.real, w.z1.imag, w.z2.real, w.z2.imag])
    scale = 1.0 + np.abs(za).max() + np.abs(wa).max()
    if np.abs(rz - za).max() > 1e-6 * scale or \
            np.abs(rw - wa).max() > 1e-6 * scale:
        raise BalanceViolation("z, w must be the curve endpoints")

    if distance_fn is not None:
        if curve_point_fn is None:
            raise ConfigError("exact mode needs a curve_point_fn")
        return _ExactEstimator(distance_fn, curve_point_fn, z, w, o)
    if grid is None:
        raise ConfigError("graph mode needs a slice grid")
    return _GraphEstimator(oracle, curve, o, grid)


def _balance_search(est, curve, curve_point_fn, tol, h_tol):
    def gfun(tau):
        gz, gw = est.products(tau)
        if gw <= 0.0:
            return math.inf if gz > 0.0 else 0.0
        return gz / gw - 1.0

    g0 = gfun(0.0)
    g1 = gfun(1.0)
    if g0 < -tol:
        raise BalanceViolation("h(0) = %.6f fell below 1 - tol" % (1.0 + g0))
    if g1 > tol:
        raise BalanceViolation("h(1) = %.6f exceeded 1 + tol" % (1.0 + g1))
    if abs(g0) <= h_tol:
        return 0.0, curve.cpoint(0)
    if abs(g1) <= h_tol:
        return 1.0, curve.cpoint(-1)

    lo_t, hi_t = 0.0, 1.0
    g_lo = g0
    tau = 0.5
    for _ in range(80):
        tau = 0.5 * (lo_t + hi_t)
        g_mid = gfun(tau)
        if abs(g_mid) <= h_tol:
            break
        if (g_mid > 0.0) == (g_lo > 0.0):
            lo_t, g_lo = tau, g_mid
        else:
            hi_t = tau
        if hi_t - lo_t < 1e-15:
            break
    g_final = gfun(tau)
    if abs(g_final) > h_tol:
        raise BalanceViolation(
            "could not balance h within tolerance (residual %.3g)" % g_final)
    if curve_point_fn is not None:
        zeta = curve_point_fn(tau)
        x = zeta if isinstance(zeta, CPoint) else CPoint(0j, zeta)
    else:
        _, _, row = est._point_row(tau)
        x = CPoint(complex(row[0], row[1]), complex(row[2], row[3]))
    return float(tau), x


def find_balanced_parameter(oracle, curve, z, w, o, grid=None, tol=0.1,
                            distance_fn=None, curve_point_fn=None,
                            h_tol=1e-3):
    """Locate tau with h(tau) = (z|gamma(tau))_o / (w|gamma(tau))_o = 1.

    Endpoint sanity (h(0) >= 1 - tol and h(1) <= 1 + tol) is enforced
    first; violations signal estimate quality too poor to proceed.  The
    returned parameter satisfies |h(tau) - 1| <= h_tol.  Estimates are
    interval midpoints in graph mode or exact values when distance_fn is
    supplied, so this search is diagnostic rather than certified.
    """
    est = _balance_estimator(oracle, curve, z, w, o, grid, distance_fn,
                             curve_point_fn)
    return _balance_search(est, curve, curve_point_fn, tol, h_tol)


def balanced_gromov_lower(oracle, curve, z, w, o, grid=None, tol=0.1,
                          distance_fn=None, curve_point_fn=None, h_tol=1e-3):
    """Balanced parameter plus a certified lower bound on (z | x)_o there.

    Same search as find_balanced_parameter; the returned third value is a
    lower bound on the Gromov product at the balanced point (closed-form
    lowers against the curve's certified length upper in graph mode, the
    exact product in exact mode), suitable for growth diagnostics.
    """
    est = _balance_estimator(oracle, curve, z, w, o, grid, distance_fn,
                             curve_point_fn)
    tau, x = _balance_search(est, curve, curve_point_fn, tol, h_tol)
    return tau, x, float(est.gromov_lower_zx(tau))
