"""Boundary-point classification via improper-integral criteria.

Three gauges of boundary contact at a point p, ordered pointwise:
the normal-ray tangential gauge M(r), the normal-ray sup gauge over
directions and sub-radii (the "weakly" gauge), and the neighborhood
sup gauge N(r) over shell points near p.  Each feeds the dyadic
integral decision procedure for int_0 gauge(r)/r dr.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, NonFiniteIntegrand, NotOnBoundary
from .geometry import CPoint, CVector

STATUS_CONVERGENT = "Convergent"
STATUS_DIVERGENT = "Divergent"
STATUS_INCONCLUSIVE = "Inconclusive"

_LN2 = math.log(2.0)


@dataclass
class IntegralVerdict:
    status: str
    value: float
    growth_rate: float
    p_estimate: float
    partial_sums: np.ndarray
    eps: float
    levels: int

    @property
    def convergent(self):
        return self.status == STATUS_CONVERGENT

    @property
    def divergent(self):
        return self.status == STATUS_DIVERGENT


def _level_integrals(fn, eps, levels, quad_points):
    """Dyadic-level integrals I_k over [eps 2^{-k-1}, eps 2^{-k}]."""
    out = np.empty(levels)
    if quad_points is not None:
        gl_x, gl_w = np.polynomial.legendre.leggauss(int(quad_points))
    for k in range(levels):
        a = eps * 2.0 ** (-(k + 1))
        b = eps * 2.0 ** (-k)
        if quad_points is None:
            val, _ = quad(fn, a, b, limit=100)
        else:
            # Gauss-Legendre in log r: int fn dr = int fn(r) r dlog r
            la, lb = math.log(a), math.log(b)
            mid, half = 0.5 * (la + lb), 0.5 * (lb - la)
            rs = np.exp(mid + half * gl_x)
            vals = np.array([fn(float(r)) for r in rs], dtype=float)
            val = float(np.sum(gl_w * vals * rs) * half)
        if not math.isfinite(val) or val < -1e-12:
            raise NonFiniteIntegrand(
                "level %d integral is %r" % (k, val))
        out[k] = max(val, 0.0)
    return out


def improper_integral_verdict(fn, eps, levels=61, quad_points=None):
    """Three-valued verdict on int_0^eps fn(r) dr for nonnegative fn.

    Divergence cannot be decided by finite computation; the verdict uses
    dyadic-increment heuristics (geometric-ratio and log-power fits over
    the deepest levels) and reports Inconclusive when neither a summable
    decay nor a persistent floor is recognized.  Convergent verdicts
    carry the partial sum plus a fitted tail.
    """
    if eps <= 0.0:
        raise ConfigError("eps must be positive")
    if levels < 25:
        raise ConfigError("need at least 25 dyadic levels")
    ik = _level_integrals(fn, eps, levels, quad_points)
    partials = np.cumsum(ik)
    total = float(partials[-1])
    # log-power fit ln I_k ~ ln A - p ln L_k with L_k = ln(1/eps) + k ln 2.
    # The fit spans every level past a short burn-in: a wide window reads
    # the macroscopic decay even when the integrand moves in plateaus
    # (chord-built profiles), where a fixed-width deep window could sit
    # entirely inside one flat plateau.
    tail_n = 20
    burn = min(10, levels // 3)
    ks = np.arange(burn, levels)
    lks = math.log(1.0 / eps) + ks * _LN2
    fit_ik = ik[burn:]
    tail_ik = ik[levels - tail_n:]
    if np.all(fit_ik > 0.0):
        coef = np.polyfit(np.log(lks), np.log(fit_ik), 1)
        p_est = -float(coef[0])
        log_a = float(coef[1])
    else:
        p_est = math.inf
        log_a = -math.inf

    if total > 1e3:
        return IntegralVerdict(STATUS_DIVERGENT, math.nan, p_est, p_est,
                               partials, eps, levels)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = ik[1:] / ik[:-1]
    last_ratios = ratios[-10:]
    geometric = np.all(np.isfinite(last_ratios)) and \
        float(np.max(last_ratios)) <= 0.9
    if np.all(ik[-10:] == 0.0):
        geometric = True
        rho = 0.0
    elif geometric:
        rho = float(np.median(last_ratios))
    if geometric:
        tail = ik[-1] * rho / (1.0 - rho) if rho > 0.0 else 0.0
        return IntegralVerdict(STATUS_CONVERGENT, total + tail, math.nan,
                               p_est, partials, eps, levels)
    if p_est >= 1.3 and math.isfinite(log_a):
        l_end = math.log(1.0 / eps) + levels * _LN2
        tail = math.exp(log_a) / _LN2 * l_end ** (1.0 - p_est) / (p_est - 1.0)
        return IntegralVerdict(STATUS_CONVERGENT, total + tail, math.nan,
                               p_est, partials, eps, levels)
    if p_est <= 1.05 and float(np.min(tail_ik)) > 0.0:
        return IntegralVerdict(STATUS_DIVERGENT, math.nan, p_est, p_est,
                               partials, eps, levels)
    return IntegralVerdict(STATUS_INCONCLUSIVE, math.nan, math.nan, p_est,
                           partials, eps, levels)


# ---------------------------------------------------------------------------
# gauges


def _frame_at(oracle, p, eta=None, X=None):
    if eta is not None and X is not None:
        return eta, X
    f_eta, f_tan = oracle.normal_tangent_frame(p)
    return (eta or f_eta), (X or f_tan)


def tangential_gauge(oracle, p, r, eta=None, X=None):
    """M(r): directional boundary distance at p + r*eta along X.

    The frame is computed at p unless supplied explicitly (useful at
    non-smooth points where the frame query would raise).
    """
    if not oracle.on_boundary(p):
        raise NotOnBoundary("gauge base point must lie on the boundary")
    eta, X = _frame_at(oracle, p, eta, X)
    z = CPoint(p.z1 + r * eta.v1, p.z2 + r * eta.v2)
    return oracle.directional_distance(z, X)


def gauge_shape_check(oracle, p, radii, eta=None, X=None):
    """Midpoint-concavity and monotonicity report for M along given radii.

    Checks M((r1+r2)/2) >= (M(r1)+M(r2))/2 - 1e-9 over all pairs and
    monotonicity below the largest sampled gauge value.  Violations are
    returned, not raised; convex model domains should produce none.
    """
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ConfigError("radii must be strictly increasing")
    eta, X = _frame_at(oracle, p, eta, X)
    vals = [tangential_gauge(oracle, p, r, eta=eta, X=X) for r in radii]
    violations = []
    n = len(radii)
    for i in range(n):
        for j in range(i + 1, n):
            mid_r = 0.5 * (radii[i] + radii[j])
            mid_v = tangential_gauge(oracle, p, mid_r, eta=eta, X=X)
            if mid_v < 0.5 * (vals[i] + vals[j]) - 1e-9:
                violations.append(("midpoint", radii[i], radii[j],
                                   mid_v - 0.5 * (vals[i] + vals[j])))
    i_max = int(np.argmax(vals))
    for i in range(i_max):
        if vals[i] > vals[i + 1] + 1e-9:
            violations.append(("monotone", radii[i], radii[i + 1],
                               vals[i + 1] - vals[i]))
    return {"radii": radii, "values": vals, "violations": violations,
            "max_at": radii[i_max]}


@dataclass
class GaugeSampling:
    """Sampling resolution for the sup gauges (recorded in reports)."""
    n_polar: int = 8
    n_phase: int = 8
    n_subradii: int = 8
    n_shell: int = 16
    neighborhood: float = 0.1
    quad_points: int = 6


def _direction_components(sampling):
    """Deterministic direction set containing (1,0) and (0,1) exactly."""
    thetas = np.linspace(0.0, 0.5 * math.pi, sampling.n_polar)
    phases = np.linspace(0.0, math.pi, sampling.n_phase, endpoint=False)
    a1, b1, a2, b2 = [], [], [], []
    for th in thetas:
        ct, st = math.cos(th), math.sin(th)
        if abs(ct) < 1e-15:
            ct = 0.0
        if abs(st) < 1e-15:
            st = 0.0
        for ph in phases:
            a1.append(ct * math.cos(ph))
            b1.append(ct * math.sin(ph))
            a2.append(st)
            b2.append(0.0)
            if ct == 0.0 or st == 0.0:
                break
    return (np.array(a1), np.array(b1), np.array(a2), np.array(b2))


def _face_directions(profile, center, within):
    """Unit face directions (1, slope)/norm for chords near the center."""
    dirs = []
    for ch in getattr(profile, "chords", []) or []:
        if center == 0.0:
            if ch.x_hi <= within:
                w = math.hypot(1.0, ch.slope)
                dirs.append((1.0 / w, 0.0, ch.slope / w, 0.0))
            continue
        xm = 0.5 * (ch.x_lo + ch.x_hi)
        for sgn in (1.0, -1.0):
            if abs(sgn * xm - center) <= within:
                w = math.hypot(1.0, ch.slope)
                dirs.append((1.0 / w, 0.0, sgn * ch.slope / w, 0.0))
    return dirs


def _shell_abscissas(profile, center, within, n_shell):
    """Shell sample abscissas: log-spaced offsets plus face midpoints.

    At the origin the mirror side is redundant by evenness, so only
    positive abscissas are sampled; elsewhere both sides of the center
    are covered and mirrored chords are considered.
    """
    offs = np.geomspace(within * 1e-3, within * 0.9, max(n_shell // 2, 2))
    if center == 0.0:
        xs = list(offs)
        for ch in getattr(profile, "chords", []) or []:
            if ch.x_hi <= within:
                xs.append(0.5 * (1.25 * ch.x_lo + 0.75 * ch.x_hi))
    else:
        xs = list(center + offs) + list(center - offs)
        for ch in getattr(profile, "chords", []) or []:
            xm = 0.5 * (1.25 * ch.x_lo + 0.75 * ch.x_hi)
            for sxm in (xm, -xm):
                if abs(sxm - center) <= within:
                    xs.append(sxm)
    return np.array(sorted(set(xs)))


@dataclass
class ClassificationReport:
    point: CPoint
    local_goldilocks: IntegralVerdict
    weakly_goldilocks: IntegralVerdict
    strongly_non_goldilocks: IntegralVerdict
    summary: str
    sampling: GaugeSampling
    distance_growth_condition: str = field(
        default="holds automatically on convex domains; recorded as pass")

    @property
    def is_weakly_goldilocks(self):
        return self.weakly_goldilocks.convergent

    @property
    def is_strongly_non_goldilocks(self):
        return self.strongly_non_goldilocks.divergent

    @property
    def is_non_goldilocks(self):
        return self.local_goldilocks.divergent


def _sup_gauge_factory(oracle, p, eta, sampling, include_shell):
    """Build r -> sup of directional distances over the sample family."""
    base_dirs = _direction_components(sampling)
    prof = oracle.profile
    within = sampling.neighborhood
    center = p.z1.real
    face_dirs = _face_directions(prof, center, within) if include_shell \
        else []
    if include_shell:
        shell_x = _shell_abscissas(prof, center, within, sampling.n_shell)
        shell_psi = np.asarray(prof.value(shell_x), dtype=float)
    subr = 2.0 ** (-np.arange(sampling.n_subradii))
    px, py = p.z1.real + 0j, p.z2  # p in the model slice has real data
    ex, ey = eta.v1, eta.v2

    # representability floor: an offset r below ~1e3 ulp of the largest
    # base ordinate is absorbed in the addition psi + r, so gauge samples
    # there silently collapse onto the boundary; integrals must stop above
    psi_ref = abs(py.real)
    if include_shell and shell_psi.size:
        psi_ref = max(psi_ref, float(np.max(shell_psi)))
    r_floor = 1e3 * np.finfo(float).eps * psi_ref

    a1d, b1d, a2d, b2d = base_dirs
    if face_dirs:
        fa1, fb1, fa2, fb2 = (np.array(t) for t in zip(*face_dirs))
        a1f = np.concatenate([a1d, fa1])
        b1f = np.concatenate([b1d, fb1])
        a2f = np.concatenate([a2d, fa2])
        b2f = np.concatenate([b2d, fb2])
    else:
        a1f, b1f, a2f, b2f = a1d, b1d, a2d, b2d

    def sup_at(r):
        # normal-ray points at dyadic sub-radii, every direction
        x0s, bs = [], []
        for rp in r * subr:
            zx = px + rp * ex
            zy = py + rp * ey
            x0s.append(np.full(a1d.size, zx.real))
            bs.append(np.full(a1d.size, zy.real))
        na1 = np.tile(a1d, sampling.n_subradii)
        nb1 = np.tile(b1d, sampling.n_subradii)
        na2 = np.tile(a2d, sampling.n_subradii)
        nb2 = np.tile(b2d, sampling.n_subradii)
        x0s = np.concatenate(x0s)
        bs = np.concatenate(bs)
        if include_shell:
            m = a1f.size
            sx = np.repeat(shell_x, m)
            sb = np.repeat(shell_psi + r, m)
            x0s = np.concatenate([x0s, sx])
            bs = np.concatenate([bs, sb])
            na1 = np.concatenate([na1, np.tile(a1f, shell_x.size)])
            nb1 = np.concatenate([nb1, np.tile(b1f, shell_x.size)])
            na2 = np.concatenate([na2, np.tile(a2f, shell_x.size)])
            nb2 = np.concatenate([nb2, np.tile(b2f, shell_x.size)])
        ds = oracle.directional_distance_batch(x0s, bs, na1, nb1, na2, nb2)
        ds = np.asarray(ds)
        good = np.isfinite(ds) & (ds > 0.0)
        if not np.any(good):
            return 0.0
        return float(np.max(ds[good]))

    return sup_at, r_floor


def classify_point(oracle, p, eps=1e-2, sampling=None):
    """Run the three integral criteria at a boundary point.

    Verdict implications (never upgraded past Inconclusive): a Divergent
    M-integral marks the point strongly non-Goldilocks; a Convergent
    sup-gauge integral marks it weakly Goldilocks; a Divergent
    neighborhood integral rules out the local Goldilocks property.
    """
    if sampling is None:
        sampling = GaugeSampling()
    if not oracle.on_boundary(p):
        raise NotOnBoundary("classification point must lie on the boundary")
    eta, X = oracle.normal_tangent_frame(p)

    def m_fn(r):
        z = CPoint(p.z1 + r * eta.v1, p.z2 + r * eta.v2)
        return oracle.directional_distance(z, X) / r

    weak_sup, weak_floor = _sup_gauge_factory(oracle, p, eta, sampling,
                                              include_shell=False)
    local_sup, local_floor = _sup_gauge_factory(oracle, p, eta, sampling,
                                                include_shell=True)

    def levels_above(r_floor, default=61):
        if r_floor <= 0.0:
            return default
        k = math.floor(math.log2(eps / r_floor))
        return int(min(default, max(25, k)))

    # the shell family is a superset of the normal-ray family, so the
    # gauge ordering M <= weakly <= local holds by construction
    strongly = improper_integral_verdict(m_fn, eps,
                                         levels=levels_above(weak_floor))
    weakly = improper_integral_verdict(
        lambda r: weak_sup(r) / r, eps, levels=levels_above(weak_floor),
        quad_points=sampling.quad_points)
    local = improper_integral_verdict(
        lambda r: local_sup(r) / r, eps, levels=levels_above(local_floor),
        quad_points=sampling.quad_points)

    parts = []
    if strongly.divergent:
        parts.append("strongly non-Goldilocks")
    if weakly.convergent:
        parts.append("weakly Goldilocks")
    if local.divergent:
        parts.append("not a local Goldilocks point")
    if not parts:
        parts.append("inconclusive")
    return ClassificationReport(point=p,
                                local_goldilocks=local,
                                weakly_goldilocks=weakly,
                                strongly_non_goldilocks=strongly,
                                summary="; ".join(parts),
                                sampling=sampling)


def face_witness(oracle, p_face, X_face=None, r=1e-8):
    """Directional distance along the face at height r above a face point.

    A value bounded away from zero as r shrinks witnesses the failure of
    the neighborhood Goldilocks integral: the gauge has a positive floor.
    """
    if X_face is None:
        seg = oracle.face_segment(p_face)
        if seg is None:
            raise ConfigError("point does not lie on an affine face")
        X_face = seg.direction
    eta, _ = oracle.normal_tangent_frame(p_face)
    z = CPoint(p_face.z1 + r * eta.v1, p_face.z2 + r * eta.v2)
    return oracle.directional_distance(z, X_face)
