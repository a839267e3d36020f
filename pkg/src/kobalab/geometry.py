"""Domain geometry for model domains {Re z2 > psi(Re z1)} in C^2.

The oracle answers membership, Euclidean boundary distance, directional
(complex-line) boundary distance, boundary frames and face queries.  All
quantities depend on z only through (Re z1, Re z2) plus the full direction
vector, which is what the kernel backend consumes.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _core as K
from ._core.kernels_py import _golden_min
from .errors import (NotOnBoundary, NonSmoothPoint, OutsideDomain, OutOfRange,
                     ZeroDirection)
from .profiles import ProfileFunction

CONVEX = "Convex"
CCONVEX = "CConvex"
_LOWER_COEFF = {CONVEX: 0.5, CCONVEX: 0.25}


@dataclass(frozen=True)
class CPoint:
    z1: complex
    z2: complex

    def shifted(self, v, t=1.0):
        return CPoint(self.z1 + t * v.v1, self.z2 + t * v.v2)

    def as_array(self):
        return np.array([self.z1.real, self.z1.imag, self.z2.real, self.z2.imag])


@dataclass(frozen=True)
class CVector:
    v1: complex
    v2: complex

    def norm(self):
        return math.sqrt(abs(self.v1) ** 2 + abs(self.v2) ** 2)

    def scaled(self, s):
        return CVector(s * self.v1, s * self.v2)

    def parts(self):
        return (self.v1.real, self.v1.imag, self.v2.real, self.v2.imag)


@dataclass(frozen=True)
class FaceSegment:
    point: CPoint
    direction: CVector
    s_neg: float
    s_pos: float
    kind: str  # "imaginary-axis" or "planar-face"

    @property
    def length(self):
        return self.s_pos - self.s_neg


@dataclass
class DomainOracle:
    """Geometry oracle for one model domain."""

    profile: ProfileFunction
    convexity: str = CONVEX
    depth_cap: float = 10.0
    root_tol: float = 1e-10

    def __post_init__(self):
        if self.convexity not in _LOWER_COEFF:
            raise ValueError(f"unknown convexity class: {self.convexity}")

    @property
    def lower_coeff(self):
        return _LOWER_COEFF[self.convexity]

    # -- membership -------------------------------------------------------

    def height(self, z):
        """Re z2 - psi(Re z1); positive inside, zero on the boundary."""
        return z.z2.real - float(self.profile.value(z.z1.real))

    def contains(self, z):
        return self.height(z) > 0.0

    def on_boundary(self, z, tol=None):
        tol = self.root_tol if tol is None else tol
        return abs(self.height(z)) <= tol * max(1.0, abs(z.z2.real))

    # -- Euclidean boundary distance --------------------------------------

    def boundary_distance(self, z):
        h = self.height(z)
        if h <= 0.0:
            raise OutsideDomain("point is not inside the domain")
        if self.profile.is_stub:
            return self._stub_boundary(z.z1.real, z.z2.real)[0]
        d, _ = K.boundary_distance(self.profile.params, self.profile.kind_id,
                                   z.z1.real, z.z2.real)
        return d

    def boundary_distance_batch(self, x0s, bs):
        if self.profile.is_stub:
            return np.array([self._stub_boundary(x, b)[0]
                             for x, b in zip(x0s, bs)])
        return K.boundary_distance_batch(self.profile.params,
                                         self.profile.kind_id, x0s, bs)

    def boundary_project(self, z):
        """Nearest boundary point; ties resolve to smallest |x|, then x > 0."""
        h = self.height(z)
        if h <= 0.0:
            raise OutsideDomain("point is not inside the domain")
        if self.profile.is_stub:
            _, xhat = self._stub_boundary(z.z1.real, z.z2.real)
        else:
            _, xhat = K.boundary_distance(self.profile.params,
                                          self.profile.kind_id,
                                          z.z1.real, z.z2.real)
        return CPoint(complex(xhat, z.z1.imag),
                      complex(float(self.profile.value(xhat)), z.z2.imag))

    def _stub_boundary(self, x0, b):
        grid = np.linspace(x0 - 1.05 * b - 1e-12, x0 + 1.05 * b + 1e-12, 513)
        psi = self.profile.value(grid)
        vals = (grid - x0) ** 2 + (psi - b) ** 2
        order = np.argsort(vals)
        cands = []
        for i in order[:6]:
            lo = np.array([grid[max(i - 1, 0)]])
            hi = np.array([grid[min(i + 1, grid.size - 1)]])

            def g(x):
                return (x - x0) ** 2 + (self.profile.value(x) - b) ** 2

            xm, fm = _golden_min(g, lo, hi)
            cands.append((float(fm[0]), float(xm[0])))
        best = min(f for f, _ in cands)
        tied = [x for f, x in cands if f <= best + 1e-14 * (1.0 + best)]
        tied.sort(key=lambda x: (abs(x), -np.sign(x)))
        return math.sqrt(best), tied[0]

    # -- directional distance ---------------------------------------------

    def directional_distance(self, z, v, method="scan"):
        """inf |alpha| with z + alpha v on the boundary (math.inf if none)."""
        if v.norm() == 0.0:
            raise ZeroDirection("direction must be nonzero")
        a1, b1, a2, b2 = v.parts()
        if self.profile.is_stub:
            d = self._stub_scan(z.z1.real, z.z2.real, a1, b1, a2, b2)
        elif method == "phase":
            d = K.directional_distance_phase(
                self.profile.params, self.profile.kind_id,
                z.z1.real, z.z2.real, a1, b1, a2, b2,
                self.depth_cap, self.root_tol)
        else:
            d = K.directional_distance_scan(
                self.profile.params, self.profile.kind_id,
                z.z1.real, z.z2.real, a1, b1, a2, b2, self.depth_cap)
        if d < 0.0:
            raise OutsideDomain("point is not inside the domain")
        return float(d)

    def directional_distance_batch(self, x0s, bs, a1s, b1s, a2s, b2s):
        if self.profile.is_stub:
            return np.array([
                self._stub_scan(x, b, a1, b1, a2, b2)
                for x, b, a1, b1, a2, b2 in zip(x0s, bs, a1s, b1s, a2s, b2s)])
        return K.directional_distance_scan_batch(
            self.profile.params, self.profile.kind_id,
            x0s, bs, a1s, b1s, a2s, b2s, self.depth_cap)

    def _stub_scan(self, x0, b, a1, b1, a2, b2):
        """Scan solver against the raw python profile (test domains)."""
        psi = self.profile.value
        v1n = math.hypot(a1, b1)
        v2n = math.hypot(a2, b2)
        if b <= psi(x0):
            return -1.0
        if v1n == 0.0:
            return (b - psi(x0)) / v2n
        try:
            xb = float(self.profile.inverse(b))
        except OutOfRange:
            xb = None
        if v2n == 0.0:
            if xb is None:
                return math.inf
            return min(abs(xb - x0), abs(xb + x0)) / v1n
        det = a2 * b1 - a1 * b2
        anchors = [1.0, max(b, 1e-6)]
        if xb is not None:
            anchors += [max(abs(xb - x0), 1e-9), max(abs(xb + x0), 1e-9)]
        reach = 10.0 * self.depth_cap * v1n + max(anchors)
        g = np.geomspace(max(min(anchors) * 1e-4, 1e-12), reach, 96)
        xi = np.concatenate([-g[::-1], [0.0], g])
        sig = np.array([psi(x0 + t) for t in xi]) - b
        if abs(det) <= 1e-14 * v1n * v2n:
            mu = (a1 * a2 + b1 * b2) / (v1n * v1n)
            q = sig - mu * xi
            roots = list(xi[q == 0.0])
            flips = np.where(q[:-1] * q[1:] < 0.0)[0]
            for i in flips:
                lo, hi = xi[i], xi[i + 1]
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    if (psi(x0 + mid) - b - mu * mid) * q[i] > 0.0:
                        lo = mid
                    else:
                        hi = mid
                roots.append(0.5 * (lo + hi))
            if not roots:
                return math.inf
            return min(abs(r) for r in roots) / v1n

        def h(x):
            s = np.array([psi(x0 + t) for t in np.atleast_1d(x)]) - b
            p = (-b2 * np.atleast_1d(x) + b1 * s) / det
            q = (-a2 * np.atleast_1d(x) + a1 * s) / det
            return p * p + q * q

        vals = h(xi)
        i = int(np.argmin(vals))
        lo = np.array([xi[max(i - 1, 0)]])
        hi = np.array([xi[min(i + 1, xi.size - 1)]])
        _, fm = _golden_min(h, lo, hi)
        return float(math.sqrt(min(fm[0], vals[i])))

    # -- frames and faces --------------------------------------------------

    def _slopes(self, x0):
        h = 1e-7 * max(1.0, abs(x0))
        p = self.profile.value
        d_plus = (float(p(x0 + h)) - float(p(x0))) / h
        d_minus = (float(p(x0)) - float(p(x0 - h))) / h
        return d_plus, d_minus

    def normal_tangent_frame(self, p):
        """Inner unit normal and graph-tangent direction at a boundary point.

        Raises NonSmoothPoint at chord endpoints of a piecewise profile
        (detected structurally) or when the one-sided slopes disagree.
        """
        if not self.on_boundary(p, tol=1e-8):
            raise NotOnBoundary("frame requested away from the boundary")
        x0 = p.z1.real
        for xk in self.profile.kink_abscissas():
            if abs(abs(x0) - xk) <= 1e-12 * max(1.0, xk):
                raise NonSmoothPoint(f"profile kink at |x| = {xk}")
        d_plus, d_minus = self._slopes(x0)
        if abs(d_plus - d_minus) > 1e-6 * (1.0 + abs(d_plus) + abs(d_minus)):
            raise NonSmoothPoint("one-sided slopes disagree")
        m = 0.5 * (d_plus + d_minus)
        w = math.sqrt(1.0 + m * m)
        eta = CVector(complex(-m / w), complex(1.0 / w))
        tangent = CVector(complex(1.0 / w), complex(m / w))
        return eta, tangent

    def face_segment(self, p, samples=33):
        """Maximal affine boundary segment through p, or None.

        Two kinds exist on these domains: the imaginary axis segment at
        height zero (profile vanishes there), and planar chord faces of a
        piecewise or mollified profile.  Membership is verified by sampling
        along the candidate segment.
        """
        if not self.on_boundary(p, tol=1e-8):
            raise NotOnBoundary("face query away from the boundary")
        x0 = p.z1.real
        psi0 = float(self.profile.value(x0))
        if psi0 == 0.0 and abs(p.z2.real) <= self.root_tol:
            return FaceSegment(point=p, direction=CVector(1j, 0j),
                               s_neg=-self.depth_cap, s_pos=self.depth_cap,
                               kind="imaginary-axis")
        slope = self._face_slope(x0)
        if slope is None:
            return None
        w = math.sqrt(1.0 + slope * slope)
        d = CVector(complex(1.0 / w), complex(slope / w))

        def segment_ok(s):
            xs = x0 + np.linspace(min(s, 0.0), max(s, 0.0), samples) * d.v1.real
            ys = psi0 + (xs - x0) * slope
            resid = np.abs(np.asarray(self.profile.value(xs)) - ys)
            return np.all(resid <= 1e-11 * np.maximum(1e-6, np.abs(ys)))

        floor = 64 * 1e-7 * max(1.0, abs(x0))
        if not (segment_ok(floor) or segment_ok(-floor)):
            return None
        s_pos = self._grow(segment_ok, floor) if segment_ok(floor) else 0.0
        s_neg = -self._grow(lambda s: segment_ok(-s), floor) \
            if segment_ok(-floor) else 0.0
        if max(s_pos, -s_neg) <= floor:
            return None
        return FaceSegment(point=p, direction=d, s_neg=s_neg, s_pos=s_pos,
                           kind="planar-face")

    def _face_slope(self, x0):
        """Chord slope when x0 sits on a stored face, else FD slope."""
        ax = abs(x0)
        sign = 1.0 if x0 >= 0 else -1.0
        for ch in self.profile.chords:
            if ch.x_lo < ax < ch.x_hi:
                return sign * ch.slope
        d_plus, d_minus = self._slopes(x0)
        if abs(d_plus - d_minus) > 1e-6 * (1.0 + abs(d_plus) + abs(d_minus)):
            return None
        return 0.5 * (d_plus + d_minus)

    def _grow(self, ok, floor):
        if not ok(floor):
            return 0.0
        hi = floor
        while ok(2.0 * hi) and hi < self.depth_cap:
            hi *= 2.0
        lo = hi
        hi = min(2.0 * hi, self.depth_cap)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if ok(mid):
                lo = mid
            else:
                hi = mid
        return lo
