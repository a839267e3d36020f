"""Boundary profiles for the model domains.

A profile is an even convex function psi >= 0 with psi(0) = 0 whose graph
Re z2 = psi(Re z1) bounds the domain.  Three concrete families are built
here:

* ``exp_power(alpha, c)``: psi(x) = exp(-c/|x|^alpha) near 0, continued by
  a C^2 cubic beyond the inflection abscissa so the profile is globally
  convex and increasing.
* ``build_piecewise_max``: the chord construction.  Over every dyadic
  interval [t_{n+1}, t_n] with even n (t_j = 2^-j) the profile is replaced
  by the chord of the base, producing affine faces separated by strictly
  convex stretches, with kinks at the chord endpoints.
* ``mollify``: smooths each kink by replacing max(psi, chord) with a
  smooth-max built from a compactly supported mollifier on a band
  [3 t_j/4, 5 t_j/4] around each node.  The result is convex, even,
  dominates the piecewise profile and agrees with it off the bands.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _core as K
from .errors import OutOfRange

_UNDERFLOW_FLOOR = 1e-290


@dataclass(frozen=True)
class Chord:
    n: int
    x_lo: float
    x_hi: float
    slope: float
    intercept: float

    def value(self, x):
        return self.slope * np.abs(x) + self.intercept

    @property
    def midpoint(self):
        return 0.5 * (self.x_lo + self.x_hi)


@dataclass(frozen=True)
class Band:
    j: int
    t: float
    eps: float
    lo: float
    hi: float
    chord_n: int


class Mollifier:
    """Even bump supported strictly inside (-1, 1), unit mass.

    rho(u) = (norm/s) * exp(-1/(1 - (u/s)^2)) on |u| < s with s < 1, so
    rho vanishes identically for |u| >= s.  Derivative sup-norms are
    estimated numerically on a dense grid and cached.
    """

    def __init__(self, support=0.9, n_gl=64):
        self.support = float(support)
        self.n_gl = int(n_gl)
        nodes, weights = np.polynomial.legendre.leggauss(self.n_gl)
        self.gl_nodes = nodes
        self.gl_weights = weights
        raw = np.sum(weights * np.exp(-1.0 / (1.0 - np.clip(nodes, -1 + 1e-15, 1 - 1e-15) ** 2)))
        self.norm = 1.0 / raw
        self._deriv_sups = {}

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        w = u / self.support
        m = np.abs(w) < 1.0
        if np.any(m):
            out[m] = (self.norm / self.support) * np.exp(-1.0 / (1.0 - w[m] ** 2))
        return out

    def mass(self):
        """Integral of rho over its support (should be 1)."""
        half = self.support
        s = half * self.gl_nodes
        return float(half * np.sum(self.gl_weights * self(s)))

    def derivative_sup(self, n):
        """sup |rho^(n)| over the support, by repeated differencing."""
        if n in self._deriv_sups:
            return self._deriv_sups[n]
        xs = np.linspace(-1.0, 1.0, 40001)
        v = self(xs)
        for _ in range(n):
            v = np.gradient(v, xs)
        val = float(np.max(np.abs(v)))
        self._deriv_sups[n] = val
        return val


@dataclass
class ProfileFunction:
    """A boundary profile with enough metadata to drive the kernels."""

    label: str
    kind_id: int  # 0 = python callable, else a kernel kind
    params: Optional[np.ndarray]
    alpha: float = 0.0
    c: float = 0.0
    chords: list = field(default_factory=list)
    bands: list = field(default_factory=list)
    mollifier: Optional[Mollifier] = None
    fn: Optional[Callable[[float], float]] = None

    @property
    def is_stub(self):
        return self.kind_id == 0

    def value(self, x):
        if self.is_stub:
            x = np.asarray(x, dtype=float)
            if x.ndim == 0:
                return float(self.fn(float(x)))
            return np.array([self.fn(float(t)) for t in x.ravel()]).reshape(x.shape)
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return K.eval_profile(self.params, self.kind_id, float(x))
        return K.eval_profile_batch(self.params, self.kind_id, x)

    __call__ = value

    def inverse(self, y):
        """Least x >= 0 with psi(x) = y; residual <= 1e-12 * max(y, tiny)."""
        if np.any(np.asarray(y) < 0.0):
            raise OutOfRange("profile inverse needs y >= 0")
        if self.is_stub:
            return self._stub_inverse(y)
        y = np.asarray(y, dtype=float)
        if y.ndim == 0:
            return K.inverse_profile(self.params, self.kind_id, float(y))
        return K.inverse_profile_batch(self.params, self.kind_id, y)

    def _stub_inverse(self, y):
        def solve(val):
            if val == 0.0:
                return 0.0
            hi = 1.0
            for _ in range(200):
                if self.fn(hi) >= val:
                    break
                hi *= 2.0
            else:
                raise OutOfRange("profile never reaches requested level")
            lo = 0.0
            for _ in range(90):
                mid = 0.5 * (lo + hi)
                if self.fn(mid) < val:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)

        y = np.asarray(y, dtype=float)
        if y.ndim == 0:
            return solve(float(y))
        return np.array([solve(float(t)) for t in y.ravel()]).reshape(y.shape)

    def kink_abscissas(self):
        """Abscissas (positive side) where the profile is not differentiable."""
        if self.kind_id != K.KIND_PIECEWISE:
            return np.array([])
        pts = set()
        for ch in self.chords:
            pts.add(ch.x_lo)
            pts.add(ch.x_hi)
        return np.array(sorted(pts))

    def face_core(self, n):
        """Interval of face n guaranteed affine (mollified: between bands)."""
        ch = next((c for c in self.chords if c.n == n), None)
        if ch is None:
            raise OutOfRange(f"no face with index {n}")
        if self.kind_id == K.KIND_PIECEWISE:
            return ch.x_lo, ch.x_hi
        return 1.25 * ch.x_lo, 0.75 * ch.x_hi


def exp_power(alpha, c, label=None):
    """Flat-at-zero profile exp(-c/|x|^alpha) with a C^2 convex extension.

    The bare function is convex only for |x| <= x* = (c*alpha/(alpha+1))^(1/alpha);
    beyond x* it is continued by psi(x*) + psi'(x*)(|x|-x*) + (|x|-x*)^3,
    which matches value, slope and (zero) curvature at the junction.
    """
    if alpha <= 0 or c <= 0:
        raise ValueError("alpha and c must be positive")
    xstar = (c * alpha / (alpha + 1.0)) ** (1.0 / alpha)
    psi_xstar = float(np.exp(-c / xstar ** alpha))
    dpsi_xstar = psi_xstar * c * alpha / xstar ** (alpha + 1.0)
    params = np.zeros(_hdr_len())
    params[0] = alpha
    params[1] = c
    params[2] = xstar
    params[3] = psi_xstar
    params[4] = dpsi_xstar
    params[5] = 1.0  # cubic coefficient
    params[6] = 0.0
    params[7] = 0.0
    return ProfileFunction(
        label=label or f"exp_power(alpha={alpha}, c={c})",
        kind_id=K.KIND_EXPPOWER, params=params, alpha=alpha, c=c)


def from_callable(fn, label="stub"):
    """Wrap a plain python callable as a profile (testing aid)."""
    return ProfileFunction(label=label, kind_id=0, params=None, fn=fn)


def _hdr_len():
    return 8


def _pack(base_params, chords, bands, mollifier=None):
    parts = [np.asarray(base_params[:8], dtype=float).copy()]
    parts[0][6] = len(chords)
    parts[0][7] = len(bands)
    for ch in chords:
        parts.append(np.array([ch.x_lo, ch.x_hi, ch.slope, ch.intercept]))
    for bd in bands:
        ch = next(c for c in chords if c.n == bd.chord_n)
        parts.append(np.array([bd.t, bd.eps, bd.lo, bd.hi, ch.slope, ch.intercept]))
    if mollifier is not None:
        parts.append(np.array([float(mollifier.n_gl)]))
        parts.append(mollifier.gl_nodes)
        parts.append(mollifier.gl_weights)
        parts.append(np.array([mollifier.norm, mollifier.support]))
    return np.concatenate(parts)


def build_piecewise_max(base, j_max=40, label=None):
    """Chord construction over even dyadic intervals of an exp-power base.

    Chord n (n even) replaces the base on [t_{n+1}, t_n], t_j = 2^-j.  The
    index range is capped where the base ordinate would underflow, so every
    stored chord has well-separated float endpoints.
    """
    if base.kind_id != K.KIND_EXPPOWER:
        raise ValueError("piecewise construction expects an exp-power base")
    n_max = 0
    for n in range(2, j_max + 1, 2):
        if base.value(2.0 ** (-(n + 1))) >= _UNDERFLOW_FLOOR:
            n_max = n
        else:
            break
    if n_max < 2:
        raise ValueError("no usable chord scales for this base")
    chords = []
    for n in range(2, n_max + 1, 2):
        x_hi = 2.0 ** (-n)
        x_lo = 2.0 ** (-(n + 1))
        y_hi = base.value(x_hi)
        y_lo = base.value(x_lo)
        slope = (y_hi - y_lo) / (x_hi - x_lo)
        chords.append(Chord(n=n, x_lo=x_lo, x_hi=x_hi, slope=slope,
                            intercept=y_lo - slope * x_lo))
    params = _pack(base.params, chords, [])
    return ProfileFunction(
        label=label or f"piecewise_max[{base.label}]",
        kind_id=K.KIND_PIECEWISE, params=params,
        alpha=base.alpha, c=base.c, chords=chords)


def mollify(piecewise, mollifier=None, label=None):
    """Smooth the kinks of a piecewise-max profile on dyadic bands.

    On the band [3 t_j/4, 5 t_j/4] around node t_j the value
    max(psi, chord) is replaced by (psi+chord)/2 + m_eps(psi-chord)/2 with
    m_eps a mollified absolute value.  eps_j is chosen small enough that
    the smoothing dies out strictly inside the band, so the result equals
    the piecewise profile at and beyond the band edges.
    """
    if piecewise.kind_id != K.KIND_PIECEWISE:
        raise ValueError("mollify expects a piecewise-max profile")
    mol = mollifier or Mollifier()
    base = ProfileFunction(label="base", kind_id=K.KIND_EXPPOWER,
                           params=piecewise.params[:8].copy(),
                           alpha=piecewise.alpha, c=piecewise.c)
    n_max = max(ch.n for ch in piecewise.chords)
    bands = []
    for j in range(2, n_max + 2):
        t = 2.0 ** (-j)
        n_assoc = j if j % 2 == 0 else j - 1
        ch = next(c for c in piecewise.chords if c.n == n_assoc)
        lo, hi = 0.75 * t, 1.25 * t
        gap_lo = abs(base.value(lo) - ch.value(lo))
        gap_hi = abs(base.value(hi) - ch.value(hi))
        eps = min(0.25 * t, 0.5 * min(gap_lo, gap_hi))
        if eps <= 0.0:
            raise ValueError(f"degenerate smoothing width at node j={j}")
        bands.append(Band(j=j, t=t, eps=eps, lo=lo, hi=hi, chord_n=n_assoc))
    params = _pack(piecewise.params[:8], piecewise.chords, bands, mol)
    return ProfileFunction(
        label=label or f"mollified[{piecewise.label}]",
        kind_id=K.KIND_MOLLIFIED, params=params,
        alpha=piecewise.alpha, c=piecewise.c,
        chords=list(piecewise.chords), bands=bands, mollifier=mol)
