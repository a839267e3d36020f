import numpy as np
import pytest

from kobalab import CONVEX, CCONVEX, CPoint, CVector, DomainOracle, exp_power
from kobalab.errors import (NonSmoothPoint, NotOnBoundary, OutsideDomain,
                            ZeroDirection)


def test_contains_and_height(smooth_oracle):
    prof = smooth_oracle.profile
    assert smooth_oracle.contains(CPoint(0.3 + 1j, 0.5 + 2j))
    psi = float(prof.value(0.3))
    assert not smooth_oracle.contains(CPoint(0.3 + 0j, complex(psi - 1e-6)))
    z = CPoint(0.3 + 0.7j, complex(psi + 0.25, -3.0))
    np.testing.assert_allclose(smooth_oracle.height(z), 0.25, rtol=1e-14)


def test_on_boundary(smooth_oracle):
    psi = float(smooth_oracle.profile.value(0.4))
    assert smooth_oracle.on_boundary(CPoint(0.4 + 0j, complex(psi)))
    assert not smooth_oracle.on_boundary(CPoint(0.4 + 0j, complex(psi + 1e-3)))


@pytest.mark.parametrize("t", [0.0, -1.3, 2.0])
@pytest.mark.parametrize("f", [1e-6, 0.1, 0.9])
def test_vertical_axis_distance_exact(smooth_oracle, t, f):
    """Above the flat origin the nearest boundary point sits straight down."""
    d = smooth_oracle.boundary_distance(CPoint(complex(0.0, t), complex(f)))
    np.testing.assert_allclose(d, f, rtol=1e-12)


def test_boundary_distance_batch_matches_scalar(smooth_oracle, rng):
    x0s = rng.uniform(-0.6, 0.6, 40)
    bs = np.exp(rng.uniform(np.log(1e-5), np.log(0.8), 40)) + \
        smooth_oracle.profile.value(x0s)
    batch = smooth_oracle.boundary_distance_batch(x0s, bs)
    for i in range(x0s.size):
        d = smooth_oracle.boundary_distance(
            CPoint(complex(x0s[i]), complex(bs[i])))
        np.testing.assert_allclose(batch[i], d, rtol=1e-9)


def test_boundary_distance_outside(smooth_oracle):
    with pytest.raises(OutsideDomain):
        smooth_oracle.boundary_distance(CPoint(0.5 + 0j, -1.0 + 0j))


def test_boundary_project(smooth_oracle):
    z = CPoint(0.25 + 0j, 0.4 + 0j)
    q = smooth_oracle.boundary_project(z)
    assert smooth_oracle.on_boundary(q)
    d = smooth_oracle.boundary_distance(z)
    gap = np.hypot(abs(z.z1 - q.z1), abs(z.z2 - q.z2))
    np.testing.assert_allclose(gap, d, rtol=1e-8)


def test_directional_distance_vertical(smooth_oracle):
    z = CPoint(0j, 0.3 + 0j)
    d = smooth_oracle.directional_distance(z, CVector(0j, 1 + 0j))
    np.testing.assert_allclose(d, 0.3, rtol=1e-12)


def test_directional_distance_horizontal_is_inverse(smooth_oracle):
    """From (0, f) along e1 the section half-width is psi^-1(f)."""
    for f in (1e-6, 1e-3, 1e-2):
        z = CPoint(0j, complex(f))
        d = smooth_oracle.directional_distance(z, CVector(1 + 0j, 0j))
        np.testing.assert_allclose(
            d, float(smooth_oracle.profile.inverse(f)), rtol=1e-9)


def test_directional_distance_scan_vs_phase(smooth_oracle, rng):
    for _ in range(15):
        x0 = rng.uniform(-0.3, 0.3)
        f = np.exp(rng.uniform(np.log(1e-4), np.log(0.3)))
        z = CPoint(complex(x0, rng.normal()),
                   complex(smooth_oracle.profile.value(x0) + f,
                           rng.normal()))
        th, ph = rng.uniform(0, np.pi, 2)
        v = CVector(complex(np.cos(th) * np.cos(ph),
                            np.cos(th) * np.sin(ph)),
                    complex(np.sin(th)))
        ds = smooth_oracle.directional_distance(z, v, method="scan")
        dp = smooth_oracle.directional_distance(z, v, method="phase")
        if np.isfinite(ds) and np.isfinite(dp):
            np.testing.assert_allclose(dp, ds, rtol=0.05)


def test_directional_distance_zero_direction(smooth_oracle):
    with pytest.raises(ZeroDirection):
        smooth_oracle.directional_distance(CPoint(0j, 1 + 0j),
                                           CVector(0j, 0j))


def test_directional_batch_matches_scalar(smooth_oracle, rng):
    n = 25
    x0s = rng.uniform(-0.4, 0.4, n)
    bs = smooth_oracle.profile.value(x0s) + \
        np.exp(rng.uniform(np.log(1e-5), np.log(0.4), n))
    a1, b1 = rng.normal(size=n), rng.normal(size=n)
    a2, b2 = rng.normal(size=n), rng.normal(size=n)
    batch = smooth_oracle.directional_distance_batch(x0s, bs, a1, b1, a2, b2)
    for i in range(n):
        d = smooth_oracle.directional_distance(
            CPoint(complex(x0s[i]), complex(bs[i])),
            CVector(complex(a1[i], b1[i]), complex(a2[i], b2[i])))
        if np.isfinite(d):
            np.testing.assert_allclose(batch[i], d, rtol=1e-9)
        else:
            assert not np.isfinite(batch[i])


def test_normal_tangent_frame(smooth_oracle):
    x = 0.3
    psi = float(smooth_oracle.profile.value(x))
    p = CPoint(complex(x), complex(psi))
    eta, X = smooth_oracle.normal_tangent_frame(p)
    h = 1e-7
    slope = (smooth_oracle.profile.value(x + h) -
             smooth_oracle.profile.value(x - h)) / (2 * h)
    w = np.hypot(1.0, slope)
    np.testing.assert_allclose([eta.v1.real, eta.v2.real],
                               [-slope / w, 1.0 / w], atol=1e-6)
    np.testing.assert_allclose([X.v1.real, X.v2.real],
                               [1.0 / w, slope / w], atol=1e-6)
    # frame is orthonormal in the real slice
    dot = eta.v1.real * X.v1.real + eta.v2.real * X.v2.real
    assert abs(dot) < 1e-12


def test_frame_requires_boundary(smooth_oracle):
    with pytest.raises(NotOnBoundary):
        smooth_oracle.normal_tangent_frame(CPoint(0j, 1 + 0j))


def test_frame_raises_at_kinks(piecewise_profile):
    om = DomainOracle(piecewise_profile, CONVEX)
    kink = float(piecewise_profile.kink_abscissas()[-1])
    psi = float(piecewise_profile.value(kink))
    with pytest.raises(NonSmoothPoint):
        om.normal_tangent_frame(CPoint(complex(kink), complex(psi)))


def test_face_segment(mollified_oracle, mollified_profile):
    ch = next(c for c in mollified_profile.chords if c.n == 4)
    xm = 0.5 * (1.25 * ch.x_lo + 0.75 * ch.x_hi)
    p = CPoint(complex(xm), complex(float(mollified_profile.value(xm))))
    seg = mollified_oracle.face_segment(p)
    assert seg is not None
    d = seg.direction
    np.testing.assert_allclose(d.v2.real / d.v1.real, ch.slope, rtol=1e-12)


def test_face_segment_none_on_smooth(smooth_oracle):
    psi = float(smooth_oracle.profile.value(0.3))
    assert smooth_oracle.face_segment(
        CPoint(0.3 + 0j, complex(psi))) is None


def test_lower_coeff(smooth_oracle, mollified_profile):
    assert smooth_oracle.lower_coeff == 0.5
    om = DomainOracle(mollified_profile, CCONVEX)
    assert om.lower_coeff == 0.25
