import math

import numpy as np
import pytest

from kobalab import (CPoint, SampledCurve, balanced_gromov_lower,
                     build_distance_grid, certify_lambda_geodesic,
                     construct_tangential_geodesic, endpoint_face_distance,
                     exact_halfplane_distance, exp_power,
                     find_balanced_parameter, halfplane_geodesic,
                     halfplane_geodesic_point, max_boundary_distance,
                     predicted_terminal_depth)
from kobalab.errors import (BalanceViolation, ConfigError, EscapedDepthCap)
from kobalab.geodesics import STATUS_ESCAPED, STATUS_REACHED


def test_predict_matches_construct(smooth_oracle):
    """The ODE terminal height agrees with the integral prediction."""
    pred = predicted_terminal_depth(smooth_oracle.profile, 1.0, 1e-6)
    curve = construct_tangential_geodesic(smooth_oracle, 1.0, 1e-6)
    D = float(curve.points[-1, 2])
    assert pred.status == STATUS_REACHED
    assert abs(D - pred.depth) / pred.depth <= 1e-6


def test_terminal_depth_formula(smooth_oracle):
    # alpha=1, c=1, f0=1e-6: depth exp(-ln(1e6)/e)
    expect = math.exp(-math.log(1e6) / math.e)
    pred = predicted_terminal_depth(smooth_oracle.profile, 1.0, 1e-6)
    np.testing.assert_allclose(pred.depth, expect, rtol=1e-4)


def test_terminal_depths_strictly_decreasing(smooth_oracle):
    ds = [predicted_terminal_depth(smooth_oracle.profile, 1.0,
                                   10.0 ** -k).depth
          for k in range(2, 13)]
    assert all(b < a for a, b in zip(ds, ds[1:]))
    np.testing.assert_allclose(ds[1], 0.07877015072542654, rtol=1e-9)
    np.testing.assert_allclose(ds[-1], 3.849875683760843e-05, rtol=1e-9)


def test_curve_shape(smooth_oracle):
    curve = construct_tangential_geodesic(smooth_oracle, 1.0, 1e-4,
                                          span=1.0)
    assert curve.points.shape == (curve.t.size, 4)
    np.testing.assert_allclose(curve.points[0],
                               [0.0, 0.0, 1e-4, 0.0], atol=1e-15)
    assert curve.points[-1, 1] == 1.0
    assert curve.meta["ode_residual_sup"] <= 1e-6
    # depth grows monotonically along the run
    assert np.all(np.diff(curve.points[:, 2]) >= 0.0)
    p0 = curve.cpoint(0)
    assert p0.z1 == complex(curve.points[0, 0], curve.points[0, 1])
    assert p0.z2 == complex(curve.points[0, 2], curve.points[0, 3])


def test_escape_flag(shallow_profile):
    from kobalab import CONVEX, DomainOracle
    om = DomainOracle(shallow_profile, CONVEX)
    pred = predicted_terminal_depth(shallow_profile, 1.0, 1e-9)
    assert pred.status == STATUS_ESCAPED
    with pytest.raises(EscapedDepthCap):
        construct_tangential_geodesic(om, 1.0, 1e-9)


def test_max_boundary_distance_equals_terminal(smooth_oracle):
    curve = construct_tangential_geodesic(smooth_oracle, 1.0, 1e-5)
    D = float(curve.points[-1, 2])
    np.testing.assert_allclose(max_boundary_distance(smooth_oracle, curve),
                               D, rtol=1e-9)
    np.testing.assert_allclose(endpoint_face_distance(smooth_oracle, curve),
                               D, rtol=1e-12)


def test_certificate_smooth(smooth_oracle):
    curve = construct_tangential_geodesic(smooth_oracle, 1.0, 1e-6)
    cert = certify_lambda_geodesic(smooth_oracle, curve, 4.2)
    assert cert.status == "Certified"
    np.testing.assert_allclose(cert.observed_sup_ratio, 2.044, rtol=1e-2)
    # tightening the target below the observed ratio cannot certify
    tight = certify_lambda_geodesic(smooth_oracle, curve, 1.5)
    assert tight.status != "Certified"
    assert tight.observed_sup_ratio == cert.observed_sup_ratio


def test_certificate_slow_speed(steep_oracle):
    """The low-speed family stays within the sharpened target."""
    curve = construct_tangential_geodesic(steep_oracle, 0.1, 1e-18)
    cert = certify_lambda_geodesic(steep_oracle, curve, 1.26)
    assert cert.status == "Certified"
    np.testing.assert_allclose(cert.observed_sup_ratio, 1.2, rtol=1e-2)


def test_certificate_lambda_monotone(smooth_oracle):
    curve = construct_tangential_geodesic(smooth_oracle, 1.0, 1e-4)
    stats = [certify_lambda_geodesic(smooth_oracle, curve, lam).status
             for lam in (1.0, 2.2, 4.2, 8.0)]
    # once certified, larger targets stay certified
    first = stats.index("Certified")
    assert all(s == "Certified" for s in stats[first:])


def _hp_curve(a, b):
    ts, zetas = halfplane_geodesic(a, b)
    pts = np.column_stack([np.zeros(ts.size), np.zeros(ts.size),
                           zetas.real, zetas.imag])
    return SampledCurve(t=ts, points=pts, meta={"kind": "halfplane"})


def test_balanced_parameter_exact_mode(rng):
    a, b, o = 0.5 - 1j, 2.5 + 1j, 1.0 + 0j
    curve = _hp_curve(a, b)
    z, w, op = CPoint(0j, a), CPoint(0j, b), CPoint(0j, o)
    dist = lambda p, q: exact_halfplane_distance(p.z2, q.z2)
    point = lambda t: CPoint(0j, halfplane_geodesic_point(a, b, t))
    tau, x = find_balanced_parameter(None, curve, z, w, op, tol=1e-9,
                                     distance_fn=dist, curve_point_fn=point,
                                     h_tol=1e-12)
    gz = 0.5 * (dist(z, op) + dist(x, op) - dist(z, x))
    gw = 0.5 * (dist(w, op) + dist(x, op) - dist(w, x))
    assert abs(gz / gw - 1.0) <= 1e-9
    assert 0.0 < tau < 1.0
    tau2, x2, low = balanced_gromov_lower(None, curve, z, w, op, tol=1e-9,
                                          distance_fn=dist,
                                          curve_point_fn=point, h_tol=1e-12)
    assert tau2 == tau
    np.testing.assert_allclose(low, gz, rtol=1e-9)


def test_balanced_requires_endpoints():
    curve = _hp_curve(0.5 + 0j, 2.0 + 0j)
    z, w = CPoint(0j, 1.4 + 0j), CPoint(0j, 2.0 + 0j)
    dist = lambda p, q: exact_halfplane_distance(p.z2, q.z2)
    with pytest.raises(BalanceViolation):
        find_balanced_parameter(None, curve, z, w, CPoint(0j, 1 + 0j),
                                distance_fn=dist,
                                curve_point_fn=lambda t: z)


def test_balanced_mode_config_errors():
    a, b = 0.5 + 0j, 2.0 + 0j
    curve = _hp_curve(a, b)
    z, w = CPoint(0j, a), CPoint(0j, b)
    o = CPoint(0j, 1 + 0j)
    dist = lambda p, q: exact_halfplane_distance(p.z2, q.z2)
    with pytest.raises(ConfigError):
        find_balanced_parameter(None, curve, z, w, o, distance_fn=dist)
    with pytest.raises(ConfigError):
        find_balanced_parameter(None, curve, z, w, o)  # no grid either


def test_balanced_graph_mode(smooth_oracle):
    curve = construct_tangential_geodesic(smooth_oracle, 1.0, 1e-4)
    grid = build_distance_grid(smooth_oracle, "model", (-0.25, 1.25),
                               (0.45 * 1e-4, 0.6), 0.05)
    o = CPoint(0j, 0.5 + 0j)
    tau, x, low = balanced_gromov_lower(
        smooth_oracle, curve, curve.cpoint(0), curve.cpoint(-1), o,
        grid=grid)
    assert 0.0 < tau < 1.0
    assert low > 0.0
