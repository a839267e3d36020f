"""Acceptance gate: the ten primary correctness criteria.

One test per criterion; each prints a single summary line (shown with
-s, or on failure) and enforces the numerical claim together with its
wall-clock budget.
"""

import math
import time

import numpy as np

from kobalab import (CONVEX, CPoint, CVector, DomainOracle,
                     certify_lambda_geodesic, classify_point,
                     construct_tangential_geodesic, endpoint_face_distance,
                     experiments, exp_power, kappa_bounds,
                     max_boundary_distance, predicted_terminal_depth)
from kobalab.errors import EscapedDepthCap
from kobalab.geodesics import STATUS_REACHED


def _line(num, ok, detail):
    print("criterion %02d %s  %s" % (num, "PASS" if ok else "FAIL", detail))


def test_criterion_01_halfplane_graph_error():
    """Graph uppers within 5% of the closed form, improving under refinement."""
    t0 = time.monotonic()
    out = experiments.run_halfplane_validation(hs=(0.1, 0.05, 0.025),
                                               n_pairs=20)
    elapsed = time.monotonic() - t0
    errs = [np.asarray(e) for e in out["rel_error"]]
    worst = float(np.max(errs[-1]))
    noninc = all(np.all(errs[i + 1] <= errs[i] + 1e-12) for i in range(2))
    ok = worst <= 0.05 and noninc and elapsed < 60.0
    _line(1, ok, "worst %.2f%% at h=0.025, nonincreasing=%s, %.1fs" %
          (100 * worst, noninc, elapsed))
    assert worst <= 0.05
    assert noninc
    assert elapsed < 60.0


def test_criterion_02_sandwich_ratio():
    """Metric bounds with the exact factor-two sandwich, 200 random queries."""
    t0 = time.monotonic()
    om = DomainOracle(exp_power(1.0, 1.0), CONVEX)
    rng = np.random.default_rng(1729)
    checked = 0
    for _ in range(200):
        x = rng.uniform(-0.8, 0.8)
        f = np.exp(rng.uniform(np.log(1e-5), np.log(0.85)))
        z = CPoint(complex(x, rng.normal()),
                   complex(float(om.profile.value(x)) + f, rng.normal()))
        v = CVector(complex(rng.normal(), rng.normal()),
                    complex(rng.normal(), rng.normal()))
        b = kappa_bounds(om, z, v)
        assert b.upper == 2.0 * b.lower
        checked += 1
    # pure normal-slice directions collapse to a point interval
    for f in (1e-4, 0.3, 0.8):
        b = kappa_bounds(om, CPoint(0j, complex(f)), CVector(0j, 1 + 0j))
        assert b.lower == b.upper
    elapsed = time.monotonic() - t0
    ok = checked == 200 and elapsed < 5.0
    _line(2, ok, "200 queries exact 2x, vertical point intervals, %.1fs" %
          elapsed)
    assert elapsed < 5.0


def test_criterion_03_terminal_depth_value():
    t0 = time.monotonic()
    om = DomainOracle(exp_power(1.0, 1.0), CONVEX)
    expect = math.exp(-math.log(1e6) / math.e)
    pred = predicted_terminal_depth(om.profile, 1.0, 1e-6)
    curve = construct_tangential_geodesic(om, 1.0, 1e-6)
    built = float(curve.points[-1, 2])
    elapsed = time.monotonic() - t0
    rel_p = abs(pred.depth - expect) / expect
    rel_c = abs(built - expect) / expect
    ok = rel_p <= 1e-4 and rel_c <= 1e-4 and elapsed < 5.0
    _line(3, ok, "D=%.8g expect %.8g (rel %.1e / %.1e), %.1fs" %
          (built, expect, rel_p, rel_c, elapsed))
    assert rel_p <= 1e-4
    assert rel_c <= 1e-4
    assert elapsed < 5.0


def test_criterion_04_depth_family_decreasing():
    t0 = time.monotonic()
    om = DomainOracle(exp_power(1.0, 1.0), CONVEX)
    maxima = []
    for k in range(2, 10):
        curve = construct_tangential_geodesic(om, 1.0, 10.0 ** -k)
        maxima.append(max_boundary_distance(om, curve))
    elapsed = time.monotonic() - t0
    decreasing = all(b < a for a, b in zip(maxima, maxima[1:]))
    ok = decreasing and maxima[-1] <= maxima[0] / 3.0 and elapsed < 30.0
    _line(4, ok, "max delta %.3g -> %.3g, strictly decreasing=%s, %.1fs" %
          (maxima[0], maxima[-1], decreasing, elapsed))
    assert decreasing
    assert maxima[-1] <= maxima[0] / 3.0
    assert elapsed < 30.0


def test_criterion_05_lambda_certificates():
    t0 = time.monotonic()
    om = DomainOracle(exp_power(1.0, 1.0), CONVEX)
    sups = []
    for k in range(2, 10):
        curve = construct_tangential_geodesic(om, 1.0, 10.0 ** -k)
        cert = certify_lambda_geodesic(om, curve, 4.2)
        assert cert.status == "Certified", "f0=1e-%d: %s" % (k, cert.status)
        sups.append(cert.observed_sup_ratio)
    om2 = DomainOracle(exp_power(2.0, 1.0), CONVEX)
    slow = construct_tangential_geodesic(om2, 0.1, 1e-18)
    cert2 = certify_lambda_geodesic(om2, slow, 1.26)
    elapsed = time.monotonic() - t0
    ok = cert2.status == "Certified" and elapsed < 120.0
    _line(5, ok, "family sup<=%.3f at 4.2; slow %.4f at 1.26; %.1fs" %
          (max(sups), cert2.observed_sup_ratio, elapsed))
    assert cert2.status == "Certified"
    assert elapsed < 120.0


def test_criterion_06_dichotomy():
    """Shallow profiles admit deep visible curves; steep ones do not."""
    t0 = time.monotonic()
    shallow = DomainOracle(exp_power(0.5, 1.0), CONVEX)
    rep = classify_point(shallow, CPoint(0j, 0j))
    assert rep.weakly_goldilocks.status == "Convergent"
    escaped = False
    try:
        construct_tangential_geodesic(shallow, 1.0, 1e-9)
    except EscapedDepthCap:
        escaped = True
    assert escaped
    for alpha in (1.0, 2.0):
        om = DomainOracle(exp_power(alpha, 1.0), CONVEX)
        rep = classify_point(om, CPoint(0j, 0j))
        assert rep.strongly_non_goldilocks.status == "Divergent"
        assert predicted_terminal_depth(om.profile, 1.0, 1e-6).status \
            == STATUS_REACHED
        curve = construct_tangential_geodesic(om, 1.0, 1e-6)
        assert curve.meta["terminal_depth"] > 0.0
    elapsed = time.monotonic() - t0
    ok = elapsed < 30.0
    _line(6, ok, "alpha=1/2 Convergent+Escaped; alpha in {1,2} "
          "Divergent+Reached; %.1fs" % elapsed)
    assert elapsed < 30.0


def test_criterion_07_counterexample_suite():
    t0 = time.monotonic()
    cfg = experiments.ExperimentConfig(profile="mollified", alpha=0.5)
    rep = experiments.run_counterexample_suite(cfg)
    elapsed = time.monotonic() - t0
    failed = [c["name"] for c in rep.checks if not c["passed"]]
    cls = rep.classification
    ok = (not failed and rep.errors == [] and
          cls["weakly_goldilocks"]["status"] == "Convergent" and
          cls["local_goldilocks"]["status"] == "Divergent" and
          elapsed < 60.0)
    _line(7, ok, "%d checks, failed=%s, %s, %.1fs" %
          (len(rep.checks), failed or "none", cls["summary"], elapsed))
    assert failed == []
    assert rep.errors == []
    assert cls["weakly_goldilocks"]["status"] == "Convergent"
    assert cls["local_goldilocks"]["status"] == "Divergent"
    assert elapsed < 60.0


def test_criterion_08_gromov_growth():
    t0 = time.monotonic()
    rep = experiments.run_visibility_family(experiments.ExperimentConfig())
    elapsed = time.monotonic() - t0
    low = rep.gromov["lower"]
    assert rep.errors == []
    assert len(low) == 8
    increasing = all(b > a for a, b in zip(low, low[1:]))
    spread = low[-1] - low[0]
    ok = increasing and spread >= 1.0 and elapsed < 120.0
    _line(8, ok, "lower %.3f..%.3f, increasing=%s, spread %.3f, %.1fs" %
          (low[0], low[-1], increasing, spread, elapsed))
    assert increasing
    assert spread >= 1.0
    assert elapsed < 120.0


def test_criterion_09_balanced_products():
    t0 = time.monotonic()
    out = experiments.run_balanced_validation(n=50)
    elapsed = time.monotonic() - t0
    h0 = float(np.min(out["h0"]))
    h1 = float(np.max(out["h1"]))
    slack = float(np.min(out["slack"]))
    ok = h0 >= 1.0 and h1 <= 1.0 and slack >= -1e-9 and elapsed < 10.0
    _line(9, ok, "min h(0)=%.6f, max h(1)=%.6f, worst slack %.2e, %.1fs" %
          (h0, h1, slack, elapsed))
    assert h0 >= 1.0
    assert h1 <= 1.0
    assert slack >= -1e-9
    assert elapsed < 10.0


def test_criterion_10_endpoint_face_distance():
    t0 = time.monotonic()
    om = DomainOracle(exp_power(1.0, 1.0), CONVEX)
    dists = []
    for k in range(2, 10):
        curve = construct_tangential_geodesic(om, 1.0, 10.0 ** -k)
        fd = endpoint_face_distance(om, curve)
        np.testing.assert_allclose(fd, curve.meta["terminal_depth"],
                                   rtol=1e-12)
        dists.append(fd)
    elapsed = time.monotonic() - t0
    decreasing = all(b < a for a, b in zip(dists, dists[1:]))
    ok = decreasing and dists[-1] < 1e-2 and elapsed < 10.0
    _line(10, ok, "face distance %.3g -> %.3g, decreasing=%s, %.1fs" %
          (dists[0], dists[-1], decreasing, elapsed))
    assert decreasing
    assert dists[-1] < 1e-2
    assert elapsed < 10.0
