"""Experiment drivers and deterministic report emission.

Three entry points cover the main workflows: ``run_visibility_family``
builds and certifies a family of tangential curves over a decreasing list
of launch heights, ``run_counterexample_suite`` checks the chord-built
profiles and classifies the origin, and the two validation runners
exercise the half-plane slice where closed-form distances exist.

Reports carry no wall-clock data, so the same config reproduces
byte-identical artifacts.  Every numeric series is tagged with the kind
of bound it is (lower / upper / point-estimate), and the Gromov block is
labelled a growth diagnostic: monotone growth of certified lower bounds
is what the runs establish, never a limit statement.
"""

import dataclasses
import importlib.metadata
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy

from . import geodesics
from . import goldilocks
from . import metric
from . import profiles
from ._core import BACKEND
from .errors import ConfigError, EscapedDepthCap, KobalabError
from .geometry import CCONVEX, CONVEX, CPoint, DomainOracle

SCHEMA_VERSION = 1
CONFIG_VERSION = 1

_PROFILE_KINDS = ("exp_power", "piecewise_max", "mollified")
_CONVEXITY_NAMES = {"convex": CONVEX, "cconvex": CCONVEX}


def _default_f0():
    return tuple(10.0 ** -k for k in range(2, 10))


@dataclass
class ExperimentConfig:
    """Flat experiment parameters, mirroring the key=value config format."""

    config_version: int = CONFIG_VERSION
    profile: str = "exp_power"
    alpha: float = 1.0
    profile_c: float = 1.0
    convexity: str = "convex"
    c: float = 1.0
    f0: tuple = field(default_factory=_default_f0)
    span: float = 1.0
    height_cap: float = geodesics.DEFAULT_HEIGHT_CAP
    lambda_target: float = 4.2
    eps_target: float = 0.0
    pair_grid: int = 48
    grid_h: float = 0.05
    grid_u_lo: float = -0.25
    grid_u_hi: float = 1.25
    grid_v_top: float = 0.6
    origin_height: float = 0.5
    balance_tol: float = 0.1
    balance_h_tol: float = 1e-3
    classify_eps: float = 1e-2
    witness_r: float = 1e-8
    seed: int = 1729
    workers: int = 1
    outdir: str = "."

    def validate(self):
        if self.config_version != CONFIG_VERSION:
            raise ConfigError("unsupported config_version %r" %
                              (self.config_version,))
        if self.profile not in _PROFILE_KINDS:
            raise ConfigError("profile must be one of %s" %
                              (_PROFILE_KINDS,))
        if self.convexity not in _CONVEXITY_NAMES:
            raise ConfigError("convexity must be 'convex' or 'cconvex'")
        for name in ("alpha", "profile_c", "c", "span", "height_cap",
                     "lambda_target", "grid_h", "grid_v_top",
                     "origin_height", "balance_tol", "balance_h_tol",
                     "classify_eps", "witness_r"):
            if not getattr(self, name) > 0.0:
                raise ConfigError("%s must be positive" % name)
        if self.eps_target < 0.0:
            raise ConfigError("eps_target must be nonnegative")
        if self.pair_grid < 2:
            raise ConfigError("pair_grid must be at least 2")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not self.f0:
            raise ConfigError("f0 list must be nonempty")
        if any(not f > 0.0 for f in self.f0):
            raise ConfigError("f0 entries must be positive")
        if any(b >= a for a, b in zip(self.f0, self.f0[1:])):
            raise ConfigError("f0 list must be strictly decreasing")
        if self.grid_u_hi <= self.grid_u_lo:
            raise ConfigError("grid_u_hi must exceed grid_u_lo")
        return self


def _coerce(key, val, ftype):
    try:
        if key == "f0":
            parts = [p for p in val.replace(",", " ").split() if p]
            return tuple(float(p) for p in parts)
        if ftype is int:
            return int(val)
        if ftype is float:
            return float(val)
    except ValueError as exc:
        raise ConfigError("bad value for %s: %s" % (key, exc))
    return val


def parse_config(path):
    """Read a flat ``key = value`` config file into an ExperimentConfig.

    Lines are independent; ``#`` starts a comment.  Unknown or repeated
    keys are errors, as is any value that fails validation.
    """
    fields = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    for ln, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected key = value" % ln)
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in fields:
            raise ConfigError("line %d: unknown key %r" % (ln, key))
        if key in values:
            raise ConfigError("line %d: duplicate key %r" % (ln, key))
        values[key] = _coerce(key, val, fields[key].type)
    return ExperimentConfig(**values).validate()


@dataclass
class ExperimentReport:
    """Everything a run produced, ready for deterministic emission."""

    kind: str
    schema_version: int = SCHEMA_VERSION
    config: dict = field(default_factory=dict)
    environment: dict = field(default_factory=dict)
    curves: list = field(default_factory=list)
    gromov: dict = field(default_factory=dict)
    classification: dict = field(default_factory=dict)
    faces: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    errors: list = field(default_factory=list)


def _package_version():
    try:
        return importlib.metadata.version("kobalab")
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


def _environment(config):
    return {
        "package": _package_version(),
        "python": "%d.%d.%d" % sys.version_info[:3],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "backend": BACKEND,
        "seed": config.seed,
        "tolerances": {
            "lambda_target": config.lambda_target,
            "eps_target": config.eps_target,
            "balance_tol": config.balance_tol,
            "balance_h_tol": config.balance_h_tol,
            "grid_h": config.grid_h,
            "classify_eps": config.classify_eps,
        },
    }


def _build_profile(config):
    base = profiles.exp_power(config.alpha, config.profile_c)
    if config.profile == "exp_power":
        return base
    pw = profiles.build_piecewise_max(base)
    if config.profile == "piecewise_max":
        return pw
    return profiles.mollify(pw)


def _oracle(config):
    return DomainOracle(_build_profile(config),
                        _CONVEXITY_NAMES[config.convexity])


def _verdict_dict(v):
    return {
        "status": v.status,
        "value": v.value,
        "growth_rate": v.growth_rate,
        "p_estimate": v.p_estimate,
        "levels": v.levels,
        "eps": v.eps,
    }


# ---------------------------------------------------------------------------
# Visibility family


def run_visibility_family(config):
    """Construct, certify and diagnose one curve per launch height in f0.

    A curve that escapes the height cap is recorded with status
    "Escaped"; that is a finding, not an error.  Genuine per-curve
    failures land in the errors list and the run continues.  When at
    least two curves reach their terminal depth, a shared slice graph
    supplies balanced Gromov-product lower bounds for the growth
    diagnostic.
    """
    config.validate()
    oracle = _oracle(config)
    prof = oracle.profile
    report = ExperimentReport(kind="visibility_family",
                              config=dataclasses.asdict(config),
                              environment=_environment(config))

    def one(f0):
        rec = {"f0": f0}
        predicted = geodesics.predicted_terminal_depth(
            prof, config.c, f0, dir_scale=config.span,
            height_cap=config.height_cap)
        rec["predicted_depth"] = {"value": predicted.depth,
                                  "status": predicted.status,
                                  "bound": "point-estimate"}
        try:
            curve = geodesics.construct_tangential_geodesic(
                oracle, config.c, f0, span=config.span,
                height_cap=config.height_cap)
        except EscapedDepthCap:
            rec["status"] = geodesics.STATUS_ESCAPED
            return rec, None
        rec["status"] = geodesics.STATUS_REACHED
        rec["terminal_depth"] = {"value": float(curve.points[-1, 2]),
                                 "bound": "point-estimate"}
        rec["max_boundary_distance"] = {
            "value": geodesics.max_boundary_distance(oracle, curve),
            "bound": "lower",
            "note": "max over curve samples"}
        rec["endpoint"] = [float(x) for x in curve.points[-1]]
        rec["endpoint_face_distance"] = geodesics.endpoint_face_distance(
            oracle, curve)
        cert = geodesics.certify_lambda_geodesic(
            oracle, curve, config.lambda_target, config.eps_target,
            pair_grid=config.pair_grid)
        rec["certificate"] = {
            "lambda_target": cert.lambda_target,
            "eps_target": cert.eps_target,
            "sup_ratio": cert.observed_sup_ratio,
            "pair_grid": cert.pair_grid_size,
            "status": cert.status,
            "witness": [float(t) for t in cert.witness],
            "bound": "lower",
        }
        return rec, curve

    def safe(f0):
        try:
            return one(f0), None
        except KobalabError as exc:
            rec = {"f0": f0, "status": "Error", "error": str(exc)}
            return (rec, None), "f0=%g: %s" % (f0, exc)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(safe, config.f0))
    else:
        results = [safe(f0) for f0 in config.f0]

    reached = []
    for (rec, curve), err in results:
        report.curves.append(rec)
        if err is not None:
            report.errors.append(err)
        if curve is not None:
            reached.append((rec["f0"], curve))

    report.gromov = {"f0": [], "balanced_tau": [], "lower": [],
                     "bound": "lower",
                     "origin": [0.0, config.origin_height],
                     "note": "growth diagnostic over certified lower bounds"}
    if len(reached) >= 2:
        v_min = 0.45 * min(f for f, _ in reached)
        try:
            grid = metric.build_distance_grid(
                oracle, "model", (config.grid_u_lo, config.grid_u_hi),
                (v_min, config.grid_v_top), config.grid_h)
            o = CPoint(0j, complex(config.origin_height, 0.0))
            for f0, curve in reached:
                try:
                    tau, _, low = geodesics.balanced_gromov_lower(
                        oracle, curve, curve.cpoint(0), curve.cpoint(-1),
                        o, grid=grid, tol=config.balance_tol,
                        h_tol=config.balance_h_tol)
                except KobalabError as exc:
                    report.errors.append("gromov f0=%g: %s" % (f0, exc))
                    continue
                report.gromov["f0"].append(f0)
                report.gromov["balanced_tau"].append(tau)
                report.gromov["lower"].append(low)
        except KobalabError as exc:
            report.errors.append("gromov grid: %s" % exc)
    return report


# ---------------------------------------------------------------------------
# Counterexample suite


def run_counterexample_suite(config):
    """Check the chord-built profiles and classify the origin.

    Verifies evenness, dominance over the base profile, midpoint
    convexity and the inverse-growth ceiling, then runs the integral
    classifier at the origin and walks face witnesses down the
    geometric sequence of chord midpoints.
    """
    config.validate()
    if config.profile not in ("piecewise_max", "mollified"):
        raise ConfigError(
            "counterexample suite needs profile=piecewise_max or mollified")
    base = profiles.exp_power(config.alpha, config.profile_c)
    pw = profiles.build_piecewise_max(base)
    mo = profiles.mollify(pw)
    oracle = DomainOracle(mo, _CONVEXITY_NAMES[config.convexity])
    report = ExperimentReport(kind="counterexample",
                              config=dataclasses.asdict(config),
                              environment=_environment(config))
    checks = report.checks

    half = np.geomspace(1e-8, 0.5, 160)
    xs = np.concatenate([-half[::-1], [0.0], half])
    for label, pf in (("piecewise", pw), ("mollified", mo)):
        ev = float(np.max(np.abs(pf.value(xs) - pf.value(-xs))))
        checks.append({"name": label + "_even", "passed": ev == 0.0,
                       "max_abs_diff": ev})
    gap0 = float(np.min(pw.value(xs) - base.value(xs)))
    checks.append({"name": "piecewise_dominates_base",
                   "passed": gap0 >= -1e-300, "min_gap": gap0})
    gap1 = float(np.min(mo.value(xs) - pw.value(xs)))
    checks.append({"name": "mollified_dominates_piecewise",
                   "passed": gap1 >= -1e-12, "min_gap": gap1})

    g = np.geomspace(1e-7, 0.4, 240)
    a, b = g[:-1], g[1:]
    mid = 0.5 * (a + b)
    for label, pf in (("piecewise", pw), ("mollified", mo)):
        slack = float(np.max(pf.value(mid) -
                             0.5 * (pf.value(a) + pf.value(b))))
        checks.append({"name": label + "_midpoint_convex",
                       "passed": slack <= 1e-14, "max_slack": slack})

    rs = np.geomspace(1e-8, 1e-2, 50)
    bound = 1.0 / np.log(1.0 / rs) ** 2
    excess = float(np.max(mo.inverse(rs) - bound))
    # equality holds on exposed base arcs, so allow rounding headroom
    tol = 4.0 * np.finfo(float).eps * float(np.max(bound))
    checks.append({"name": "mollified_inverse_log_bound",
                   "passed": excess <= tol, "max_excess": excess,
                   "grid": [1e-8, 1e-2, 50]})

    try:
        origin = CPoint(0j, 0j)
        rep = goldilocks.classify_point(oracle, origin,
                                        eps=config.classify_eps)
        report.classification = {
            "summary": rep.summary,
            "strongly_non_goldilocks": _verdict_dict(
                rep.strongly_non_goldilocks),
            "weakly_goldilocks": _verdict_dict(rep.weakly_goldilocks),
            "local_goldilocks": _verdict_dict(rep.local_goldilocks),
            "distance_growth_condition": rep.distance_growth_condition,
        }
        checks.append({"name": "origin_weakly_goldilocks",
                       "passed": rep.weakly_goldilocks.convergent,
                       "status": rep.weakly_goldilocks.status})
        checks.append({"name": "origin_not_local_goldilocks",
                       "passed": rep.local_goldilocks.divergent,
                       "status": rep.local_goldilocks.status})
    except KobalabError as exc:
        report.errors.append("classify: %s" % exc)

    try:
        faces = {"j": [], "point": [], "norm": [], "probe_r": [],
                 "witness": [], "witness_halved": [],
                 "bound": "lower"}
        for j in range(2, 11, 2):
            xm = 11.0 * (2.0 ** -j) / 16.0
            ym = float(mo.value(xm))
            pj = CPoint(complex(xm, 0.0), complex(ym, 0.0))
            # probe height scales with the face's own ordinate so every
            # face is tested in its near-boundary regime
            rj = config.witness_r * ym
            w1 = goldilocks.face_witness(oracle, pj, r=rj)
            w2 = goldilocks.face_witness(oracle, pj, r=0.5 * rj)
            faces["j"].append(j)
            faces["point"].append([xm, ym])
            faces["norm"].append(math.hypot(xm, ym))
            faces["probe_r"].append(rj)
            faces["witness"].append(w1)
            faces["witness_halved"].append(w2)
        report.faces = faces
        wa = np.asarray(faces["witness"])
        wb = np.asarray(faces["witness_halved"])
        checks.append({"name": "face_witness_positive",
                       "passed": bool(np.all(wa > 0.0)),
                       "min": float(np.min(wa))})
        rel = float(np.max(np.abs(wb - wa) / np.abs(wa)))
        checks.append({"name": "face_witness_stable_under_halving",
                       "passed": rel < 1e-2, "max_rel_change": rel})
        norms = faces["norm"]
        ratios = [y / x for x, y in zip(norms, norms[1:])]
        # midpoints sit on every second chord, so norms shrink about 4x
        # per row (the ordinate inflates the shallowest norms slightly)
        geo = all(r < 0.3 for r in ratios)
        checks.append({"name": "face_points_geometric_decay",
                       "passed": geo, "ratios": ratios})
    except KobalabError as exc:
        report.errors.append("faces: %s" % exc)
    return report


# ---------------------------------------------------------------------------
# Half-plane validation runs


def run_halfplane_validation(hs=(0.1, 0.05, 0.025), n_pairs=20, seed=1729):
    """Graph upper bounds against the closed-form half-plane distance.

    Returns per-spacing relative errors for a fixed random pair set.
    Because each finer graph contains the coarser one, no pair's error
    may grow under refinement.
    """
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n_pairs):
        a = complex(rng.uniform(0.2, 3.0), rng.uniform(-2.0, 2.0))
        b = complex(rng.uniform(0.2, 3.0), rng.uniform(-2.0, 2.0))
        pairs.append((a, b))
    exact = [metric.exact_halfplane_distance(a, b) for a, b in pairs]
    out = {"h": list(hs),
           "pairs": [[a.real, a.imag, b.real, b.imag] for a, b in pairs],
           "exact": exact, "upper": [], "rel_error": [], "nodes": []}
    grid = None
    for h in sorted(hs, reverse=True):
        grid = metric.build_distance_grid(None, "halfplane", (-2.5, 2.5),
                                          (0.18, 3.2), h, parent=grid)
        srcs = [CPoint(0j, a) for a, _ in pairs]
        tgts = [CPoint(0j, b) for _, b in pairs]
        up = metric.kdist_upper_multi(None, grid, srcs, tgts)
        uppers = [float(up[i, i]) for i in range(n_pairs)]
        rel = [(u - e) / e for u, e in zip(uppers, exact)]
        out["upper"].append(uppers)
        out["rel_error"].append(rel)
        out["nodes"].append(grid.n_nodes)
    return out


def run_balanced_validation(n=50, seed=1729):
    """Balanced-parameter search on exact half-plane geodesics.

    Checks the bracketing inequalities h(0) >= 1 >= h(1) and the slack
    identity at the balanced point for random configurations.
    """
    rng = np.random.default_rng(seed)

    def dist(p, q):
        return metric.exact_halfplane_distance(p.z2, q.z2)

    out = {"h0": [], "h1": [], "tau": [], "slack": []}
    for _ in range(n):
        a = complex(rng.uniform(0.2, 3.0), rng.uniform(-2.0, 2.0))
        b = complex(rng.uniform(0.2, 3.0), rng.uniform(-2.0, 2.0))
        o = complex(rng.uniform(0.2, 3.0), rng.uniform(-2.0, 2.0))
        ts, zetas = metric.halfplane_geodesic(a, b)
        pts = np.column_stack([np.zeros(ts.size), np.zeros(ts.size),
                               zetas.real, zetas.imag])
        curve = geodesics.SampledCurve(t=ts, points=pts,
                                       meta={"kind": "halfplane"})
        z, w, op = CPoint(0j, a), CPoint(0j, b), CPoint(0j, o)

        def point_fn(t, a=a, b=b):
            return CPoint(0j, metric.halfplane_geodesic_point(a, b, t))

        def gprod(p, t):
            x = point_fn(t)
            return 0.5 * (dist(p, op) + dist(x, op) - dist(p, x))

        g0z, g0w = gprod(z, 0.0), gprod(w, 0.0)
        g1z, g1w = gprod(z, 1.0), gprod(w, 1.0)
        out["h0"].append(g0z / max(g0w, 1e-300))
        out["h1"].append(g1z / max(g1w, 1e-300))
        tau, x, _ = geodesics.balanced_gromov_lower(
            None, curve, z, w, op, tol=1e-9, distance_fn=dist,
            curve_point_fn=point_fn, h_tol=1e-12)
        # slack identity: 2(z|x)_o - (z|w)_o - k(x,o) vanishes at balance
        gzw = 0.5 * (dist(z, op) + dist(w, op) - dist(z, w))
        slack = 2.0 * gprod(z, tau) - gzw - dist(x, op)
        out["tau"].append(tau)
        out["slack"].append(slack)
    return out


# ---------------------------------------------------------------------------
# Emission


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return None if not math.isfinite(f) else f
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit(report, outdir=None, formats=("json", "csv")):
    """Write report artifacts; returns the list of paths written.

    JSON keys are sorted and floats use repr, so reruns of the same
    config are byte-identical.  CSV series are one row per entry with a
    fixed header.
    """
    if outdir is None:
        outdir = report.config.get("outdir", ".")
    os.makedirs(outdir, exist_ok=True)
    paths = []
    if "json" in formats:
        path = os.path.join(outdir, "report.json")
        payload = _jsonable(dataclasses.asdict(report))
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        paths.append(path)
    if "csv" not in formats:
        return paths

    if report.curves:
        path = os.path.join(outdir, "curves.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("f0,D,max_delta,lambda_target,sup_ratio,"
                     "status,endpoint_face_dist\n")
            for rec in report.curves:
                term = rec.get("terminal_depth")
                mbd = rec.get("max_boundary_distance")
                cert = rec.get("certificate")
                status = cert["status"] if cert else rec.get("status", "")
                row = [rec.get("f0"),
                       term["value"] if term else None,
                       mbd["value"] if mbd else None,
                       cert["lambda_target"] if cert else None,
                       cert["sup_ratio"] if cert else None,
                       status,
                       rec.get("endpoint_face_distance")]
                fh.write(",".join(_fmt(x) for x in row) + "\n")
        paths.append(path)

    if report.gromov.get("f0"):
        path = os.path.join(outdir, "gromov.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("f0,balanced_tau,gromov_lower\n")
            for f0, tau, low in zip(report.gromov["f0"],
                                    report.gromov["balanced_tau"],
                                    report.gromov["lower"]):
                fh.write("%s,%s,%s\n" % (_fmt(f0), _fmt(tau), _fmt(low)))
        paths.append(path)

    if report.classification:
        path = os.path.join(outdir, "classify.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("gauge,status,value,p_estimate,levels\n")
            for gauge in ("strongly_non_goldilocks", "weakly_goldilocks",
                          "local_goldilocks"):
                v = report.classification.get(gauge)
                if v is None:
                    continue
                val = v["value"]
                if val is not None and not math.isfinite(val):
                    val = None
                fh.write(",".join([gauge, v["status"], _fmt(val),
                                   _fmt(v["p_estimate"]),
                                   _fmt(v["levels"])]) + "\n")
        paths.append(path)
    return paths


if __name__ == "__main__":
    cfg = ExperimentConfig(f0=(1e-2, 1e-3, 1e-4))
    rep = run_visibility_family(cfg)
    for rec in rep.curves:
        print(rec["f0"], rec["status"])
    print("gromov lower:", rep.gromov["lower"])
