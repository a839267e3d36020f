"""Command-line front end.

Subcommands cover the common workflows: ``classify`` a boundary point,
``geodesic`` for a single curve with its certificate, ``visibility-run``
and ``counterexample`` for full config-driven families with emitted
artifacts, and ``kdist`` for certified distance bounds between two
points of a model slice.

Exit codes: 0 success, 2 invalid config or arguments, 3 numeric failure
(partial report written when possible), 4 I/O failure.
"""

import argparse
import sys

from . import experiments
from . import geodesics
from . import goldilocks
from . import metric
from .errors import (ConfigError, EscapedDepthCap, KobalabError,
                     OutsideDomain, ZeroDirection)
from .geometry import CPoint

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _pair(text):
    try:
        a, _, b = text.partition(",")
        return float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError("expected two comma-separated "
                                         "numbers, got %r" % text)


def _add_profile_args(p):
    p.add_argument("--profile", default="exp_power",
                   choices=list(experiments._PROFILE_KINDS))
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--profile-c", type=float, default=1.0,
                   dest="profile_c")
    p.add_argument("--convexity", default="convex",
                   choices=["convex", "cconvex"])


def _oracle_from_args(args):
    cfg = experiments.ExperimentConfig(
        profile=args.profile, alpha=args.alpha,
        profile_c=args.profile_c, convexity=args.convexity).validate()
    return experiments._oracle(cfg)


def cmd_classify(args):
    oracle = _oracle_from_args(args)
    x, y = args.point
    psi = float(oracle.profile.value(x))
    if abs(y - psi) > 1e-6 * (1.0 + abs(y)):
        raise ConfigError(
            "point (%g, %g) is not on the boundary graph; nearest "
            "ordinate is %g" % (x, y, psi))
    p = CPoint(complex(x, 0.0), complex(psi, 0.0))
    rep = goldilocks.classify_point(oracle, p, eps=args.eps)
    print("point: (%g, %g)" % (x, psi))
    print("summary: %s" % rep.summary)
    for tag, v in (("strongly_non_goldilocks", rep.strongly_non_goldilocks),
                   ("weakly_goldilocks", rep.weakly_goldilocks),
                   ("local_goldilocks", rep.local_goldilocks)):
        print("%-24s %-12s value=%-12.6g p_est=%-8.4g levels=%d" %
              (tag, v.status, v.value, v.p_estimate, v.levels))
    if args.out:
        report = experiments.ExperimentReport(
            kind="classify",
            environment=experiments._environment(
                experiments.ExperimentConfig()),
            classification={
                "summary": rep.summary,
                "strongly_non_goldilocks": experiments._verdict_dict(
                    rep.strongly_non_goldilocks),
                "weakly_goldilocks": experiments._verdict_dict(
                    rep.weakly_goldilocks),
                "local_goldilocks": experiments._verdict_dict(
                    rep.local_goldilocks),
                "distance_growth_condition":
                    rep.distance_growth_condition,
            })
        for path in experiments.emit(report, outdir=args.out):
            print("wrote %s" % path)
    return EXIT_OK


def cmd_geodesic(args):
    oracle = _oracle_from_args(args)
    pred = geodesics.predicted_terminal_depth(
        oracle.profile, args.c, args.f0, dir_scale=args.span,
        height_cap=args.height_cap)
    print("predicted terminal depth: %.10g (%s)" %
          (pred.depth, pred.status))
    try:
        curve = geodesics.construct_tangential_geodesic(
            oracle, args.c, args.f0, span=args.span,
            height_cap=args.height_cap)
    except EscapedDepthCap as exc:
        print("status: %s (%s)" % (geodesics.STATUS_ESCAPED, exc))
        return EXIT_OK
    print("status: %s" % geodesics.STATUS_REACHED)
    print("terminal depth: %.10g" % float(curve.points[-1, 2]))
    print("max boundary distance: %.10g" %
          geodesics.max_boundary_distance(oracle, curve))
    print("endpoint face distance: %.10g" %
          geodesics.endpoint_face_distance(oracle, curve))
    cert = geodesics.certify_lambda_geodesic(
        oracle, curve, args.lambda_target, args.eps_target)
    print("certificate: %s (lambda=%g, eps=%g, sup ratio=%.6g)" %
          (cert.status, cert.lambda_target, cert.eps_target,
           cert.observed_sup_ratio))
    return EXIT_OK


def _run_config_command(args, runner):
    cfg = experiments.parse_config(args.config)
    if args.out:
        cfg.outdir = args.out
    report = runner(cfg)
    for path in experiments.emit(report):
        print("wrote %s" % path)
    for check in report.checks:
        print("check %-36s %s" %
              (check["name"], "pass" if check["passed"] else "FAIL"))
    if report.classification:
        print("classification: %s" % report.classification["summary"])
    if report.errors:
        for err in report.errors:
            print("error: %s" % err, file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_visibility_run(args):
    return _run_config_command(args, experiments.run_visibility_family)


def cmd_counterexample(args):
    return _run_config_command(args, experiments.run_counterexample_suite)


def cmd_kdist(args):
    oracle = _oracle_from_args(args)
    u1, v1 = args.src
    u2, v2 = args.dst
    z = CPoint(complex(0.0, u1), complex(v1, 0.0))
    w = CPoint(complex(0.0, u2), complex(v2, 0.0))
    for name, p in (("from", z), ("to", w)):
        if not oracle.contains(p):
            raise ConfigError("--%s point is not inside the domain" % name)
    lower = metric.kdist_lower(oracle, z, w)
    u_lo = min(u1, u2) - 0.5
    u_hi = max(u1, u2) + 0.5
    v_min = 0.45 * min(v1, v2)
    v_top = 2.0 * max(v1, v2)
    grid = metric.build_distance_grid(oracle, "model", (u_lo, u_hi),
                                      (v_min, v_top), args.h)
    upper = metric.kdist_upper_graph(oracle, z, w, grid)
    print("points: (i*%g, %g) -> (i*%g, %g)" % (u1, v1, u2, v2))
    print("certified lower: %.10g" % lower)
    print("certified upper: %.10g   (graph, h=%g, %d nodes)" %
          (upper, args.h, grid.n_nodes))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kobalab",
        description="certified invariant-metric experiments on convex "
                    "model domains")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify",
                       help="classify a boundary point's gauge integrals")
    _add_profile_args(p)
    p.add_argument("--point", type=_pair, required=True, metavar="X,Y",
                   help="boundary point (x, psi(x)); y must match psi(x)")
    p.add_argument("--eps", type=float, default=1e-2)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("geodesic",
                       help="build one tangential curve and certify it")
    _add_profile_args(p)
    p.add_argument("--f0", type=float, required=True,
                   help="launch height above the boundary")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--span", type=float, default=1.0)
    p.add_argument("--height-cap", type=float,
                   default=geodesics.DEFAULT_HEIGHT_CAP, dest="height_cap")
    p.add_argument("--lambda", type=float, default=4.2,
                   dest="lambda_target")
    p.add_argument("--eps-target", type=float, default=0.0,
                   dest="eps_target")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("visibility-run",
                       help="run a curve family from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_visibility_run)

    p = sub.add_parser("counterexample",
                       help="run the chord-profile suite from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("kdist",
                       help="certified distance bounds between two "
                            "model-slice points")
    _add_profile_args(p)
    p.add_argument("--from", type=_pair, required=True, metavar="U,V",
                   dest="src", help="point (i*u, v)")
    p.add_argument("--to", type=_pair, required=True, metavar="U,V",
                   dest="dst", help="point (i*u, v)")
    p.add_argument("--h", type=float, default=0.05,
                   help="graph spacing parameter")
    p.set_defaults(func=cmd_kdist)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OutsideDomain, ZeroDirection) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except KobalabError as exc:
        print("numeric failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
