"""Timing comparison between the compiled kernel extension and the pure
python reference backend.

Both implementations are imported directly (bypassing the import-time
backend selection), run on identical workloads, and checked for
agreement while being timed.  Run from the repository root:

    python benchmarks/bench_kernels.py [--scale 1.0] [--repeat 3]
"""

import argparse
import time

import numpy as np

from kobalab import profiles
from kobalab._core import kernels_py

try:
    from kobalab._core import _kernels as compiled
except ImportError:
    compiled = None

DEPTH_CAP = 10.0


def _workloads(scale):
    rng = np.random.default_rng(1729)
    base = profiles.exp_power(0.5, 1.0)
    smooth = profiles.exp_power(1.0, 1.0)
    mo = profiles.mollify(profiles.build_piecewise_max(base))

    n_eval = int(20000 * scale)
    n_inv = int(4000 * scale)
    n_bd = int(600 * scale)
    n_scan = int(300 * scale)
    n_kap = int(4000 * scale)

    xs = rng.uniform(-0.6, 0.6, n_eval)
    ys = np.exp(rng.uniform(np.log(1e-12), np.log(1e-2), n_inv))
    bd_x0 = rng.uniform(-0.5, 0.5, n_bd)
    bd_b = np.exp(rng.uniform(np.log(1e-6), np.log(0.5), n_bd))
    sc_x0 = rng.uniform(-0.4, 0.4, n_scan)
    sc_b = np.exp(rng.uniform(np.log(1e-6), np.log(0.5), n_scan)) + \
        np.abs(sc_x0)
    ang = rng.uniform(0.0, np.pi, n_scan)
    ph = rng.uniform(0.0, np.pi, n_scan)
    sc_a1 = np.cos(ang) * np.cos(ph)
    sc_b1 = np.cos(ang) * np.sin(ph)
    sc_a2 = np.sin(ang)
    sc_b2 = np.zeros(n_scan)
    kp = {
        "x0s": rng.uniform(-0.5, 0.5, n_kap),
        "bs": np.exp(rng.uniform(np.log(1e-6), np.log(0.5), n_kap)) + 0.7,
        "a1s": rng.normal(size=n_kap), "b1s": rng.normal(size=n_kap),
        "a2s": rng.normal(size=n_kap), "b2s": rng.normal(size=n_kap),
    }

    return [
        ("eval smooth", smooth,
         lambda m, pf: m.eval_profile_batch(pf.params, pf.kind_id, xs)),
        ("eval mollified", mo,
         lambda m, pf: m.eval_profile_batch(pf.params, pf.kind_id, xs)),
        ("inverse mollified", mo,
         lambda m, pf: m.inverse_profile_batch(pf.params, pf.kind_id, ys)),
        ("boundary dist smooth", smooth,
         lambda m, pf: m.boundary_distance_batch(pf.params, pf.kind_id,
                                                 bd_x0, bd_b)),
        ("boundary dist mollified", mo,
         lambda m, pf: m.boundary_distance_batch(pf.params, pf.kind_id,
                                                 bd_x0, bd_b)),
        ("scan mollified", mo,
         lambda m, pf: m.directional_distance_scan_batch(
             pf.params, pf.kind_id, sc_x0, sc_b, sc_a1, sc_b1, sc_a2,
             sc_b2, DEPTH_CAP)),
        ("segment kappa smooth", smooth,
         lambda m, pf: m.segment_kappa_batch(
             pf.params, pf.kind_id, kp["x0s"], kp["bs"], kp["a1s"],
             kp["b1s"], kp["a2s"], kp["b2s"], 0.5, DEPTH_CAP)),
    ]


def _time(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _max_rel(a, b):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    fin = np.isfinite(a) & np.isfinite(b)
    if not np.array_equal(np.isfinite(a), np.isfinite(b)):
        return np.inf
    scale = np.maximum(np.abs(a[fin]), np.abs(b[fin])) + 1e-300
    return float(np.max(np.abs(a[fin] - b[fin]) / scale)) if fin.any() \
        else 0.0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=float, default=1.0,
                    help="multiply all workload sizes")
    ap.add_argument("--repeat", type=int, default=3,
                    help="timing repetitions (best-of)")
    args = ap.parse_args()

    if compiled is None:
        print("compiled backend is not available; timing python only")
    rows = []
    for name, pf, call in _workloads(args.scale):
        t_py, out_py = _time(lambda: call(kernels_py, pf), args.repeat)
        if compiled is None:
            rows.append((name, t_py, None, None))
            continue
        t_c, out_c = _time(lambda: call(compiled, pf), args.repeat)
        rel = _max_rel(out_py, out_c)
        rows.append((name, t_py, t_c, rel))

    print("%-26s %10s %10s %8s %10s" %
          ("kernel", "python", "compiled", "speedup", "max rel"))
    for name, t_py, t_c, rel in rows:
        if t_c is None:
            print("%-26s %9.1fms %10s %8s %10s" %
                  (name, 1e3 * t_py, "-", "-", "-"))
        else:
            print("%-26s %9.1fms %9.1fms %7.1fx %10.1e" %
                  (name, 1e3 * t_py, 1e3 * t_c, t_py / t_c, rel))


if __name__ == "__main__":
    main()
