import dataclasses
import hashlib
import json

import numpy as np
import pytest

from kobalab import experiments
from kobalab.errors import ConfigError

CURVES_HEADER = "f0,D,max_delta,lambda_target,sup_ratio,status," \
    "endpoint_face_dist"


def _write_config(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_parse_config_roundtrip(tmp_path):
    path = _write_config(tmp_path / "run.cfg", [
        "# comment line",
        "config_version = 1",
        "profile = exp_power",
        "alpha = 1.0",
        "c = 1.0   # trailing comment",
        "f0 = 1e-2, 1e-3, 1e-4",
        "pair_grid = 32",
        "seed = 7",
    ])
    cfg = experiments.parse_config(path)
    assert cfg.f0 == (1e-2, 1e-3, 1e-4)
    assert cfg.pair_grid == 32
    assert cfg.seed == 7
    assert cfg.lambda_target == 4.2  # default preserved


@pytest.mark.parametrize("bad", [
    ["nonsense_key = 3"],
    ["alpha = not_a_number"],
    ["alpha = 1", "alpha = 2"],
    ["f0 = 1e-3, 1e-2"],
    ["f0 = "],
    ["config_version = 2"],
    ["just a line without equals"],
    ["workers = 0"],
    ["eps_target = -0.5"],
])
def test_parse_config_rejects(tmp_path, bad):
    path = _write_config(tmp_path / "bad.cfg", bad)
    with pytest.raises(ConfigError):
        experiments.parse_config(path)


def test_config_validate_direct():
    with pytest.raises(ConfigError):
        experiments.ExperimentConfig(profile="nope").validate()
    with pytest.raises(ConfigError):
        experiments.ExperimentConfig(f0=()).validate()
    with pytest.raises(ConfigError):
        experiments.ExperimentConfig(grid_u_lo=1.0, grid_u_hi=0.0).validate()


@pytest.fixture(scope="module")
def family_report():
    cfg = experiments.ExperimentConfig(f0=(1e-2, 1e-3, 1e-4))
    return experiments.run_visibility_family(cfg)


def test_family_curves(family_report):
    rep = family_report
    assert rep.errors == []
    assert len(rep.curves) == 3
    for rec in rep.curves:
        assert rec["status"] == "Reached"
        assert rec["certificate"]["status"] == "Certified"
        pred = rec["predicted_depth"]["value"]
        got = rec["terminal_depth"]["value"]
        assert abs(got - pred) / pred < 1e-6
        np.testing.assert_allclose(rec["endpoint_face_distance"], got,
                                   rtol=1e-12)
        assert rec["max_boundary_distance"]["bound"] == "lower"


def test_family_gromov_series(family_report):
    g = family_report.gromov
    assert g["bound"] == "lower"
    assert g["f0"] == [1e-2, 1e-3, 1e-4]
    assert len(g["lower"]) == len(g["balanced_tau"]) == 3
    assert all(b > a for a, b in zip(g["lower"], g["lower"][1:]))
    assert "growth diagnostic" in g["note"]


def test_family_escape_control():
    cfg = experiments.ExperimentConfig(alpha=0.5, f0=(1e-2, 1e-9))
    rep = experiments.run_visibility_family(cfg)
    assert [r["status"] for r in rep.curves] == ["Escaped", "Escaped"]
    assert rep.errors == []
    assert rep.gromov["f0"] == []


def test_family_workers_deterministic():
    cfg1 = experiments.ExperimentConfig(f0=(1e-2, 1e-3, 1e-4), workers=1)
    cfg2 = experiments.ExperimentConfig(f0=(1e-2, 1e-3, 1e-4), workers=3)
    r1 = experiments.run_visibility_family(cfg1)
    r2 = experiments.run_visibility_family(cfg2)
    assert r1.curves == r2.curves
    assert r1.gromov == r2.gromov


def test_environment_block(family_report):
    env = family_report.environment
    for key in ("python", "numpy", "scipy", "backend", "seed",
                "tolerances"):
        assert key in env
    assert not any("time" in k or "date" in k for k in env)


def test_counterexample_requires_chord_profile():
    cfg = experiments.ExperimentConfig(profile="exp_power")
    with pytest.raises(ConfigError):
        experiments.run_counterexample_suite(cfg)


def test_emit_deterministic(tmp_path, family_report):
    out1 = experiments.emit(family_report, outdir=str(tmp_path / "a"))
    out2 = experiments.emit(family_report, outdir=str(tmp_path / "b"))
    assert [p.rsplit("/", 1)[1] for p in out1] == \
        [p.rsplit("/", 1)[1] for p in out2]
    for a, b in zip(out1, out2):
        ha = hashlib.sha256(open(a, "rb").read()).hexdigest()
        hb = hashlib.sha256(open(b, "rb").read()).hexdigest()
        assert ha == hb


def test_emit_json_schema(tmp_path, family_report):
    path = experiments.emit(family_report, outdir=str(tmp_path),
                            formats=("json",))[0]
    payload = json.load(open(path))
    assert payload["schema_version"] == 1
    assert payload["kind"] == "visibility_family"
    assert list(payload) == sorted(payload)
    assert len(payload["curves"]) == 3


def test_emit_curves_csv(tmp_path, family_report):
    paths = experiments.emit(family_report, outdir=str(tmp_path))
    curves = [p for p in paths if p.endswith("curves.csv")][0]
    lines = open(curves).read().splitlines()
    assert lines[0] == CURVES_HEADER
    assert len(lines) == 1 + 3
    first = lines[1].split(",")
    assert float(first[0]) == 1e-2
    assert first[5] == "Certified"


def test_emit_csv_escaped_rows(tmp_path):
    cfg = experiments.ExperimentConfig(alpha=0.5, f0=(1e-2, 1e-3))
    rep = experiments.run_visibility_family(cfg)
    paths = experiments.emit(rep, outdir=str(tmp_path))
    curves = [p for p in paths if p.endswith("curves.csv")][0]
    lines = open(curves).read().splitlines()
    row = lines[1].split(",")
    assert row[1] == ""  # no terminal depth for an escaped run
    assert row[5] == "Escaped"
    assert not any(p.endswith("gromov.csv") for p in paths)


def test_halfplane_validation_small():
    out = experiments.run_halfplane_validation(hs=(0.1, 0.05), n_pairs=6)
    errs = [np.asarray(e) for e in out["rel_error"]]
    assert np.all(errs[0] > 0.0)  # graph bounds stay above the truth
    assert np.all(errs[1] <= errs[0] + 1e-12)
    assert np.max(errs[1]) < 0.10
    assert out["nodes"][1] > out["nodes"][0]


def test_balanced_validation_small():
    out = experiments.run_balanced_validation(n=10)
    assert len(out["tau"]) == 10
    assert np.min(out["h0"]) >= 1.0 - 1e-12
    assert np.max(out["h1"]) <= 1.0 + 1e-12
    assert np.min(out["slack"]) >= -1e-9


def test_config_dataclass_is_flat():
    for f in dataclasses.fields(experiments.ExperimentConfig):
        assert f.type in (int, float, str, tuple)
