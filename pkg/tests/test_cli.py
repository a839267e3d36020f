import os

import pytest

from kobalab import cli


def test_geodesic_ok(capsys):
    rc = cli.main(["geodesic", "--f0", "1e-6"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "Certified" in out
    assert "terminal depth: 0.006204736" in out


def test_geodesic_escaped(capsys):
    rc = cli.main(["geodesic", "--f0", "1e-9", "--alpha", "0.5"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "Escaped" in out


def test_kdist_ok(capsys):
    rc = cli.main(["kdist", "--from", "0.2,0.3", "--to", "0.8,0.1"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "certified lower: 0.549306" in out
    assert "certified upper:" in out


def test_kdist_outside_domain(capsys):
    rc = cli.main(["kdist", "--from", "0.2,-0.5", "--to", "0.8,0.1"])
    assert rc == 2
    assert "config error" in capsys.readouterr().err


def test_classify_off_boundary(capsys):
    rc = cli.main(["classify", "--point", "0.25,0.5"])
    assert rc == 2
    assert "boundary" in capsys.readouterr().err


def test_counterexample_wrong_profile(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("profile = exp_power\n")
    rc = cli.main(["counterexample", "--config", str(cfg)])
    assert rc == 2


def test_missing_config_is_io_error(capsys):
    rc = cli.main(["visibility-run", "--config", "/no/such/file.cfg"])
    assert rc == 4
    assert "i/o error" in capsys.readouterr().err


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("unknown_thing = 1\n")
    rc = cli.main(["visibility-run", "--config", str(cfg)])
    assert rc == 2


def test_visibility_run_end_to_end(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("f0 = 1e-2, 1e-3, 1e-4\n")
    out = tmp_path / "artifacts"
    rc = cli.main(["visibility-run", "--config", str(cfg),
                   "--out", str(out)])
    assert rc == 0
    for name in ("report.json", "curves.csv", "gromov.csv"):
        assert os.path.exists(os.path.join(str(out), name))
    assert "wrote" in capsys.readouterr().out


def test_no_subcommand_exits_two():
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2


def test_bad_pair_argument():
    with pytest.raises(SystemExit) as exc:
        cli.main(["kdist", "--from", "zap", "--to", "0.8,0.1"])
    assert exc.value.code == 2
