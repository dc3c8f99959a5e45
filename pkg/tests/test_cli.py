import json

import numpy as np
import pytest

from kdvlab.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, cli_entry, parse_init
from kdvlab.spectral import cosine_mode, sine_mode


def test_parse_init_forms():
    single = parse_init("c1")
    assert np.allclose(single.modes, cosine_mode(1).modes)
    combo = parse_init("c1+0.5*c2-0.25*s3")
    expect = cosine_mode(1, 3) + 0.5 * cosine_mode(2, 3) + (-0.25) * sine_mode(3)
    assert np.allclose(combo.modes, expect.modes)
    spaced = parse_init(" 2*s1 - c2 ")
    expect2 = 2.0 * sine_mode(1, 2) + (-1.0) * cosine_mode(2)
    assert np.allclose(spaced.modes, expect2.modes)
    for bad in ("", "q3", "c0", "c1*2"):
        with pytest.raises(ValueError):
            parse_init(bad)


def test_solve_writes_outputs(tmp_path, capsys):
    out = tmp_path / "solve"
    rc = cli_entry(
        ["solve", "--modes", "32", "--dt", "1e-3", "--t", "0.5",
         "--init", "c1", "--out", str(out)]
    )
    assert rc == EXIT_OK
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,l2_norm,hamiltonian,linf_norm,mean"
    assert len(lines) == 21
    report = json.loads((out / "conserved_report.json").read_text())
    assert report["l2_rel_drift"] < 1e-8
    assert report["mean_abs_drift"] == 0.0
    printed = json.loads(capsys.readouterr().out)
    assert printed["l2_rel_drift"] == report["l2_rel_drift"]


def test_sample_and_inspect(tmp_path, capsys):
    path = tmp_path / "g.kdve"
    rc = cli_entry(["sample", "--measure", "gibbs", "--modes", "8", "--n", "128",
                    "--seed", "3", "--out", str(path)])
    assert rc == EXIT_OK
    info = json.loads(capsys.readouterr().out)
    assert info["n"] == 128 and info["kappa"] > 0
    rc = cli_entry(["inspect", "--file", str(path)])
    assert rc == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["modes"] == 8 and summary["resampled"] is False


def test_distance_zero_and_outputs(tmp_path, capsys):
    path = tmp_path / "a.kdve"
    cli_entry(["sample", "--measure", "gaussian", "--modes", "6", "--n", "32",
               "--seed", "1", "--out", str(path)])
    capsys.readouterr()
    out = tmp_path / "dist"
    rc = cli_entry(["distance", "--a", str(path), "--b", str(path),
                    "--s", "0.25", "--p", "2", "--out", str(out)])
    assert rc == EXIT_OK
    printed = json.loads(capsys.readouterr().out)
    assert printed["distance"] == 0.0
    saved = json.loads((out / "distance.json").read_text())
    assert saved["distance"] == 0.0
    assert (out / "plan.csv").read_text().splitlines()[0] == "i,j,mass,cost"


def test_experiment_subcommand(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "experiment = tails\nmeasure = gaussian\nmodes = 8\nensemble_size = 1024\nseed = 2\n"
    )
    out = tmp_path / "run"
    rc = cli_entry(["experiment", "--config", str(cfg), "--out", str(out)])
    assert rc == EXIT_OK
    assert (out / "report.json").exists()
    printed = json.loads(capsys.readouterr().out)
    assert printed["experiment"] == "tails"
    # the positional name overrides the config key
    rc = cli_entry(["experiment", "galerkin", "--config", str(cfg), "--out", str(tmp_path / "g")])
    assert rc == EXIT_OK
    assert json.loads(capsys.readouterr().out)["experiment"] == "galerkin"


def test_exit_codes(tmp_path, capsys):
    assert cli_entry(["bogus"]) == EXIT_USAGE
    assert cli_entry(["solve", "--unknown-flag", "1"]) == EXIT_USAGE
    assert cli_entry(["inspect", "--file", str(tmp_path / "missing.kdve")]) == EXIT_IO
    bad_cfg = tmp_path / "bad.cfg"
    bad_cfg.write_text("experiment = bogus\n")
    assert cli_entry(["experiment", "--config", str(bad_cfg)]) == EXIT_CONFIG
    assert cli_entry(["solve", "--t", "0.1", "--init", "zzz"]) == EXIT_NUMERIC
    err = capsys.readouterr().err.strip().splitlines()
    for line in err:
        payload = json.loads(line)
        assert set(payload) == {"error", "message"}


def test_env_thread_fallback(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "experiment = tails\nmeasure = gaussian\nmodes = 6\nensemble_size = 512\nseed = 2\n"
    )
    monkeypatch.setenv("KDV_TRANSPORT_THREADS", "2")
    rc = cli_entry(["experiment", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert rc == EXIT_OK
