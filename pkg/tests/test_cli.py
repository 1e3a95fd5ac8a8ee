import json

import pytest

from planarspin.cli import RunConfig, main
from planarspin.errors import ConfigError


def _config(tmp_path, **data):
    data.setdefault("t_span", [0.0, 1.0])
    data.setdefault("step", 1e-2)
    data.setdefault("out", str(tmp_path / "out"))
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_config_mu_or_pair():
    assert RunConfig.from_dict({"m0": 1.0, "s3": 0.5}).mu == 2.0
    for bad in ({"mu": 1.0, "m0": 1.0, "s3": 1.0}, {"m0": 1.0}, {"t_span": [1, 0]}, {"step": 0}, {"method": "euler"}):
        with pytest.raises(ConfigError):
            RunConfig.from_dict(bad)


def test_simulate_writes_outputs(tmp_path, capsys):
    assert main(["simulate", "--config", _config(tmp_path, mu=1.0)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["curvature_relative_drift"] < 1e-6
    out = tmp_path / "out"
    assert (out / "trajectory.csv").read_text().startswith("t,x1,x2,v1,v2,vp1,vp2\n")
    assert json.loads((out / "manifest.json").read_text())["mu"] == 1.0


def test_simulate_rest(tmp_path, capsys):
    cfg = _config(tmp_path, mu=1.0, initial={"x": [1, 2], "v": [0, 0], "vp": [0, 0]})
    assert main(["simulate", "--config", cfg, "--format", "json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["H_relative_drift"] == 0 and summary["p_drift"] == 0 and summary["curvature"] == 0
    rows = json.loads((tmp_path / "out" / "trajectory.json").read_text())
    assert all(r["x1"] == 1 and r["x2"] == 2 for r in rows)


def test_simulate_superluminal(tmp_path, capsys):
    assert main(["simulate", "--config", _config(tmp_path, initial={"v": [1.0, 0.0]})]) == 2
    assert "SuperluminalVelocity" in capsys.readouterr().err


def test_bad_invocations(tmp_path):
    assert main(["launch"]) == 2
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2


def test_verify_helmholtz_and_mutation(tmp_path, capsys):
    cfg = _config(tmp_path, mu=1.0)
    assert main(["verify", "--config", cfg, "--suite", "helmholtz"]) == 0
    assert main(["verify", "--config", cfg, "--suite", "helmholtz", "--mutate", "skew_b", "--format", "csv"]) == 1
    report = json.loads((tmp_path / "out" / "verify_helmholtz.json").read_text())
    assert report["failed_checks"] == ["condition_ii"]
    assert (tmp_path / "out" / "verify_helmholtz.csv").exists()
    assert "FAIL helmholtz.condition_ii" in capsys.readouterr().out


def test_verify_is_deterministic(tmp_path):
    cfg = _config(tmp_path, mu=1.0)
    texts = []
    for _ in range(2):
        assert main(["verify", "--config", cfg, "--suite", "symmetry", "--seed", "7"]) == 0
        texts.append((tmp_path / "out" / "verify_symmetry.json").read_bytes())
    assert texts[0] == texts[1]


def test_compare(tmp_path, capsys):
    cfg = _config(tmp_path, mu=1.0)
    assert main(["compare", "--config", cfg]) == 0
    assert json.loads(capsys.readouterr().out)["max_deviation"] < 1e-6
    assert (tmp_path / "out" / "canonical.csv").read_text().startswith("t,x1,x2,p1,p2,pp1,pp2,H\n")
    assert main(["compare", "--config", cfg, "--canonical-mu", "1.5"]) == 1
    assert json.loads(capsys.readouterr().out)["max_deviation"] > 1e-2


def test_compare_rest(tmp_path, capsys):
    cfg = _config(tmp_path, mu=1.0, initial={"v": [0, 0], "vp": [0, 0]})
    assert main(["compare", "--config", cfg]) == 0
    assert json.loads(capsys.readouterr().out)["max_deviation"] == 0.0
