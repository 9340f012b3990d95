import csv
import json
import math
import subprocess
import sys

import pytest

from shiftspec.cli import (EXIT_CHECK, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_IO, EXIT_OK, dumps,
                           main, selftest_checks, validate_config)
from shiftspec.errors import ConfigError

CONST = {"weight": {"kind": "constant"}}
PLUS = {"domain": "unilateral", "weight": {"kind": "constant"}}
COS = {"offset": -1, "coeffs": [1, 0, 1]}


def run(tmp_path, task, cfg, *extra, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    code = main([task, "--config", str(p), "--out", str(out), *extra])
    return code, out


def report(out):
    return json.loads((out / "report.json").read_text())


def test_radius_task(tmp_path):
    code, out = run(tmp_path, "radius", {"space": {"weight": {"kind": "two_sided_exp", "alpha": 1}}})
    assert code == EXIT_OK
    r = report(out)["results"]
    assert r["forward"]["radius"][0] == pytest.approx(math.e, abs=1e-9)
    assert r["forward"]["radius"][1] == pytest.approx(math.e, abs=1e-9)
    assert r["region"]["rmin"] == pytest.approx(1 / math.e, abs=1e-9)


def test_radius_unbounded_is_inf_string(tmp_path):
    code, out = run(tmp_path, "radius", {"space": {"weight": {"kind": "piecewise_super_exp"}}})
    assert code == EXIT_OK
    r = report(out)["results"]
    assert r["forward"]["radius"] == ["inf", "inf"] and r["region"]["rmax"] == "inf"


def test_radius_csv(tmp_path):
    code, out = run(tmp_path, "radius", {"space": CONST}, "--format", "csv")
    rows = (out / "radius.csv").read_text().splitlines()
    assert rows == ["direction,lower,upper", "forward,1.0,1.0", "backward,1.0,1.0"]


def test_predict_task(tmp_path):
    cfg = {"space": CONST, "operator": {"kind": "multiplier", "phi": COS},
           "grids": {"radial": 1, "angular": 256}}
    code, out = run(tmp_path, "predict", cfg)
    assert code == EXIT_OK
    cloud = report(out)["results"]["cloud"]
    assert cloud["re_range"] == pytest.approx([-2, 2]) and abs(cloud["im_range"][1]) < 1e-14
    code, out = run(tmp_path, "predict", cfg, "--format", "csv")
    with open(out / "cloud.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["re", "im"] and len(rows) == 257


def test_verify_task(tmp_path):
    cfg = {"space": PLUS, "operator": {"kind": "shift", "k": 1}, "lambdas": [0.5, 0.9, 1.5],
           "expect": ["blowup-witness", "blowup-witness", "outside-bound"]}
    code, out = run(tmp_path, "verify", cfg)
    assert code == EXIT_OK
    certs = report(out)["results"]["certificates"]
    assert [c["verdict"] for c in certs] == cfg["expect"]
    code, out = run(tmp_path, "verify", cfg, "--format", "csv")
    rows = (out / "growth_0.csv").read_text().splitlines()
    assert rows[0] == "N,value" and len(rows) == 6


def test_verify_workers_agree(tmp_path):
    cfg = {"space": CONST, "operator": {"kind": "multiplier", "phi": COS},
           "lambdas": [3, [1, 1], 2.2]}
    _, o1 = run(tmp_path, "verify", cfg)
    a = report(o1)
    _, o2 = run(tmp_path, "verify", cfg, "--workers", "2")
    b = report(o2)
    assert a["results"] == b["results"]


def test_verify_check_failure(tmp_path):
    cfg = {"space": PLUS, "operator": {"kind": "shift", "k": 1}, "lambdas": [0.5],
           "expect": ["outside-bound"]}
    code, out = run(tmp_path, "verify", cfg)
    assert code == EXIT_CHECK and report(out)["failures"]


def test_joint_task_is_deterministic(tmp_path):
    cfg = {"spaces": [{"weight": {"kind": "geometric", "a": 2}}, CONST],
           "phi": {"entries": [[[1, 0], 1], [[0, 1], 1]]},
           "lambdas": [3.5, 0.5], "points": [[3, 1], [2, 0.5]],
           "expect": ["outside-bound", "outside-bound", "excluded", "excluded"],
           "samples": 4, "N": 30, "seed": 3, "grids": {"angular": 64}}
    code, o1 = run(tmp_path, "joint", cfg)
    assert code == EXIT_OK
    t1 = (o1 / "report.json").read_text()
    code, o2 = run(tmp_path, "joint", cfg, name="again.json")
    t2 = (o2 / "report.json").read_text()
    strip = lambda t: {k: v for k, v in json.loads(t).items() if k != "timing"}
    assert dumps(strip(t1)) == dumps(strip(t2))
    res = json.loads(t1)["results"]
    assert res["cloud"]["min_modulus"] == pytest.approx(1, abs=1e-2)
    assert all(r["residual"] < 0.5 for r in res["residuals"])


def test_conjecture_gap_task(tmp_path):
    cfg = {"space": PLUS, "operator": {"kind": "toeplitz", "phi": {"offset": 0, "coeffs": [1, 1]}},
           "lambda_grid": {"re": [-1, 3, 9], "im": [0, 0, 1]}, "grids": {"radial": 33, "angular": 256}}
    code, out = run(tmp_path, "conjecture-gap", cfg)
    assert code == EXIT_OK
    counts = report(out)["results"]["counts"]
    assert counts["both"] == 0 and sum(counts.values()) == 9
    assert counts["certified"] >= 4


def test_exit_codes(tmp_path):
    code, _ = run(tmp_path, "radius", {"space": {"weight": {"kind": "cubic"}}})
    assert code == EXIT_CONFIG
    code, _ = run(tmp_path, "verify", {"space": CONST, "operator": {"kind": "shift", "k": 1}})
    assert code == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["radius", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["radius", "--config", str(tmp_path / "missing.json")]) == EXIT_IO
    cfg = {"space": {"weight": {"kind": "piecewise_super_exp"}},
           "operator": {"kind": "shift", "k": 1}, "lambdas": [2]}
    code, _ = run(tmp_path, "verify", cfg)
    assert code == EXIT_HYPOTHESIS
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _ = run(tmp_path, "radius", {"space": CONST}, "--out", str(blocker / "sub"))
    assert code == EXIT_IO


def test_validate_config_cross_fields():
    with pytest.raises(ConfigError):
        validate_config({"task": "predict", "space": CONST}, "radius")
    with pytest.raises(ConfigError):
        validate_config({"space": CONST, "operator": {"kind": "shift", "k": 1},
                         "lambdas": [1, 2], "expect": ["inconclusive"]}, "verify")
    assert validate_config({"space": CONST}, "radius")


def test_selftest():
    assert all(ok for _, ok, _ in selftest_checks())


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "shiftspec", "selftest", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.count("PASS") == 6
