import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from ultraspace.cli import dumps, main

CONFIGS = Path(__file__).resolve().parent.parent / "demos" / "configs"
EXPECTED_EXIT = {
    "audit_empty": 0, "audit_gevrey2": 0, "audit_gevrey2_weight": 0, "audit_log1p": 1, "conjugate_gevrey2": 0,
    "expand_h0_beurling": 0, "expand_random_roumieu": 0, "expand_zero": 0,
    "nuclearity_exp_p3_beurling": 1, "nuclearity_factorial_beurling": 0, "nuclearity_gevrey2_roumieu": 0,
}


def run(tmp_path, name, config, *extra):
    cfg = tmp_path / f"{name}.json"
    cfg.write_text(json.dumps(config))
    out = tmp_path / f"out_{name}"
    return main([name.split("_")[0], "--config", str(cfg), "--out", str(out), *extra]), out


def demo(name, out, *extra):
    return main([name.split("_")[0], "--config", str(CONFIGS / f"{name}.json"), "--out", str(out), *extra])


@pytest.mark.parametrize("name", sorted(EXPECTED_EXIT))
def test_demo_exit_codes(name, tmp_path):
    assert demo(name, tmp_path) == EXPECTED_EXIT[name]
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["schema"] == 1 and report["command"] == name.split("_")[0]
    assert set(report["summary"]["counts"]) <= {"VERIFIED", "VIOLATED", "INCONCLUSIVE"}


def test_conjugate_values(tmp_path):
    assert demo("conjugate_gevrey2", tmp_path) == 0
    with open(tmp_path / "conjugate.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["s", "phi_star", "argmax_t"]
    assert len(rows) == 102
    table = {float(r[0]): float(r[1]) for r in rows[1:]}
    # phi*(1) for omega = sqrt(t): 2 log 2 - 1
    assert table[1.0] == pytest.approx(2 * math.log(2) - 1, rel=1e-6)


def test_csv_headers(tmp_path):
    demo("audit_gevrey2", tmp_path / "a")
    demo("expand_random_roumieu", tmp_path / "e")
    demo("nuclearity_gevrey2_roumieu", tmp_path / "n")
    heads = {p: (tmp_path / p).read_text().splitlines()[0] for p in
             ("a/witnesses.csv", "e/coefficients.csv", "e/margins.csv", "n/series.csv")}
    assert heads == {"a/witnesses.csv": "condition,verdict,witness,value",
                     "e/coefficients.csv": "gamma,re,im,abs",
                     "e/margins.csv": "check,verdict,log_margin",
                     "n/series.csv": "j,ell,order,log_mass"}


@pytest.mark.parametrize("name", ["audit_gevrey2", "expand_random_roumieu", "nuclearity_gevrey2_roumieu",
                                  "conjugate_gevrey2"])
def test_determinism_across_threads(name, tmp_path):
    demo(name, tmp_path / "one", "--threads", "1", "--seed", "3")
    demo(name, tmp_path / "two", "--threads", "1", "--seed", "3")
    for f in sorted((tmp_path / "one").iterdir()):
        assert f.read_bytes() == (tmp_path / "two" / f.name).read_bytes()
    demo(name, tmp_path / "four", "--threads", "4", "--seed", "3")
    for f in sorted((tmp_path / "one").iterdir()):
        if f.suffix == ".csv":
            assert f.read_bytes() == (tmp_path / "four" / f.name).read_bytes()


def test_seed_changes_random_expansion(tmp_path):
    demo("expand_random_roumieu", tmp_path / "a", "--seed", "1")
    demo("expand_random_roumieu", tmp_path / "b", "--seed", "2")
    assert (tmp_path / "a/coefficients.csv").read_bytes() != (tmp_path / "b/coefficients.csv").read_bytes()


@pytest.mark.parametrize("config", [
    {"schema": 2},
    {"schema": 1, "subject": {"fixture": "nope"}, "conditions": ["log_convex"]},
    {"schema": 1, "subject": {"kind": "sequence", "sequence": {"kind": "mystery"}}, "conditions": []},
    [1, 2],
])
def test_bad_configs_exit_2(config, tmp_path):
    assert run(tmp_path, "audit_bad", config)[0] == 2


def test_missing_config_and_bad_threads(tmp_path, capsys):
    assert main(["audit", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 2
    assert demo("audit_empty", tmp_path, "--threads", "0") == 2
    assert "error" in capsys.readouterr().err


def test_invalid_weight_for_conjugate(tmp_path):
    bad = {"schema": 1, "weight": {"kind": "table", "points": [[0, 0], [1, 2], [2, 1]]}, "s_max": 5}
    assert run(tmp_path, "conjugate_bad", bad)[0] == 2


def test_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("ULTRASPACE_CONJUGATE_POINTS", "11")
    assert demo("conjugate_gevrey2", tmp_path) == 0
    assert len((tmp_path / "conjugate.csv").read_text().splitlines()) == 12
    monkeypatch.setenv("ULTRASPACE_CONJUGATE_POINTS", "many")
    assert demo("conjugate_gevrey2", tmp_path) == 2


def test_dumps_format():
    text = dumps({"b": math.inf, "a": [0.1, -math.inf, math.nan], "c": True})
    assert json.loads(text) == {"a": [0.1, "-inf", "nan"], "b": "inf", "c": True}
    assert text.index('"a"') < text.index('"b"')


def test_console_script(tmp_path):
    cmd = [sys.executable, "-m", "ultraspace.cli", "audit", "--config", str(CONFIGS / "audit_log1p.json"),
           "--out", str(tmp_path)]
    proc = subprocess.run(cmd, capture_output=True, text=True, timeout=100)
    assert proc.returncode == 1
    assert (tmp_path / "report.json").exists()
