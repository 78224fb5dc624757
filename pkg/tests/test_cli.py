import io
import json
import os
import subprocess
import sys

import pytest

from ncgcurv.cli import SCHEMA, run


def _run(argv):
    buf = io.StringIO()
    code = run(argv, out=buf)
    return code, buf.getvalue()


def _json(argv):
    code, text = _run(argv + ["--json", "-"])
    return code, json.loads(text), text


def test_check_all_torus_symbolic():
    code, rep, _ = _json(["check-all", "--geometry", "torus", "--symbolic"])
    assert code == 0 and rep["passed"]
    assert rep["schema"] == SCHEMA
    assert rep["theta"] == "symbolic"
    for mode in rep["summary"]["r"].values():
        assert set(mode.values()) == {"0"}


def test_scalar_sphere3_symbolic():
    code, rep, _ = _json(["scalar", "--geometry", "sphere3", "--symbolic"])
    assert code == 0
    assert rep["summary"]["r"] == {"classical": {"right": "6", "left": "6"}, "deformed": {"right": "6", "left": "6"}}
    for mode in rep["results"]["curvature"].values():
        assert all(set(e) == {"scalar_curvature"} for e in mode.values())


def test_deform_verify_sphere3_numeric():
    code, rep, _ = _json(["deform-verify", "--geometry", "sphere3", "--theta", "1/5"])
    assert code == 0
    assert rep["theta"] == "1/5"
    names = {c["name"] for c in rep["checks"]}
    assert {"t_theta_inner_product", "h_theta_coherence", "d_theta_naturality", "scalar_curvature_invariance"} <= names
    assert all(c["passed"] for c in rep["checks"])


def test_numeric_report_keeps_exact_strings():
    code, rep, _ = _json(["scalar", "-g", "sphere3", "--theta", "2/7"])
    assert code == 0
    r = rep["results"]["curvature"]["classical"]["right"]["scalar_curvature"]
    assert r["exact"] == "6" and abs(r["value"][0] - 6) < 1e-9


def test_failing_fixture_exits_one_and_still_reports(tmp_path):
    p = tmp_path / "rep.json"
    code, text = _run(["validate", "-g", "sabotage-corrupted-derivation", "--json", str(p)])
    assert code == 1
    rep = json.loads(p.read_text())
    assert not rep["passed"]
    bad = [c for c in rep["checks"] if not c["passed"]]
    assert bad[0]["name"] == "leibniz" and bad[0]["witness"]
    assert "FAIL" in text


@pytest.mark.parametrize(
    "argv",
    [
        ["scalar", "-g", "no-such-geometry"],
        ["scalar", "--theta", "one/five"],
        ["scalar", "--theta", "1/0"],
        ["frobnicate"],
        ["scalar", "--symbolic", "--theta", "1/5"],
    ],
)
def test_input_errors_exit_two(argv):
    code, _ = _run(argv)
    assert code == 2


def test_bad_pi_component_file(tmp_path):
    p = tmp_path / "pi.json"
    p.write_text("{not json")
    assert _run(["connection", "--pi-component", str(p)])[0] == 2


def test_pi_component_is_reported(tmp_path):
    p = tmp_path / "pi.json"
    p.write_text(json.dumps({"rank": 3, "legs": "FFF", "terms": [{"index": [0, 0, 0], "coeff": {"0,0": "1"}}]}))
    code, rep, _ = _json(["connection", "--pi-component", str(p)])
    assert code == 1
    assert rep["summary"]["A_is_zero"]["classical"] is False


def test_list():
    code, text = _run(["list"])
    assert code == 0
    assert "torus\tbuiltin" in text and "sphere3\tbuiltin" in text
    assert "sabotage-wrong-star" in text


def test_human_output_has_summary_line():
    code, text = _run(["ricci", "-g", "torus", "--quiet"])
    assert code == 0
    assert "checks passed in" in text
    assert "PASS" not in text


def test_same_seed_same_bytes():
    a = _run(["check-all", "-g", "sphere3", "--seed", "3", "--json", "-"])[1]
    b = _run(["check-all", "-g", "sphere3", "--seed", "3", "--json", "-", "--workers", "1"])[1]
    assert a == b


def test_bytes_independent_of_hash_seed(tmp_path):
    outs = []
    for hs in ("0", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=hs)
        r = subprocess.run(
            [sys.executable, "-m", "ncgcurv.cli", "weitzenbock", "-g", "torus", "--seed", "1", "--json", "-"],
            capture_output=True,
            env=env,
            check=True,
        )
        outs.append(r.stdout)
    assert outs[0] == outs[1]
