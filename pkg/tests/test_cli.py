import hashlib
import json
import subprocess
import sys
from pathlib import Path

import pytest

from noohi.cli import BAD_INPUT, INCONCLUSIVE, OK, VIOLATION, RunConfig, main
from noohi.errors import InputError

DATA = Path(__file__).parent / "data"


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.lstrip().startswith("{") else out)


def test_homcount_free_group(capsys):
    code, rep = _run(capsys, "homcount", DATA / "free2.json", "--groups", "S3", "Z3")
    assert code == OK and rep["result"]["homcounts"] == {"S3": 36, "Z3": 9}


def test_homcount_complex_input(capsys):
    code, rep = _run(capsys, "homcount", DATA / "nodal_s3.json", "--groups", "Z2")
    assert code == OK and rep["result"]["homcounts"]["Z2"] > 0


def test_equiv_detects_different_groups(capsys):
    code, rep = _run(capsys, "equiv", DATA / "z.json", DATA / "z2.json")
    assert code == VIOLATION
    assert rep["result"]["verdict"] == "inconsistent" and rep["result"]["counts"]["Z3"] == [3, 1]
    code, rep = _run(capsys, "equiv", DATA / "z.json", DATA / "z.json")
    assert code == OK


@pytest.mark.parametrize("argv", [["present", DATA / "malformed.json"], ["homcount", DATA / "missing.json"],
                                  ["homcount", DATA / "free2.json", "--groups", "NotAGroup"],
                                  ["homcount", DATA / "free2.json", "--budget", "0"]])
def test_bad_input_exits_2(capsys, argv):
    code, rep = _run(capsys, *argv)
    assert code == BAD_INPUT and rep["status"] == "input_error"


def test_budget_exhaustion_is_inconclusive(capsys):
    code, rep = _run(capsys, "homcount", DATA / "free2.json", "--groups", "S4", "--budget", "10")
    assert code == INCONCLUSIVE and rep["result"]["homcounts"] == {"S4": None}


@pytest.mark.parametrize("argv", [["counterexample", "matrices"], ["counterexample", "picture"],
                                  ["counterexample", "nodal", "--gal", "S3"], ["counterexample", "wedge"],
                                  ["lcs", DATA / "lcs_triangle.json"], ["descent", DATA / "descent_cech.json"],
                                  ["descent", DATA / "descent_nodal.json"], ["descent", DATA / "descent_ordered.json"],
                                  ["looplike", DATA / "arith_triangle.json", "--samples", "3"],
                                  ["dict-check", "--samples", "10", "--max-order", "6"]],
                         ids=lambda a: "-".join(str(x) if not isinstance(x, Path) else x.stem for x in a))
def test_expected_properties_hold(capsys, argv):
    code, rep = _run(capsys, *argv)
    assert code == OK, rep
    assert rep["status"] == "ok"


def test_picture_reports_the_clash(capsys):
    _, rep = _run(capsys, "counterexample", "picture", "--q", "19")
    c = rep["result"]["contradiction"]
    assert c["modulus"] == 27 and c["values"] == [1, 19]


def test_picture_with_deep_congruence_is_inconclusive(capsys):
    code, rep = _run(capsys, "counterexample", "picture", "--q", "28", "--depth", "3")
    assert code == INCONCLUSIVE and rep["result"]["consistent"]["reaches_level"] is False


def test_wedge_counts_agree_with_closed_form(capsys):
    _, rep = _run(capsys, "counterexample", "wedge", "--kernels", "Z3", "Z4", "--loops", "1")
    assert rep["result"]["counts"] == rep["result"]["closed_form"]


def test_report_echoes_seed_and_digest(capsys):
    path = DATA / "free2.json"
    _, rep = _run(capsys, "homcount", path, "--groups", "Z2", "--seed", "17")
    assert rep["seed"] == 17 and rep["config"]["seed"] == 17
    assert rep["inputs"][str(path)] == hashlib.sha256(path.read_bytes()).hexdigest()


def test_text_format(capsys):
    code, out = _run(capsys, "homcount", DATA / "free2.json", "--groups", "S3", "--format", "text")
    assert code == OK
    assert out.splitlines()[0] == "homcount: ok (exit 0)"
    assert "sha256" in out and '"S3": 36' in out


def test_config_rejects_non_positive_values():
    with pytest.raises(InputError):
        RunConfig("homcount", depth=0)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "noohi", "homcount", str(DATA / "z2.json"), "--groups", "Z4"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == OK
    assert json.loads(proc.stdout)["result"]["homcounts"] == {"Z4": 2}
