import json
import subprocess
import sys

import pytest

from dvrhodge.cli import main

NONDEG = {"ring": {"kind": "p-local-int", "p": 5},
          "complex": {"lo": 0, "ranks": [1, 1], "differentials": [[["5"]]]},
          "filtration": {"orientation": "decreasing", "steps": {"1": {"0": [], "1": [["1"]]}}}}


@pytest.fixture
def doc(tmp_path):
    def write(data, name="in.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data) if not isinstance(data, str) else data)
        return str(path)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_nondegenerate(capsys, doc):
    code, out, _ = run(capsys, "classify", doc(NONDEG))
    assert code == 0
    assert out.splitlines()[0] == "not degenerate; first failure (i=1, j=1)"


def test_classify_json(capsys, doc):
    code, out, _ = run(capsys, "--json", "classify", doc(NONDEG))
    data = json.loads(out)
    assert data["verdict"] == "not degenerate"
    assert data["first_failure"]["i"] == 1
    assert run(capsys, "classify", "--json", doc(NONDEG))[1] == out


def test_snf_and_module_info(capsys, doc):
    path = doc({"ring": {"kind": "p-local-int", "p": 5}, "matrix": [[5, 5], [5, 30]]})
    code, out, _ = run(capsys, "snf", path)
    assert code == 0 and out.startswith("exponents: [1, 2]")
    code, out, _ = run(capsys, "--json", "module-info", path)
    assert code == 0 and json.loads(out)["torsion"] == [1, 2]


def test_polygon_svg(capsys, doc, tmp_path):
    path = doc({"ring": {"kind": "p-local-int", "p": 5}, "module": {"orders": [1, 3]}})
    code, out, _ = run(capsys, "polygon", path)
    assert code == 0 and "(0,0) (1,1) (2,4)" in out
    target = tmp_path / "p.svg"
    assert run(capsys, "polygon", "--svg", "--output", str(target), path)[0] == 0
    assert "<svg" in target.read_text()


def test_cohomology_pages_dualize_hodge_ledger(capsys, doc):
    path = doc(NONDEG)
    for cmd in ("cohomology", "dualize", "pages", "virtual-hodge", "ledger"):
        code, out, err = run(capsys, cmd, path)
        assert code == 0, (cmd, err)
        assert out.strip()


def test_page_mode(capsys, doc):
    path = doc({"ring": {"kind": "p-local-int", "p": 5},
                "page": {"r": 1, "r_stop": 3,
                         "entries": {"0,0": {"orders": [None], "labels": ["a"]},
                                     "1,0": {"orders": [None], "labels": ["b"]}},
                         "rules": {"1": {"a": {"b": "5"}}}}})
    code, out, _ = run(capsys, "pages", path)
    assert code == 0 and "stable from r = 2" in out


def test_bg_demo_dr(capsys):
    code, out, _ = run(capsys, "bg-demo", "--p", "5", "--max-degree", "10", "--target", "dr")
    assert code == 0
    assert out.rstrip().splitlines()[-1] == "H^10_dR: torsion [2]"


@pytest.mark.parametrize("target", ["hodge", "ht", "ledger"])
def test_bg_demo_targets(capsys, target):
    code, out, _ = run(capsys, "bg-demo", "--p", "11", "--max-degree", "6", "--target", target)
    assert code == 0 and out.strip()


def test_bg_demo_p2(capsys):
    assert run(capsys, "bg-demo", "--p", "2")[0] == 2
    assert run(capsys, "bg-demo", "--p", "2", "--p2-variant", "--max-degree", "6")[0] == 0


def test_input_errors_exit_2(capsys, doc):
    bad = doc({"ring": {"kind": "p-local-int", "p": 5}, "matrix": [["1/5"]]})
    code, _, err = run(capsys, "snf", bad)
    assert code == 2 and "matrix[0][0]" in err
    code, _, err = run(capsys, "classify", doc('{"ring": ', "broken.json"))
    assert code == 2 and "line 1" in err
    dd = doc({"ring": {"kind": "p-local-int", "p": 5},
              "complex": {"ranks": [1, 1, 1], "differentials": [[["1"]], [["1"]]]}}, "dd.json")
    code, _, err = run(capsys, "cohomology", dd)
    assert code == 2 and "d^1 o d^0" in err
    assert run(capsys, "snf", "/nonexistent.json")[0] == 2


def test_randcheck_passes(capsys):
    code, out, _ = run(capsys, "randcheck", "--suite", "split-criterion", "--seed", "7", "--count", "500")
    assert code == 0 and "0 violations" in out


def test_randcheck_json_is_deterministic():
    cmd = [sys.executable, "-m", "dvrhodge.cli", "--json", "randcheck", "--suite", "crosscheck",
           "--seed", "3", "--count", "20"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["violations"] == 0


def test_env_default_output(capsys, doc, monkeypatch):
    monkeypatch.setenv("DVRHODGE_OUTPUT", "json")
    code, out, _ = run(capsys, "classify", doc(NONDEG))
    assert json.loads(out)["verdict"] == "not degenerate"
