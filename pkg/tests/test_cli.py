"""Problem-file ingestion, CLI dispatch, report determinism, figures."""

import json
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from gspear import ValidationError, load_problem, problem_from_dict
from gspear.cli import main
from gspear.report import dumps, emit_report, to_jsonable


DATA = resources.files("gspear") / "data"
EXAMPLES = ["l1_example.json", "pi_counterexample.json", "mg_theorem.json"]


@pytest.fixture
def l1_problem_path():
    return str(DATA / "l1_example.json")


@pytest.mark.parametrize("name", EXAMPLES)
def test_roundtrip_shipped_examples(name):
    path = DATA / name
    problem = load_problem(str(path))
    text = dumps(to_jsonable(problem.to_dict()))
    again = problem_from_dict(json.loads(text))
    assert again == problem


def test_problem_validation_messages(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"spaces": {"X": {"kind": "lp", "p": 1, "dim": 2}}, '
                   '"operators": {"G": {"matrix": [[1]], "domain": "Z", "codomain": "X"}}}')
    with pytest.raises(ValidationError, match=r"operators\.G\.domain"):
        load_problem(str(bad))
    bad.write_text("not json")
    with pytest.raises(ValidationError, match="invalid JSON"):
        load_problem(str(bad))
    with pytest.raises(ValidationError, match="missing"):
        problem_from_dict({"operators": {"G": {"matrix": [[1]]}}})


def test_p_accepts_inf_string():
    problem = problem_from_dict(
        {"spaces": {"X": {"kind": "lp", "p": "inf", "dim": 2}}, "operators": {}}
    )
    import math

    assert problem.spaces["X"].p == math.inf


def test_cli_gnorm_l1_example(capsys, l1_problem_path):
    rc = main(["gnorm", "--problem", l1_problem_path])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == 4.0
    assert out["witness_x"] == [1.0, 0.0]
    assert out["method"] == "polyhedral_exact"
    assert out["certified"] is True


def test_cli_spear_check_l1_example(capsys, l1_problem_path):
    rc = main(["check", "--kind", "spear", "--problem", l1_problem_path, "--samples", "10"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"] == "certified_no"
    assert out["gap"] == -1.0


def test_cli_relative_check(capsys, l1_problem_path):
    rc = main(["check", "--kind", "relative", "--problem", l1_problem_path, "--samples", "10"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"] == "plausible_yes"


def test_cli_malformed_problem_exits_2(tmp_path, capsys):
    bad = tmp_path / "broken.json"
    bad.write_text('{"spaces": []}')
    rc = main(["gnorm", "--problem", str(bad)])
    assert rc == 2
    assert "validation error" in capsys.readouterr().err


def test_cli_unknown_operator_exits_2(capsys, l1_problem_path):
    rc = main(["gnorm", "--problem", l1_problem_path, "--t", "nosuch"])
    assert rc == 2


def test_cli_determinism(tmp_path, l1_problem_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    for out in (out1, out2):
        rc = main([
            "range", "--problem", l1_problem_path, "--kind", "vg",
            "--count", "40", "--seed", "5", "--out", str(out), "--no-plot",
        ])
        assert rc == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_range_csv_format(capsys, l1_problem_path):
    rc = main(["range", "--problem", l1_problem_path, "--count", "5", "--seed", "1"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("re,im,value,x1,x2")
    assert len(lines) == 6


def test_cli_figures_written(tmp_path, l1_problem_path):
    out = tmp_path / "range.csv"
    rc = main([
        "range", "--problem", l1_problem_path, "--count", "20", "--seed", "2",
        "--out", str(out),
    ])
    assert rc == 0
    assert out.exists()
    assert (tmp_path / "range_range.png").exists()


def test_cli_hilbert_and_figure(tmp_path):
    out = tmp_path / "mg.json"
    rc = main([
        "hilbert", "--problem", str(DATA / "mg_theorem.json"), "--out", str(out),
    ])
    assert rc == 0
    rec = json.loads(out.read_text())
    assert rec["gamma"] == 0.5
    assert rec["consistent"] is True
    assert (tmp_path / "mg_hilbert.png").exists()


def test_cli_nu_and_index(capsys, l1_problem_path):
    rc = main(["nu", "--problem", l1_problem_path])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == 4.0

    rc = main(["index", "--problem", l1_problem_path, "--kind", "all", "--samples", "10"])
    assert rc == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["n1"] == 0.0 and rec["nG"] == 0.0 and rec["n2"] >= 1.0 - 1e-8
    assert rec["product_ok"] and rec["collapse_ok"]


def test_cli_smooth_and_dual(capsys, tmp_path, l1_problem_path):
    rc = main(["smooth", "--problem", l1_problem_path, "--t", "G"])
    assert rc == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["smooth"] is False

    prob = json.loads(Path(l1_problem_path).read_text())
    prob["operators"]["W"] = {
        "matrix": [[0, 0], [0, 1]], "domain": "X", "codomain": "X",
    }
    pw = tmp_path / "with_w.json"
    pw.write_text(json.dumps(prob))
    rc = main(["dual", "--problem", str(pw), "--atoms", "512"])
    assert rc == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["inside"] is False


def test_cli_dominate(tmp_path, capsys):
    pi = str(DATA / "pi_counterexample.json")
    prob = json.loads((DATA / "pi_counterexample.json").read_text())
    prob["operators"]["G"] = {
        "matrix": [[1, 0], [0, 1]], "domain": "H", "codomain": "H",
    }
    ident = tmp_path / "identity.json"
    ident.write_text(json.dumps(prob))
    rc = main(["dominate", "--problem", pi, "--g2", str(ident), "--samples", "4"])
    assert rc == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["limit_ok"] is True and rec["dominance_ok"] is True


def test_cli_verify_all(capsys):
    rc = main(["verify-all", "--samples", "3", "--seed", "1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 5


def test_cli_certified_flag(tmp_path):
    """Relaxation on a generic Euclidean 3x3 instance has a sqrt(delta) tail
    that cannot satisfy the 1e-8 stopping rule in double precision."""
    rng = np.random.default_rng(100)
    G = rng.standard_normal((3, 3))
    G /= np.linalg.svd(G, compute_uv=False)[0]
    T = rng.standard_normal((3, 3))
    prob = {
        "spaces": {"H": {"kind": "lp", "p": 2, "dim": 3, "field": "real"}},
        "operators": {
            "G": {"matrix": G.tolist(), "domain": "H", "codomain": "H"},
            "T": {"matrix": T.tolist(), "domain": "H", "codomain": "H"},
        },
    }
    path = tmp_path / "generic.json"
    path.write_text(json.dumps(prob))
    rc = main(["gnorm", "--problem", str(path), "--method", "relaxation", "--certified"])
    assert rc == 3
    rc = main(["gnorm", "--problem", str(path), "--method", "relaxation", "--no-plot"])
    assert rc == 0


def test_emit_report_17_digits(l1_problem_path):
    problem = load_problem(l1_problem_path)
    from gspear import g_norm

    res = g_norm(problem.operator("T").scaled(1.0 / 3.0), problem.operator("G"))
    payload = emit_report(res, "json").decode()
    assert "1.3333333333333333" in payload  # 17 significant digits of 4/3


def test_report_byte_identical_for_identical_results(l1_problem_path):
    problem = load_problem(l1_problem_path)
    from gspear import relative_spear_check

    a = relative_spear_check(problem.operator("G"), samples=15, seed=3)
    b = relative_spear_check(problem.operator("G"), samples=15, seed=3)
    assert emit_report(a, "json") == emit_report(b, "json")
