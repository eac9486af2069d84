import json

import numpy as np
import pytest

from rirs.cli import main
from rirs.models import ModelSpec


@pytest.fixture
def sbm_edges(tmp_path):
    """Directed edge list of a two-block SBM draw (upper triangle only)."""
    X = ModelSpec("sbm", n=200, K=2, r=0.5).generate(12).entries
    i, j = np.nonzero(np.triu(X, 1))
    p = tmp_path / "g.edges"
    p.write_text("# test graph\n" + "".join(f"{a + 1} {b + 1}\n" for a, b in zip(i, j)))
    return p


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_estimate_k_max_zero(tmp_path, capsys):
    mtx = tmp_path / "x.mtx"
    mtx.write_text("%%MatrixMarket matrix coordinate pattern symmetric\n2 2 1\n2 1\n")
    code, _, err = run(["estimate", "--input", mtx, "--k-max", "0", "--seed", 1], capsys)
    assert code == 2 and "--k-max" in err


def test_test_subcommand(sbm_edges, tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, err = run(["test", "--input", sbm_edges, "--format", "edgelist", "--transform", "sum",
                        "--selfloops", "false", "--k0", 2, "--alpha", 0.05, "--m", "sqrt", "--seed", 7,
                        "--out", out], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["variant"] == "subsampled" and doc["k0"] == 2 and doc["seed"] is not None
    assert set(doc) >= {"statistic", "p_value", "alpha", "reject", "m", "n_sampled_pairs"}
    assert err.startswith("config: ")
    assert json.loads(err.splitlines()[0][len("config: "):])["k0"] == 2


def test_estimate_and_determinism(sbm_edges, capsys):
    argv = ["estimate", "--input", sbm_edges, "--k-max", 5, "--seed", 3]
    code, out1, _ = run(argv, capsys)
    assert code == 0
    _, out2, _ = run(argv, capsys)
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["k_hat"] in range(1, 6) and doc["transform"] == "none"


def test_estimate_double_halves(sbm_edges, capsys):
    code, out, err = run(["estimate", "--input", sbm_edges, "--transform", "double", "--k-max", 6,
                          "--seed", 2], capsys)
    assert code == 0
    doc = json.loads(out)
    if doc["k_hat_raw"] is not None:
        assert doc["k_hat"] == doc["k_hat_raw"] / 2
    assert "halved" in err and "doubles" in doc["note"]


def test_simulate_csv(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, _, err = run(["simulate", "--model", "sbm", "--n", 150, "--k", 2, "--rho", 0.1, "--r", 0.5,
                        "--k0", "1,2", "--reps", 3, "--alpha", 0.05, "--seed", 1, "--out", out], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("replicate,seed,variant,k0")
    assert sum(not l.startswith("#") for l in lines) == 1 + 3 * 2
    assert "rejection rate" in err


def test_simulate_identical_outputs(tmp_path, capsys):
    docs = []
    for name in ("a.json", "b.json"):
        run(["simulate", "--model", "dcmm", "--n", 120, "--mode", "estimate", "--k-max", 4, "--reps", 2,
             "--seed", 5, "--out", tmp_path / name], capsys)
        d = json.loads((tmp_path / name).read_text())
        d.pop("wall_clock_seconds")
        docs.append(d)
    assert docs[0] == docs[1]


@pytest.mark.parametrize("argv, flag", [
    (["simulate", "--k0", "1", "--reps", "2"], "--seed"),
    (["simulate", "--seed", "1", "--reps", "0", "--k0", "1"], "--reps"),
    (["simulate", "--seed", "1", "--reps", "2"], "--k0"),
    (["test", "--input", "x", "--k0", "0", "--seed", "1"], "--k0"),
    (["test", "--input", "x", "--k0", "1", "--selfloops", "false"], "--seed"),
    (["test", "--input", "x", "--k0", "1", "--seed", "1", "--alpha", "1.5"], "--alpha"),
    (["test", "--input", "x", "--k0", "1", "--seed", "1", "--m", "0.5"], "--m"),
    (["bogus"], "invalid choice"),
])
def test_flag_errors(argv, flag, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and flag in err


def test_missing_input(tmp_path, capsys):
    code, _, err = run(["test", "--input", tmp_path / "nope.edges", "--k0", 1, "--seed", 1], capsys)
    assert code == 3 and "--input" in err


def test_parse_error_names_line(tmp_path, capsys):
    p = tmp_path / "bad.edges"
    p.write_text("1 2\n2 q\n")
    code, _, err = run(["estimate", "--input", p, "--seed", 1], capsys)
    assert code == 3 and "line 2" in err


def test_k0_too_large_for_data(tmp_path, capsys):
    p = tmp_path / "g.edges"
    p.write_text("1 2\n2 3\n")
    code, _, err = run(["test", "--input", p, "--k0", 5, "--seed", 1], capsys)
    assert code == 3 and "--k0" in err


def test_numerical_failure_exit(tmp_path, capsys):
    # a 3-node path has rank 2, so removing two components leaves nothing
    p = tmp_path / "g.edges"
    p.write_text("1 2\n2 3\n")
    code, _, err = run(["test", "--input", p, "--k0", 2, "--seed", 1, "--m", 1], capsys)
    assert code == 4 and "numerical failure" in err


def test_selfloops_auto_picks_diagonal(tmp_path, capsys):
    X = ModelSpec("sbm", n=150, K=2, selfloops=True).generate(4).entries
    i, j = np.nonzero(np.triu(X))
    p = tmp_path / "loops.edges"
    p.write_text("".join(f"{a + 1} {b + 1}\n" for a, b in zip(i, j)))
    code, out, _ = run(["test", "--input", p, "--k0", 2], capsys)
    assert code == 0 and json.loads(out)["variant"] == "diagonal"


def test_seed_needed_once_no_selfloops_found(sbm_edges, capsys):
    code, _, err = run(["test", "--input", sbm_edges, "--k0", 1], capsys)
    assert code == 2 and "--seed" in err


def test_m_warning_on_stderr(sbm_edges, capsys):
    _, _, err = run(["test", "--input", sbm_edges, "--k0", 1, "--seed", 1], capsys)
    assert "warning: " in err and "lower bound" in err
