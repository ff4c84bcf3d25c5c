import itertools
import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from hypertree.cli import cli
from hypertree.dataset import dump_dataset, load_dataset
from hypertree.weights import compute_weights, weights_from_dict

from oracles import markov_chain_joint, random_dataset, xor_triple_joint


@pytest.fixture
def runner():
    return CliRunner()


def _write_xor_csv(path, t=64):
    rows = []
    for i in range(t):
        a, b = (i >> 0) & 1, (i >> 1) & 1
        rows.append(f"{a},{b},{a ^ b}")
    path.write_text("x0,x1,x2\n" + "\n".join(rows) + "\n")


def _write_chain_csv(path):
    # deterministic empirical chain: x1 follows x0, x2 follows x1, with
    # 1-in-5 flips laid out explicitly
    rng = np.random.default_rng(42)
    lines = []
    for _ in range(400):
        a = int(rng.integers(0, 2))
        b = a ^ int(rng.random() < 0.2)
        c = b ^ int(rng.random() < 0.2)
        lines.append(f"{a},{b},{c}")
    path.write_text("x0,x1,x2\n" + "\n".join(lines) + "\n")


def test_weights_xor(runner, tmp_path):
    csv_path = tmp_path / "xor.csv"
    _write_xor_csv(csv_path)
    out = tmp_path / "weights.json"
    res = runner.invoke(cli, ["weights", str(csv_path), "--k", "2",
                              "--out", str(out)])
    assert res.exit_code == 0, res.output
    doc = json.loads(out.read_text())
    assert doc["log_base"] == "e" and doc["k"] == 2 and doc["n"] == 3
    by_vars = {tuple(e["vars"]): e["w"] for e in doc["weights"]}
    assert len(by_vars) == 7  # 3 singletons, 3 pairs, 1 triple
    for pair in itertools.combinations(range(3), 2):
        assert abs(by_vars[pair]) <= 1e-12
    assert by_vars[(0, 1, 2)] == pytest.approx(math.log(2), abs=1e-12)


def test_weights_k1_pairs_only(runner, tmp_path):
    csv_path = tmp_path / "xor.csv"
    _write_xor_csv(csv_path)
    res = runner.invoke(cli, ["weights", str(csv_path), "--k", "1"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert max(len(e["vars"]) for e in doc["weights"]) == 2


def test_weights_unreadable_file(runner, tmp_path):
    res = runner.invoke(cli, ["weights", str(tmp_path / "nope.csv"),
                              "--k", "1"])
    assert res.exit_code == 4
    assert "nope.csv" in res.output


def test_weights_parse_error_is_validation(runner, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n0,x\n")
    res = runner.invoke(cli, ["weights", str(bad), "--k", "1"])
    assert res.exit_code == 2


def test_learn_chain_chow_liu_matches_exact(runner, tmp_path):
    csv_path = tmp_path / "chain.csv"
    _write_chain_csv(csv_path)
    out_cl = tmp_path / "cl.json"
    res = runner.invoke(cli, ["learn", str(csv_path), "--k", "1",
                              "--solver", "chow_liu", "--out", str(out_cl)])
    assert res.exit_code == 0, res.output
    doc = json.loads(out_cl.read_text())
    edges = {tuple(sorted(c)) for c in doc["maximal_cliques"] if len(c) == 2}
    assert edges == {(0, 1), (1, 2)}

    out_ex = tmp_path / "ex.json"
    res = runner.invoke(cli, ["learn", str(csv_path), "--k", "1",
                              "--solver", "exact", "--out", str(out_ex)])
    assert res.exit_code == 0
    assert json.loads(out_ex.read_text())["score"] == pytest.approx(
        doc["score"], abs=1e-12)
    assert "divergence_decomposed" in doc


def test_learn_guard_refusal_exit_code(runner, tmp_path):
    rng = np.random.default_rng(0)
    d = random_dataset(rng, 12, 40, arities=[2] * 12)
    csv_path = tmp_path / "wide.csv"
    dump_dataset(d, csv_path)
    res = runner.invoke(cli, ["learn", str(csv_path), "--k", "2",
                              "--solver", "exact"])
    assert res.exit_code == 3
    assert "exceeds" in res.output


def test_learn_from_weight_file(runner, tmp_path):
    doc = {"k": 2, "n": 4, "log_base": "e",
           "weights": [{"vars": [0, 1, 2], "w": 1.0},
                       {"vars": [0, 1, 3], "w": 1.0}]}
    wpath = tmp_path / "weights.json"
    wpath.write_text(json.dumps(doc))
    res = runner.invoke(cli, ["learn", str(wpath), "--solver", "exact"])
    assert res.exit_code == 0, res.output
    out = json.loads(res.output)
    assert out["score"] == pytest.approx(2.0, abs=1e-12)
    assert "note" in out  # no data, no divergence

    res = runner.invoke(cli, ["learn", str(wpath), "--k", "3"])
    assert res.exit_code == 2  # k conflicts with the file


def test_learn_chow_liu_rejects_k2(runner, tmp_path):
    csv_path = tmp_path / "xor.csv"
    _write_xor_csv(csv_path)
    res = runner.invoke(cli, ["learn", str(csv_path), "--k", "2",
                              "--solver", "chow_liu"])
    assert res.exit_code == 2


def test_learn_bad_solver_is_usage_error(runner, tmp_path):
    res = runner.invoke(cli, ["learn", "x.csv", "--k", "1",
                              "--solver", "annealing"])
    assert res.exit_code == 2


def test_eval_report(runner, tmp_path):
    csv_path = tmp_path / "chain.csv"
    _write_chain_csv(csv_path)
    struct = tmp_path / "structure.json"
    res = runner.invoke(cli, ["learn", str(csv_path), "--k", "1",
                              "--solver", "chow_liu", "--out", str(struct)])
    assert res.exit_code == 0
    report_path = tmp_path / "report.json"
    model_path = tmp_path / "model.json"
    res = runner.invoke(cli, ["eval", str(csv_path), str(struct),
                              "--model-out", str(model_path),
                              "--out", str(report_path)])
    assert res.exit_code == 0, res.output
    report = json.loads(report_path.read_text())
    assert report["identity_residual"] <= 1e-9
    assert report["log_base"] == "e" and report["k"] == 1
    assert "loglik_per_row" in report
    assert model_path.exists()
    model = json.loads(model_path.read_text())
    assert {tuple(f["vars"]) for f in model["factors"]} >= {(0,), (1,), (2,)}


def test_eval_variable_mismatch(runner, tmp_path):
    csv_path = tmp_path / "xor.csv"
    _write_xor_csv(csv_path)
    struct = tmp_path / "structure.json"
    struct.write_text(json.dumps(
        {"k": 1, "n": 5, "seed": [0, 1],
         "attachments": [{"v": 2, "anchor": [0]}, {"v": 3, "anchor": [1]},
                         {"v": 4, "anchor": [3]}]}))
    res = runner.invoke(cli, ["eval", str(csv_path), str(struct)])
    assert res.exit_code == 2
    assert "spans" in res.output


def test_eval_large_n_omits_direct(runner, tmp_path):
    rng = np.random.default_rng(1)
    d = random_dataset(rng, 11, 50, arities=[4] * 11)  # 4^11 > 2^20 cells
    csv_path = tmp_path / "big.csv"
    dump_dataset(d, csv_path)
    struct = tmp_path / "structure.json"
    res = runner.invoke(cli, ["learn", str(csv_path), "--k", "1",
                              "--solver", "chow_liu", "--out", str(struct)])
    assert res.exit_code == 0, res.output
    res = runner.invoke(cli, ["eval", str(csv_path), str(struct)])
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert "divergence_direct" not in report
    assert "not enumerable" in report["note"]


def test_gen_parity_roundtrip(runner, tmp_path):
    biases = {"k": 1, "n": 3, "Q": 4,
              "biases": [{"vars": [0, 1], "p": 2}]}
    bpath = tmp_path / "biases.json"
    bpath.write_text(json.dumps(biases))
    out_csv = tmp_path / "sample.csv"
    res = runner.invoke(cli, ["gen-parity", str(bpath), "--out", str(out_csv)])
    assert res.exit_code == 0, res.output
    prov = json.loads((tmp_path / "sample.provenance.json").read_text())
    assert prov["Q"] == 4 and prov["rows"] == 3 * 4 * 8
    assert len(prov["block_log"]) == 12

    # recomputed weights match the bias formula
    d = load_dataset(out_csv)
    wf = compute_weights(d, 1)
    from hypertree.paritygen import bias_to_weight
    expect = bias_to_weight((2 / 4) / 3)
    assert wf[(0, 1)] == pytest.approx(expect, abs=1e-9)
    for pair in ((0, 2), (1, 2)):
        assert abs(wf[pair]) <= 1e-12


def test_gen_parity_targets_input(runner, tmp_path):
    targets = {"k": 1, "n": 3, "q_grid": 64,
               "targets": [{"vars": [0, 2], "w": 0.5}]}
    tpath = tmp_path / "targets.json"
    tpath.write_text(json.dumps(targets))
    out_csv = tmp_path / "sample.csv"
    res = runner.invoke(cli, ["gen-parity", str(tpath), "--out", str(out_csv)])
    assert res.exit_code == 0, res.output
    prov = json.loads((tmp_path / "sample.provenance.json").read_text())
    assert "scale" in prov and "total_abs_error" in prov
    d = load_dataset(out_csv)
    wf = compute_weights(d, 1)
    assert wf[(0, 2)] > 0
    assert abs(wf[(0, 1)]) <= 1e-12


def test_gen_parity_guard(runner, tmp_path):
    biases = {"k": 1, "n": 15, "Q": 2, "biases": []}
    bpath = tmp_path / "biases.json"
    bpath.write_text(json.dumps(biases))
    res = runner.invoke(cli, ["gen-parity", str(bpath)])
    assert res.exit_code == 3


def test_gen_parity_unknown_schema(runner, tmp_path):
    bpath = tmp_path / "junk.json"
    bpath.write_text(json.dumps({"foo": 1}))
    res = runner.invoke(cli, ["gen-parity", str(bpath)])
    assert res.exit_code == 2


def test_display_base_two(runner, tmp_path):
    csv_path = tmp_path / "xor.csv"
    _write_xor_csv(csv_path)
    out = tmp_path / "s.json"
    res = runner.invoke(cli, ["learn", str(csv_path), "--k", "2",
                              "--solver", "exact", "--display-base", "2",
                              "--out", str(out)])
    assert res.exit_code == 0
    # file stays in nats; the printed summary converts
    doc = json.loads(out.read_text())
    assert doc["score"] == pytest.approx(math.log(2), abs=1e-12)
    assert "1.000000" in res.output and "base 2" in res.output
