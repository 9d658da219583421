import json
from pathlib import Path

import pytest

from fsparse.cli import fmt, main
from fractions import Fraction

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_RUNS = [
    (["learn-sparse", "--n", "4", "--k", "4", "--r-core", "2", "--trials", "3", "--seed", "1"],
     "learn_sparse.csv"),
    (["query-learn", "--class", "linear", "--n", "2"], "query_learn_linear2.csv"),
    (["adv-cert", "--class", "point", "--N", "4"], "adv_cert_point4.json"),
    (["gen-function", "--n", "4", "--k", "4", "--r-core", "2", "--seed", "3"], "gen_function.json"),
    (["chang-scan", "--n", "2", "--which", "all"], "chang_scan_n2.json"),
]


@pytest.mark.parametrize("argv, name", GOLDEN_RUNS, ids=[g[1] for g in GOLDEN_RUNS])
def test_golden_outputs(tmp_path, argv, name):
    out = tmp_path / name
    assert main(argv + ["--out", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / name).read_bytes()


def test_fmt():
    assert fmt(Fraction(3, 4)) == "3/4"
    assert fmt(Fraction(2)) == "2"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(True) == "1" and fmt(None) == ""


def test_usage_errors(capsys):
    assert main(["learn-sparse", "--trials", "0"]) == 2
    assert main(["chang-scan", "--n", "5"]) == 2
    assert main(["no-such-command"]) == 2
    assert main(["query-learn"]) == 2
    assert main(["learn-sparse", "--phase2", "magic"]) == 2


def test_malformed_class_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["query-learn", "--class-file", str(bad)]) == 2
    bad.write_text(json.dumps({"N": 2, "concepts": ["01", "01"]}))
    assert main(["query-learn", "--class-file", str(bad)]) == 2


def test_class_file_and_mu(tmp_path):
    f = tmp_path / "c.json"
    f.write_text(json.dumps({"N": 2, "concepts": ["00", "01", "11"]}))
    out = tmp_path / "t.json"
    assert main(["query-learn", "--class-file", str(f), "--format", "json", "--out", str(out)]) == 0
    body = json.loads(out.read_text())
    assert {t["target"] for t in body["transcripts"]} == {"00", "01", "11"}
    assert body["summary"]["correctness_rate"] == 1.0
    assert main(["adv-cert", "--class", "point", "--N", "2", "--mu", "9/10,1/10"]) == 4
    assert main(["adv-cert", "--class", "linear", "--n", "2", "--out", str(out)]) == 0
    cert = json.loads(out.read_text())
    assert cert["split"] == 0.5 and cert["threshold"] == pytest.approx(1 / 81)


def test_query_learn_summaries(capsys):
    assert main(["query-learn", "--class", "linear", "--n", "4"]) == 0
    summary = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert summary["max_queries"] == 4 and summary["correctness_rate"] == 1.0
    assert main(["query-learn", "--class", "point", "--N", "16"]) == 0
    summary = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert summary["max_queries"] == 15
    assert summary["spectral_ratio"] == pytest.approx(15 ** 0.5, abs=1e-9)


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 4, "k": 4, "r_core": 2, "trials": 2, "seed": 1}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["learn-sparse", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["learn-sparse", "--config", str(cfg), "--trials", "3", "--out", str(b)]) == 0
    assert len(a.read_text().splitlines()) == 1 + 2 + 3
    assert b.read_bytes() == (GOLDEN / "learn_sparse.csv").read_bytes()
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["learn-sparse", "--config", str(cfg)]) == 2


def test_seed_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("FSPARSE_SEED", "1")
    out = tmp_path / "env.csv"
    assert main(["learn-sparse", "--n", "4", "--k", "4", "--r-core", "2", "--trials", "3",
                 "--out", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / "learn_sparse.csv").read_bytes()


def test_phase2_modes_both_exact(tmp_path):
    rows = {}
    for mode in ("estimate", "coupon"):
        out = tmp_path / f"{mode}.json"
        assert main(["learn-sparse", "--trials", "5", "--seed", "7", "--phase2", mode,
                     "--format", "json", "--out", str(out)]) == 0
        rows[mode] = json.loads(out.read_text())["runs"]
    for a, b in zip(rows["estimate"], rows["coupon"]):
        assert a["exact_match"] and b["exact_match"]
        assert a["phase2_classical_examples"] != b["phase2_classical_examples"]


def test_parallel_rows_in_seed_order(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["learn-sparse", "--n", "6", "--k", "4", "--r-core", "2", "--trials", "4", "--seed", "3"]
    assert main(base + ["--out", str(a)]) == 0
    assert main(base + ["--jobs", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
