import csv
import json
import os

import numpy as np
import pytest

from cutofflab import chain_from_json
from cutofflab.cli import main
from cutofflab.reporting import Record, Report


def run(*argv):
    return main(list(argv))


def test_gen_analyze_round_trip(tmp_path):
    out = tmp_path / "chain.json"
    assert run("gen", "--family", "biased-path", "--n", "8",
               "-o", str(out)) == 0
    chain = chain_from_json(str(out))
    assert chain.n == 8


def test_gen_requires_seed_for_random(tmp_path):
    out = tmp_path / "r.json"
    assert run("gen", "--family", "random", "--n", "5", "-o", str(out)) == 1
    assert not out.exists()
    assert run("gen", "--family", "random", "--n", "5", "--seed", "4",
               "-o", str(out)) == 0
    assert out.exists()


def test_gen_bd_family(tmp_path):
    out = tmp_path / "bd.json"
    assert run("gen", "--family", "bd", "--n", "7", "--seed", "2",
               "-o", str(out)) == 0
    chain = chain_from_json(str(out))
    assert chain.n == 7
    assert chain.is_lazy and chain.is_reversible
    off = np.abs(np.subtract.outer(np.arange(7), np.arange(7))) > 1
    assert np.all(chain.P[off] == 0.0)


def test_gen_round_trip_bit_for_bit(tmp_path):
    p1 = tmp_path / "one.json"
    p2 = tmp_path / "two.json"
    assert run("gen", "--family", "two-cliques", "--n", "5",
               "-o", str(p1)) == 0

    from cutofflab import chain_to_json

    chain_to_json(chain_from_json(str(p1)), str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_analyze_json_output(tmp_path, capsys):
    out = tmp_path / "chain.json"
    run("gen", "--family", "biased-path", "--n", "6", "-o", str(out))
    capsys.readouterr()
    assert run("analyze", str(out), "--json") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n"] == 6
    assert payload["lazy"] is True
    assert payload["t_rel"] > 1.0


def test_analyze_missing_file():
    assert run("analyze", "/nonexistent/chain.json") != 0


def test_malformed_chain_file_is_validation_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"P": [[0.9, 0.2], [0.25, 0.75]]}))
    assert run("analyze", str(bad)) == 1


def test_hit_csv_output(tmp_path, capsys):
    chain = tmp_path / "chain.json"
    run("gen", "--family", "biased-path", "--n", "6", "-o", str(chain))
    out = tmp_path / "tails.csv"
    assert run("hit", str(chain), "--alpha", "0.5", "--eps", "0.25",
               "-o", str(out)) == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "tail"]
    tails = np.array([float(r[1]) for r in rows[1:]])
    assert tails[0] == 1.0
    assert np.all(np.diff(tails) <= 1e-12)
    leftovers = [p for p in tmp_path.iterdir()
                 if p.suffix == ".tmp"]
    assert leftovers == []


def test_hit_explicit_set(tmp_path, capsys):
    chain = tmp_path / "chain.json"
    run("gen", "--family", "biased-path", "--n", "6", "-o", str(chain))
    capsys.readouterr()
    assert run("hit", str(chain), "--set", "5", "--start", "0",
               "--eps", "0.25") == 0
    assert "tail <= 0.25" in capsys.readouterr().out


def test_verify_exit_zero_and_report(tmp_path):
    chain = tmp_path / "chain.json"
    run("gen", "--family", "biased-path", "--n", "6", "-o", str(chain))
    report = tmp_path / "report.json"
    assert run("verify", "--chain", str(chain), "--suite", "relaxation",
               "--suite", "escape", "--quiet", "-o", str(report)) == 0
    payload = json.loads(report.read_text())
    assert isinstance(payload, list) and len(payload) == 2
    assert {p["suite"] for p in payload} == {"relaxation", "escape"}
    assert all(p["passed"] for p in payload)


def test_verify_all_on_k2(tmp_path):
    chain = tmp_path / "k2.json"
    from cutofflab import chain_to_json, load_chain

    chain_to_json(load_chain(np.array([[0.75, 0.25], [0.25, 0.75]])),
                  str(chain))
    assert run("verify", "--chain", str(chain), "--suite", "all",
               "--quiet") == 0


def test_verify_unknown_suite_is_usage_error(tmp_path):
    chain = tmp_path / "chain.json"
    run("gen", "--family", "biased-path", "--n", "5", "-o", str(chain))
    assert run("verify", "--chain", str(chain), "--suite", "bogus") == 1


def test_verify_failure_exits_two(tmp_path, monkeypatch):
    chain = tmp_path / "chain.json"
    run("gen", "--family", "biased-path", "--n", "5", "-o", str(chain))
    failing = Record(inequality="synthetic", params={}, lhs=1.0, rhs=0.0,
                     margin=-1.0, kind="inequality", passed=False)

    def fake_run_suites(chain_obj, suites, params=None):
        return [Report(suite=s, chain_fingerprint="stub", records=[failing])
                for s in suites]

    import cutofflab.verify as verify_mod

    monkeypatch.setattr(verify_mod, "run_suites", fake_run_suites)
    assert run("verify", "--chain", str(chain), "--suite", "relaxation") == 2


def test_cutoff_scan_stdout_csv(capsys):
    capsys.readouterr()
    assert run("cutoff-scan", "--family", "biased-path",
               "--sizes", "6,9", "--eps", "0.1") == 0
    out = capsys.readouterr().out
    rows = list(csv.DictReader(out.splitlines()))
    assert len(rows) == 2
    assert {r["n"] for r in rows} == {"6", "9"}
    assert float(rows[0]["ratio"]) >= 1.0


def test_cutoff_scan_csv_file(tmp_path):
    out = tmp_path / "scan.csv"
    assert run("cutoff-scan", "--family", "biased-path", "--sizes", "6,9",
               "--eps", "0.1", "--eps", "0.25", "-o", str(out)) == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert "ratio" in rows[0]


def test_simulate_agrees_with_exact(tmp_path, capsys):
    chain = tmp_path / "chain.json"
    run("gen", "--family", "biased-path", "--n", "6", "-o", str(chain))
    capsys.readouterr()
    assert run("simulate", "--chain", str(chain), "--start", "0",
               "--set", "5", "--t", "10", "--paths", "20000",
               "--seed", "17") == 0
    out = capsys.readouterr().out
    lines = {l.split("=")[0].strip(): l.split("=")[1].strip()
             for l in out.splitlines() if "=" in l}
    est = float(lines["estimate"].split("+/-")[0])
    exact = float(lines["exact"])
    se = float(lines["estimate"].split("+/-")[1].split("(")[0])
    assert abs(est - exact) <= 4.0 * max(se, 1e-9)


def test_simulate_requires_seed(tmp_path):
    chain = tmp_path / "chain.json"
    run("gen", "--family", "biased-path", "--n", "6", "-o", str(chain))
    assert run("simulate", "--chain", str(chain), "--start", "0",
               "--set", "5", "--t", "10") != 0


def test_tree_subcommands(tmp_path, capsys):
    tree = tmp_path / "tree.json"
    assert run("gen", "--family", "random-tree", "--n", "12", "--seed", "8",
               "-o", str(tree)) == 0
    assert run("tree", "central", str(tree)) == 0
    capsys.readouterr()
    assert run("tree", "window-check", str(tree), "--eps", "0.25") == 0
    assert run("tree", "tails", str(tree), "--x", "0") in (0, 1)


def test_sbd_subcommands(tmp_path, capsys):
    chain = tmp_path / "chain.json"
    run("gen", "--family", "biased-path", "--n", "8", "-o", str(chain))
    assert run("sbd", "classify", str(chain)) == 0
    blocks_csv = tmp_path / "blocks.csv"
    assert run("sbd", "blocks", str(chain), "-o", str(blocks_csv)) == 0
    with open(blocks_csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 8  # r = 1 for the biased path
    assert run("sbd", "hit-stats", str(chain)) == 0


def test_threads_option_sets_environment(tmp_path, monkeypatch):
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS"):
        monkeypatch.delenv(var, raising=False)
    chain = tmp_path / "chain.json"
    assert run("--threads", "2", "gen", "--family", "biased-path",
               "--n", "5", "-o", str(chain)) == 0
    assert os.environ["OMP_NUM_THREADS"] == "2"
    assert os.environ["OPENBLAS_NUM_THREADS"] == "2"


def test_threads_rejects_nonpositive():
    assert run("--threads", "0", "gen", "--family", "biased-path",
               "--n", "5", "-o", "/tmp/x.json") == 1
