import json

import numpy as np
import pytest

from cutofflab import (
    SUITE_IDS,
    build_tree_chain,
    cutoff_scan,
    good_set,
    random_tree,
    run_suite,
    run_suites,
)
from cutofflab.trees import window_check
from cutofflab.verify import _build_killed, _record_key


def test_suite_registry_is_complete():
    expected = {
        "relaxation", "tv-hit", "set-probability", "submultiplicativity",
        "hit-levels", "escape", "killed-spectrum", "maximal-function",
        "good-set", "martingale-tail", "return-time", "return-mgf",
        "mix-hit", "lazy-floor", "continuous-time", "tree-window",
        "crossing-tails", "banded", "block-moments",
    }
    assert set(SUITE_IDS) == expected


def test_unknown_suite_raises(k2):
    with pytest.raises(ValueError, match="unknown suite"):
        run_suites(k2, ["relaxation", "nope"])


def test_all_suites_pass_on_k2(k2):
    reports = run_suites(k2, list(SUITE_IDS))
    for rep in reports:
        assert rep.passed, rep.summary() + "\n" + "\n".join(
            f"{r.inequality} {r.params} lhs={r.lhs} rhs={r.rhs}"
            for r in rep.failures)


def test_records_are_sorted_and_unique(k2):
    for rep in run_suites(k2, ["escape", "tv-hit", "crossing-tails"]):
        keys = [_record_key(r) for r in rep.records]
        assert keys == sorted(keys)
        assert len(keys) == len(set(keys)), rep.suite


def test_k2_escape_equality_record(k2):
    # single-state target: the killed chain is 1x1 with survival 3/4, so the
    # geometric ceiling pi(B) * (1 - pi(A)/t_rel)^t is attained at every t
    rep = run_suite(k2, "escape")
    recs = [r for r in rep.records
            if r.inequality == "stationary-escape-tail"
            and len(r.params.get("A")) == 1]
    assert recs
    for r in recs:
        t = r.params["t"]
        assert r.lhs == pytest.approx(0.5 * 0.75 ** t, abs=1e-14)
        assert r.rhs == pytest.approx(r.lhs, abs=1e-14)


def test_good_set_suite_matches_direct_evaluation(small_corpus):
    # the suite batches membership spectrally; good_set() iterates — the
    # two routes must agree exactly on membership and measure
    chain = small_corpus[2]
    rep = run_suite(chain, "good-set")
    assert rep.passed
    for rec in rep.records:
        if rec.inequality != "good-set-measure":
            continue
        A = list(rec.params["A"])
        s = rec.params["s"]
        m = rec.params["m"]
        direct = good_set(chain, A, s=s, m=m)
        assert rec.lhs == pytest.approx(1.0 - 8.0 / m ** 2, abs=1e-12)
        assert rec.rhs == pytest.approx(direct.measure, abs=1e-9)


def test_tree_window_suite_matches_window_check():
    tc = build_tree_chain(random_tree(14, seed=21))
    rep = run_suite(tc.chain, "tree-window")
    assert rep.passed
    direct = {(
        r.inequality, r.params.get("eps")): r for r in window_check(tc, 0.25)
        if r.kind != "skip"}
    suite = {(r.inequality, r.params.get("eps")): r for r in rep.records}
    for key, rec in direct.items():
        if key in suite:
            assert suite[key].lhs == pytest.approx(rec.lhs, rel=1e-9, abs=1e-9)
            assert suite[key].rhs == pytest.approx(rec.rhs, rel=1e-9, abs=1e-9)


def test_tree_suites_skip_on_non_tree(small_corpus):
    dense = next(c for c in small_corpus if c.n >= 5)
    for sid in ("tree-window", "crossing-tails"):
        rep = run_suite(dense, sid)
        assert rep.passed
        assert all(r.kind == "skip" for r in rep.records)


def test_banded_suite_skips_on_non_banded(small_corpus):
    dense = next(c for c in small_corpus if c.n >= 5)
    rep = run_suite(dense, "banded")
    assert rep.passed
    assert all(r.kind == "skip" for r in rep.records)


def test_killed_system_matches_iteration(small_corpus):
    chain = small_corpus[0]
    mask = np.zeros(chain.n, dtype=bool)
    mask[[0, 1]] = True
    ks = _build_killed(chain, mask)
    # stationary-restricted tail vs direct substochastic iteration
    B = np.nonzero(~mask)[0]
    PB = chain.P[np.ix_(B, B)]
    muB = chain.pi[B] / chain.pi[B].sum()
    u = np.ones(B.size)
    for t in range(20):
        expected = float(muB @ u)
        got = float(ks.tail_stationary([t])[0])
        assert got == pytest.approx(expected, abs=1e-11)
        u = PB @ u


def test_report_json_round_trip(tmp_path, k2):
    rep = run_suite(k2, "relaxation")
    path = tmp_path / "report.json"
    rep.to_json(str(path))
    payload = json.loads(path.read_text())
    assert payload["suite"] == "relaxation"
    assert payload["passed"] is True
    assert len(payload["records"]) == len(rep.records)


def test_continuous_suite_passes_on_corpus(small_corpus):
    for chain in small_corpus[:3]:
        rep = run_suite(chain, "continuous-time")
        assert rep.passed, rep.failures[:3]


def test_cutoff_scan_validates_input():
    with pytest.raises(ValueError):
        cutoff_scan("biased-path", [10, 10], eps_grid=(0.1,))
    with pytest.raises(ValueError):
        cutoff_scan("biased-path", [10, 20], eps_grid=(0.6,))
    with pytest.raises(ValueError):
        cutoff_scan("no-such-family", [10, 20])


def test_cutoff_scan_row_contents():
    scan = cutoff_scan("biased-path", [6, 10], eps_grid=(0.1, 0.25))
    rows = scan.row_dicts()
    assert len(rows) == 4  # two sizes x two levels
    for row in rows:
        assert row["window"] >= 0
        assert row["ratio"] >= 1.0 - 1e-12
        assert row["t_mix"] == row["t_mix_complement"] + row["window"]
        # small members get exact worst-set hitting values
        assert row["hit"] is not None


def test_run_suites_shares_fingerprint(k2):
    reports = run_suites(k2, ["relaxation", "escape"])
    assert reports[0].chain_fingerprint == reports[1].chain_fingerprint
