import numpy as np
import pytest

from cutofflab import (
    TreeSpec,
    build_tree_chain,
    crossing_time,
    path_variance,
    random_tree,
    tail_bound_check,
    tau_root,
    tau_sandwich_check,
    tree_from_chain,
    tree_from_json,
    tree_to_json,
    window_check,
)
from cutofflab.hitting import hitting_tail


def _p3_tree(p3):
    return tree_from_chain(p3)


def test_p3_reconstruction(p3):
    tc = _p3_tree(p3)
    assert tc.n == 3
    assert tc.root == 1  # central vertex of the 3-path
    assert np.allclose(tc.chain.P, p3.P, atol=1e-12)


def test_p3_crossing_is_geometric(p3):
    # from an endpoint the step to the center succeeds w.p. 1/2 each turn:
    # E[T] = 2, E[T^2] = (2 - p)/p^2 = 6, Var = 2.
    tc = _p3_tree(p3)
    ct = crossing_time(tc, 0)
    assert ct.mean == pytest.approx(2.0, abs=1e-12)
    assert ct.second_moment == pytest.approx(6.0, abs=1e-12)
    assert ct.variance == pytest.approx(2.0, abs=1e-12)


def test_crossing_formula_matches_direct_solve():
    # independent oracle: absorb at the parent and solve the linear system
    spec = random_tree(24, seed=91)
    tc = build_tree_chain(spec)
    for u in (0, 5, 17):
        if u == tc.root:
            continue
        ct = crossing_time(tc, u)
        parent = int(tc.parent[u])
        prof = hitting_tail(tc.chain, u, [parent], t_max=8)
        assert ct.mean == pytest.approx(prof.mean, rel=1e-9)
        assert ct.second_moment == pytest.approx(prof.second_moment, rel=1e-9)


def test_crossing_second_moment_bound(p3):
    tc = _p3_tree(p3)
    ct = crossing_time(tc, 0)
    assert ct.second_moment <= 4.0 * ct.mean * tc.t_rel + 1e-9


def test_crossing_rejects_root(p3):
    tc = _p3_tree(p3)
    with pytest.raises(ValueError):
        crossing_time(tc, tc.root)


def test_tree_from_chain_rejects_non_tree(small_corpus):
    dense = next(c for c in small_corpus if c.n >= 5)
    with pytest.raises((ValueError, RuntimeError)):
        tree_from_chain(dense)


def test_path_variance_bound():
    spec = random_tree(40, seed=7)
    tc = build_tree_chain(spec)
    for x in (0, 11, 39):
        if x == tc.root:
            continue
        pv = path_variance(tc, x)
        assert pv.variance <= 4.0 * pv.mean * tc.t_rel + 1e-9
        for rec in pv.tail_records:
            assert rec.passed, rec


def test_tau_root_matches_worst_tail():
    spec = random_tree(16, seed=3)
    tc = build_tree_chain(spec)
    for eps in (0.25, 0.1):
        t = tau_root(tc, eps)
        tails = np.array([hitting_tail(tc.chain, x, [tc.root], t_max=t).tail
                          for x in range(tc.n) if x != tc.root])
        assert tails[:, t].max() <= eps + 1e-12
        if t > 0:
            assert tails[:, t - 1].max() > eps - 1e-12


def test_tau_sandwich_records_pass():
    spec = random_tree(30, seed=12)
    tc = build_tree_chain(spec)
    for rec in tau_sandwich_check(tc, 0.25):
        assert rec.passed, rec


def test_window_check_passes_on_random_trees():
    for seed in (1, 2, 8):
        tc = build_tree_chain(random_tree(20, seed=seed))
        for rec in window_check(tc, 0.25):
            assert rec.kind == "skip" or rec.passed, rec


def test_tail_bound_records_pass():
    tc = build_tree_chain(random_tree(36, seed=44))
    leaf_like = [v for v in range(tc.n)
                 if v != tc.root and len(tc.path_to_root(v)) >= 3]
    x = leaf_like[0]
    recs = tail_bound_check(tc, x, c_grid=(0.5, 1.0, 1.5, 2.0))
    assert any(r.kind != "skip" for r in recs)
    for rec in recs:
        assert rec.kind == "skip" or rec.passed, rec


def test_tail_bound_rejects_non_ancestor():
    tc = build_tree_chain(random_tree(12, seed=9))
    children = [v for v in range(tc.n)
                if v != tc.root and int(tc.parent[v]) == tc.root]
    if len(children) >= 2:
        with pytest.raises(ValueError):
            tail_bound_check(tc, children[0], children[1])


def test_tree_json_round_trip(tmp_path):
    spec = random_tree(15, seed=5)
    p1 = tmp_path / "t1.json"
    p2 = tmp_path / "t2.json"
    tree_to_json(spec, str(p1))
    loaded = tree_from_json(str(p1))
    tree_to_json(loaded, str(p2))
    assert p1.read_bytes() == p2.read_bytes()
    a = build_tree_chain(spec)
    b = build_tree_chain(loaded)
    assert np.array_equal(a.chain.P, b.chain.P)


def test_tree_spec_validation():
    with pytest.raises(ValueError):
        TreeSpec(n=3, edges=[(0, 1, 1.0)], holding=[0.6, 0.6, 0.6]).validate()
    with pytest.raises(ValueError):
        TreeSpec(n=3, edges=[(0, 1, 1.0), (0, 1, 2.0)],
                 holding=[0.6, 0.6, 0.6]).validate()
