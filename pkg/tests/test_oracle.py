import numpy as np
import pytest

from cutofflab import simulate_hitting, simulate_tv_proxy
from cutofflab.oracle import uniform_block


def test_uniform_block_chunking_is_bit_for_bit():
    # reading the counter stream in pieces must reproduce one big read
    whole = uniform_block(123, 0, (40, 7))
    parts = np.vstack([uniform_block(123, 0, (15, 7)),
                       uniform_block(123, 15 * 7, (25, 7))])
    assert np.array_equal(whole, parts)


def test_uniform_block_seeds_differ():
    a = uniform_block(1, 0, (16,))
    b = uniform_block(2, 0, (16,))
    assert not np.array_equal(a, b)


def test_simulate_hitting_is_reproducible(k2):
    a = simulate_hitting(k2, 0, [1], 3, paths=2_000, seed=5)
    b = simulate_hitting(k2, 0, [1], 3, paths=2_000, seed=5)
    assert a.value == b.value
    c = simulate_hitting(k2, 0, [1], 3, paths=2_000, seed=6)
    assert a.value != c.value or a.seed != c.seed


def test_simulate_hitting_matches_geometric_tail(k2):
    # Pr_0[T_{1} > 3] = (3/4)^3 = 27/64 exactly
    est = simulate_hitting(k2, 0, [1], 3, paths=50_000, seed=11)
    exact = 27.0 / 64.0
    assert abs(est.value - exact) <= 4.0 * est.standard_error
    assert est.standard_error < 0.01


def test_simulate_hitting_start_inside_target(k2):
    est = simulate_hitting(k2, 1, [1], 10, paths=1_000, seed=0)
    assert est.value == 0.0
    assert est.standard_error == 0.0


def test_simulate_hitting_rejects_tiny_runs(k2):
    with pytest.raises(ValueError):
        simulate_hitting(k2, 0, [1], 3, paths=10, seed=1)


def test_tv_proxy_at_time_zero(small_corpus):
    # at t = 0 the plug-in estimator sees the point mass at the start:
    # TV(delta_x, pi) = 1 - pi(x), and the plug-in bias vanishes
    chain = small_corpus[0]
    est = simulate_tv_proxy(chain, 0, 0, paths=5_000, seed=3)
    assert est.value == pytest.approx(1.0 - chain.pi[0], abs=1e-12)


def test_tv_proxy_upward_bias_documented(small_corpus):
    from cutofflab.mixing import worst_tv

    chain = small_corpus[0]
    t = 6
    est = simulate_tv_proxy(chain, 0, t, paths=40_000, seed=9)
    exact = np.abs(np.linalg.matrix_power(chain.P, t)[0] - chain.pi).sum() / 2
    # plug-in TV estimates sit above the truth (Jensen), modulo noise
    assert est.value >= exact - 4.0 * max(est.standard_error, 1e-3)
    d, _ = worst_tv(chain, t)
    assert exact <= d + 1e-12
