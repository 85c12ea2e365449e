import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutofflab import (
    maximal_function,
    mixing_profile,
    mixing_time,
    random_reversible,
    worst_tv,
)
from cutofflab.mixing import _mixing_time_ct_interval


def test_k2_distance_is_closed_form(k2):
    # d(t) = (1/2)^{t+1}: the worst row is (1/2)(1 + 2^{-t}, 1 - 2^{-t}).
    prof = mixing_profile(k2, t_max=10)
    expected = 0.5 ** (np.arange(11) + 1)
    assert np.allclose(prof.d, expected, atol=1e-14)


def test_k2_mixing_time(k2):
    # d(t) = (1/2)^{t+1}: 1/4 at t=1, 1/8 at t=2, 1/16 at t=3
    assert mixing_time(k2, 0.25) == 1
    assert mixing_time(k2, 0.125) == 2
    assert mixing_time(k2, 0.12) == 3


def test_worst_tv_matches_profile(small_corpus):
    chain = small_corpus[2]
    prof = mixing_profile(chain, t_max=12)
    for t in (0, 3, 9):
        d, _ = worst_tv(chain, t)
        assert d == pytest.approx(prof.d[t], abs=1e-12)


def test_profile_is_monotone(small_corpus):
    for chain in small_corpus:
        prof = mixing_profile(chain, t_max=40)
        assert np.all(np.diff(prof.d) <= 1e-12)


def test_mixing_time_agrees_with_profile_scan(small_corpus):
    for chain in small_corpus:
        prof = mixing_profile(chain, eps_floor=1e-3)
        for eps in (0.25, 0.1, 0.02):
            assert mixing_time(chain, eps) == prof.hit_level(eps)


def test_mixing_time_rejects_bad_eps(k2):
    with pytest.raises(ValueError):
        mixing_time(k2, 0.0)
    with pytest.raises(ValueError):
        mixing_time(k2, 1.5)


def test_ct_interval_brackets_k2(k2):
    # d_ct(t) = (1/2) e^{-t/2} crosses 1/4 at t = 2 ln 2.
    lo, hi = _mixing_time_ct_interval(k2, 0.25)
    target = 2.0 * np.log(2.0)
    assert lo <= target <= hi
    assert hi - lo <= 1e-3 * k2.spectrum.t_rel + 1e-12


def _brute_even_maximum(chain, f, k_max):
    g = f.astype(float).copy()
    best = g.copy()
    P2 = chain.P @ chain.P
    for _ in range(k_max):
        g = P2 @ g
        best = np.maximum(best, g)
    return best


def test_maximal_function_matches_brute_force(small_corpus):
    chain = small_corpus[0]
    rng = np.random.default_rng(3)
    for _ in range(4):
        f = np.abs(rng.standard_normal(chain.n))
        res = maximal_function(chain, f)
        brute = _brute_even_maximum(chain, f, res.truncation_k)
        # beyond the truncation horizon the remaining fluctuation is below
        # the certified tail bound, so brute and exact agree to that bound
        assert np.all(res.values >= brute - 1e-12)
        assert np.all(res.values <= brute + res.tail_bound + 1e-12)


def test_maximal_function_dominates_every_even_power(small_corpus):
    chain = small_corpus[3]
    rng = np.random.default_rng(11)
    f = np.abs(rng.standard_normal(chain.n))
    res = maximal_function(chain, f)
    g = f.copy()
    P2 = chain.P @ chain.P
    for _ in range(30):
        assert np.all(res.values >= g - res.tail_bound - 1e-12)
        g = P2 @ g


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 5_000), t=st.integers(0, 6), s=st.integers(0, 6))
def test_tv_submultiplicative(seed, t, s):
    chain = random_reversible(6, seed=seed)
    dt, _ = worst_tv(chain, t)
    ds, _ = worst_tv(chain, s)
    dts, _ = worst_tv(chain, t + s)
    assert dts <= 2.0 * dt * ds + 1e-12


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 5_000))
def test_mixing_time_monotone_in_eps(seed):
    chain = random_reversible(7, seed=seed)
    times = [mixing_time(chain, eps) for eps in (0.4, 0.25, 0.1, 0.05)]
    assert times == sorted(times)
