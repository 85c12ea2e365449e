import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutofflab import (
    blow_up_set,
    good_set,
    hit_time,
    hitting_tail,
    kac_quantities,
    mgf,
    qs_decomposition,
    random_reversible,
    worst_tail_profile,
)

# ---------------------------------------------------------------------------
# two-state chain: everything below is hand-derived.
#
# With holding 3/4, departures are geometric(1/4):
#   Pr_other[T_A > t] = (3/4)^t, E = 4, E[T^2] = 4 * (2*4 - 1) = 28,
#   E[z^T] = z / (4 - 3z), escape flow Phi({x}) = 1/4.


def test_k2_worst_tail_is_geometric(k2):
    prof = worst_tail_profile(k2, 0.5, stop_level=1e-3)
    seq = prof.global_sequence()
    expected = 0.75 ** np.arange(seq.size)
    assert np.allclose(seq, expected, atol=1e-12)
    assert prof.exact


def test_k2_hit_half_quarter_is_five(k2):
    res = hit_time(k2, 0.5, 0.25)
    assert res.exact
    assert res.value == 5  # (3/4)^5 = 0.2373 is the first tail <= 1/4


def test_k2_hit_continuous(k2):
    # killed rate 1/4 from the off-state: tail e^{-t/4} hits 1/4 at 4 ln 4.
    res = hit_time(k2, 0.5, 0.25, continuous=True)
    lo, hi = res.bracket
    assert lo <= 4.0 * math.log(4.0) <= hi
    assert hi - lo <= 1e-3 * k2.spectrum.t_rel + 1e-12


def test_k2_kac_identities(k2):
    q = kac_quantities(k2, [1])
    assert q.phi_A == pytest.approx(0.25, abs=1e-14)
    assert q.phi_B == pytest.approx(0.25, abs=1e-14)
    assert q.mean_from_psi == pytest.approx(4.0, abs=1e-12)
    assert q.second_from_psi == pytest.approx(28.0, abs=1e-12)
    assert q.mean_from_pi_B == pytest.approx(4.0, abs=1e-12)


def test_k2_mgf_closed_form(k2):
    z = 7.0 / 6.0
    assert mgf(k2, 1, [0], z) == pytest.approx(7.0 / 3.0, abs=1e-12)
    for z in (0.5, 1.0, 1.2):
        assert mgf(k2, 1, [0], z) == pytest.approx(z / (4.0 - 3.0 * z),
                                                   abs=1e-12)


def test_k2_mgf_divergence_guard(k2):
    # z gamma_1 >= 1 has no finite expectation; gamma_1 = 3/4 here.
    with pytest.raises(ValueError):
        mgf(k2, 1, [0], 4.0 / 3.0)


def test_k2_hitting_tail_closed_form(k2):
    prof = hitting_tail(k2, 1, [0], t_max=12)
    assert np.allclose(prof.tail, 0.75 ** np.arange(13), atol=1e-14)
    assert prof.mean == pytest.approx(4.0, abs=1e-12)
    assert prof.variance == pytest.approx(12.0, abs=1e-12)


def test_k2_qs_decomposition_equality_case(k2):
    qs = qs_decomposition(k2, [0])
    # single surviving state: gamma_1 = holding = 3/4 = 1 - pi(A)/t_rel
    assert qs.gamma_1 == pytest.approx(0.75, abs=1e-14)
    assert qs.weights.sum() == pytest.approx(1.0, abs=1e-12)
    t_rel = k2.spectrum.t_rel
    assert qs.gamma_1 <= 1.0 - 0.5 / t_rel + 1e-14


def test_k2_good_set_extremes(k2):
    all_states = good_set(k2, [0], s=1, m=3.0)
    assert all_states.members.all()
    assert all_states.measure == pytest.approx(1.0, abs=1e-14)
    none = good_set(k2, [0], s=1, m=0.1)
    assert not none.members.any()
    assert none.measure == 0.0


def test_k2_blow_up_set(k2):
    res = blow_up_set(k2, [0], w=2.0, alpha=0.5)
    assert res.t == 8  # ceil(t_rel * w / pi(A)) = ceil(2 * 2 / 0.5)
    assert not res.members.any()  # (3/4)^8 ~ 0.100 < 1/2
    assert res.measure <= res.ceiling + 1e-12


# ---------------------------------------------------------------------------
# structural properties on random chains


def test_tails_match_step_iteration(small_corpus):
    chain = small_corpus[0]
    A = [0, 2]
    prof = hitting_tail(chain, chain.n - 1, A, t_max=30)
    # brute force: mask transitions into A as absorbing and iterate
    mask = np.ones(chain.n, dtype=bool)
    mask[A] = False
    PB = chain.P[np.ix_(mask, mask)]
    u = np.ones(mask.sum())
    start = np.nonzero(np.nonzero(mask)[0] == chain.n - 1)[0][0]
    for t in range(31):
        assert prof.tail[t] == pytest.approx(u[start], abs=1e-12)
        u = PB @ u
    # moments against the tail sums: E[T] = sum_{t>=0} Pr[T > t]
    long = hitting_tail(chain, chain.n - 1, A, t_max=4000)
    assert long.mean == pytest.approx(long.tail.sum(), abs=1e-6)


def _pi_b_vector(chain, A):
    v = chain.pi.copy()
    v[A] = 0.0
    return v / v.sum()


def test_qs_tail_reconstruction(small_corpus):
    # the eigenweight expansion sum_i a_i gamma_i^t must reproduce the
    # directly iterated tail from the stationarity-restricted start
    for chain in small_corpus[:3]:
        qs = qs_decomposition(chain, [1])
        ts = np.arange(25)
        recon = qs.tail(ts)
        direct = hitting_tail(chain, _pi_b_vector(chain, [1]), [1],
                              t_max=24).tail
        assert np.allclose(recon, direct, atol=1e-10)
        assert qs.weights.min() >= -1e-12
        assert qs.weights.sum() == pytest.approx(1.0, abs=1e-10)


def test_worst_profile_exact_vs_greedy(small_corpus):
    # exhaustive enumeration and the greedy family agree on small chains
    chain = small_corpus[1]
    exact = worst_tail_profile(chain, 0.5, stop_level=0.05,
                               exact_threshold=chain.n)
    greedy = worst_tail_profile(chain, 0.5, stop_level=0.05,
                                exact_threshold=2)
    assert exact.exact and not greedy.exact
    g = greedy.global_sequence()
    e = exact.global_sequence()
    m = min(g.size, e.size)
    # the greedy profile is a pointwise lower bound on the exact one
    assert np.all(g[:m] <= e[:m] + 1e-12)


def test_hit_time_monotone_in_eps(small_corpus):
    chain = small_corpus[4]
    values = [hit_time(chain, 0.5, eps).value
              for eps in (0.5, 0.25, 0.1, 0.04)]
    assert values == sorted(values)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 4_000), w=st.floats(0.0, 3.0),
       alpha=st.floats(0.1, 1.0))
def test_blow_up_ceiling_holds(seed, w, alpha):
    chain = random_reversible(6, seed=seed)
    res = blow_up_set(chain, [0, 1], w=w, alpha=alpha)
    assert res.measure <= res.ceiling + 1e-9


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 4_000), s=st.integers(0, 8))
def test_good_set_measure_floor(seed, s):
    chain = random_reversible(5, seed=seed)
    m = 3.0
    res = good_set(chain, [0], s=s, m=m)
    assert res.measure >= 1.0 - 8.0 / m ** 2 - 1e-9
