import numpy as np
import pytest

from cutofflab import (
    biased_path,
    blocks,
    central_block_hit,
    classify_sbd,
    comparable_start_bound,
    plateau_chain,
)
from cutofflab.hitting import hitting_tail
from cutofflab.sbd import block_correlation_mc


def test_biased_path_classification():
    cls = classify_sbd(biased_path(12))
    assert cls.is_sbd
    assert cls.r == 1
    assert cls.delta == pytest.approx(0.125, abs=1e-12)
    assert cls.alpha == pytest.approx(35.0 / 36.0, abs=1e-12)


def test_k2_is_banded(k2):
    cls = classify_sbd(k2)
    assert cls.is_sbd
    assert cls.r == 1
    assert cls.delta == pytest.approx(0.25, abs=1e-12)


def test_plateau_chain_is_not_banded():
    cls = classify_sbd(plateau_chain(8))
    assert not cls.is_sbd
    assert cls.reasons


def test_blocks_structure():
    chain = biased_path(10)
    dec = blocks(chain, 1)
    assert dec.n_blocks == 10
    assert dec.central_mass <= dec.central_mass_bound + 1e-12
    # blocks tile the state line in order
    flat = np.concatenate(dec.blocks)
    assert np.array_equal(flat, np.arange(10))
    # parents step toward the central block
    j = 0
    hops = 0
    while j != dec.central_block:
        j = dec.parent(j)
        hops += 1
        assert hops <= dec.n_blocks


def test_blocks_rejects_degenerate_width():
    chain = biased_path(6)
    with pytest.raises(ValueError):
        blocks(chain, 6)
    with pytest.raises(ValueError):
        blocks(chain, 0)


def test_comparable_starts_against_direct_solves():
    # oracle: within a width-r interval, mean hitting times of a set on
    # one side differ by at most delta^{-r} — checked by explicit solves
    chain = biased_path(9)
    cls = classify_sbd(chain)
    interval = (3, 3 + cls.r - 1)
    target = [0]
    means = [hitting_tail(chain, x, target, t_max=4).mean
             for x in range(interval[0], interval[1] + 1)]
    assert max(means) <= (cls.delta ** -cls.r) * min(means) + 1e-9
    for rec in comparable_start_bound(chain, interval, target):
        assert rec.passed, rec


def test_central_block_hit_matches_solve_oracle():
    chain = biased_path(11)
    cls = classify_sbd(chain)
    dec = blocks(chain, cls.r, cls.delta)
    cbh = central_block_hit(chain, dec)
    members = dec.blocks[dec.central_block]
    prof = hitting_tail(chain, cbh.x, list(members), t_max=8)
    assert cbh.mean == pytest.approx(prof.mean, rel=1e-9)
    assert cbh.variance == pytest.approx(prof.variance, rel=1e-9)
    for rec in cbh.records:
        assert rec.kind in ("report", "skip") or rec.passed, rec


def test_central_block_tau_profile_is_quantile():
    chain = biased_path(10)
    cls = classify_sbd(chain)
    dec = blocks(chain, cls.r, cls.delta)
    cbh = central_block_hit(chain, dec)
    members = list(dec.blocks[dec.central_block])
    for eps, t in cbh.tau_profile.items():
        worst_t = max(hitting_tail(chain, x, members, t_max=t).tail[t]
                      for x in range(chain.n))
        assert worst_t <= eps + 1e-12
        if t > 0:
            prev = max(hitting_tail(chain, x, members, t_max=t - 1).tail[t - 1]
                       for x in range(chain.n))
            assert prev > eps - 1e-12


def test_block_correlation_bound_holds():
    chain = biased_path(12)
    cls = classify_sbd(chain)
    dec = blocks(chain, cls.r, cls.delta)
    path = dec.path_to_central(0)
    mc = block_correlation_mc(chain, dec, 0, path[0], path[3],
                              paths=12_000, seed=99)
    assert mc.record.passed, mc.record
    assert mc.estimate.standard_error > 0
    assert mc.gap == 2


def test_block_correlation_requires_path_order():
    chain = biased_path(12)
    cls = classify_sbd(chain)
    dec = blocks(chain, cls.r, cls.delta)
    path = dec.path_to_central(0)
    with pytest.raises(ValueError):
        block_correlation_mc(chain, dec, 0, path[3], path[0],
                             paths=10_000, seed=1)
