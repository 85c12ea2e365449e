import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutofflab import (
    ChainSpec,
    ChainValidationError,
    chain_from_json,
    chain_to_json,
    heat_kernel,
    heat_matrix,
    load_chain,
    random_reversible,
    step_distribution,
    transition_power,
)


def test_k2_spectrum_is_exact(k2):
    s = k2.spectrum
    assert s.lambda_2 == pytest.approx(0.5, abs=1e-14)
    assert s.t_rel == pytest.approx(2.0, abs=1e-14)
    assert np.allclose(np.sort(s.eigenvalues), [0.5, 1.0], atol=1e-14)


def test_k2_flags(k2):
    assert k2.is_reversible and k2.is_lazy and k2.is_irreducible
    assert np.allclose(k2.pi, [0.5, 0.5])


def test_p3_spectrum(p3):
    assert np.allclose(p3.pi, [0.25, 0.5, 0.25], atol=1e-14)
    assert np.allclose(np.sort(p3.spectrum.eigenvalues), [0.0, 0.5, 1.0],
                       atol=1e-13)


def test_row_sum_validation():
    P = np.array([[0.9, 0.2], [0.25, 0.75]])
    with pytest.raises(ChainValidationError):
        load_chain(P)


def test_negative_entry_rejected():
    P = np.array([[1.1, -0.1], [0.25, 0.75]])
    with pytest.raises(ChainValidationError):
        load_chain(P)


def test_supplied_stationary_law_is_checked():
    P = np.array([[0.75, 0.25], [0.25, 0.75]])
    with pytest.raises(ChainValidationError):
        load_chain(ChainSpec(P=P, pi=np.array([0.9, 0.1])))


def test_require_raises_on_missing_property():
    P = np.array([[0.0, 1.0], [1.0, 0.0]])  # periodic, not lazy
    chain = load_chain(P)
    with pytest.raises(ChainValidationError):
        chain.require(lazy=True)


def test_spectral_reconstruction_matches_power(k2):
    # P^t(x, y) via the eigenbasis must agree with plain matrix powers.
    for t in (0, 1, 3, 7):
        direct = np.linalg.matrix_power(k2.P, t)
        assert np.allclose(transition_power(k2, t, method="spectral"),
                           direct, atol=1e-12)


def test_step_distribution_methods_agree(small_corpus):
    chain = small_corpus[0]
    for t in (0, 1, 5, 17):
        a = step_distribution(chain, 0, t, method="iterate")
        b = step_distribution(chain, 0, t, method="spectral")
        assert np.allclose(a, b, atol=1e-11)
        assert a.sum() == pytest.approx(1.0, abs=1e-12)


def test_heat_kernel_row_matches_expm(k2):
    from scipy.linalg import expm

    t = np.log(2.0)
    Q = k2.P - np.eye(2)
    expected = expm(Q * t)
    assert np.allclose(heat_matrix(k2, t), expected, atol=1e-12)
    row = heat_kernel(k2, 0, t)
    # closed form: 1/2 (1 +- e^{-t/t_rel}) with t_rel = 2
    assert row[0] == pytest.approx(0.5 * (1 + np.exp(-t / 2)), abs=1e-12)
    assert row[1] == pytest.approx(0.5 * (1 - np.exp(-t / 2)), abs=1e-12)


def test_json_round_trip_is_bit_for_bit(tmp_path, small_corpus):
    chain = small_corpus[1]
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    chain_to_json(chain, str(p1))
    loaded = chain_from_json(str(p1))
    chain_to_json(loaded, str(p2))
    assert p1.read_bytes() == p2.read_bytes()
    assert np.array_equal(loaded.P, chain_from_json(str(p2)).P)


def test_json_preserves_labels(tmp_path):
    chain = load_chain(ChainSpec(P=np.array([[0.75, 0.25], [0.25, 0.75]]),
                                 labels=["left", "right"]))
    path = tmp_path / "c.json"
    chain_to_json(chain, str(path))
    assert chain_from_json(str(path)).spec.labels == ["left", "right"]


def test_atomic_write_leaves_no_temp_files(tmp_path, k2):
    target = tmp_path / "chain.json"
    chain_to_json(k2, str(target))
    leftovers = [p for p in tmp_path.iterdir() if p != target]
    assert leftovers == []
    json.loads(target.read_text())  # valid JSON all the way through


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(3, 9))
def test_random_reversible_members_validate(seed, n):
    chain = random_reversible(n, seed=seed)
    assert chain.is_reversible and chain.is_lazy and chain.is_irreducible
    assert chain.P.diagonal().min() >= 0.5 - 1e-12
    # detailed balance, entrywise
    Q = chain.pi[:, None] * chain.P
    assert np.allclose(Q, Q.T, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_spectrum_decomposition_identities(seed):
    chain = random_reversible(8, seed=seed)
    s = chain.spectrum
    # completeness: sum_i f_i(y)^2 = 1 / pi(y)
    F = s.eigenfunctions
    assert np.allclose((F ** 2).sum(axis=1), 1.0 / chain.pi, atol=1e-8)
    # eigenvalues all >= 0 for lazy chains
    assert s.eigenvalues.min() >= -1e-12
