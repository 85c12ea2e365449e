import numpy as np
import pytest

from cutofflab import load_chain, random_corpus


@pytest.fixture(scope="session")
def k2():
    """Two-state lazy symmetric chain; everything about it is closed-form."""
    return load_chain(np.array([[0.75, 0.25], [0.25, 0.75]]))


@pytest.fixture(scope="session")
def p3():
    """Lazy simple random walk on the 3-path.

    pi = (1/4, 1/2, 1/4), eigenvalues (1, 1/2, 0); the end-to-center
    crossing is geometric with success probability 1/2.
    """
    P = np.array([
        [0.5, 0.5, 0.0],
        [0.25, 0.5, 0.25],
        [0.0, 0.5, 0.5],
    ])
    return load_chain(P)


@pytest.fixture(scope="session")
def small_corpus():
    """A handful of random reversible lazy chains shared across tests."""
    return random_corpus(6, seed=20260815)
