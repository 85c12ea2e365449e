"""Finite Markov chain container, validation, and spectral decomposition.

Everything downstream (mixing profiles, hitting tails, tree and banded-matrix
analyses) goes through :class:`Chain`, which couples a validated transition
matrix with its stationary distribution and structural flags.  The spectral
routines assume reversibility and work in the symmetrized coordinates
``D^{1/2} P D^{-1/2}`` so that plain symmetric eigensolvers apply.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10
DETAILED_BALANCE_TOL = 1e-12
LAZY_TOL = 1e-12
EIGENVALUE_RANGE_TOL = 1e-10

__all__ = [
    "ChainSpec",
    "Chain",
    "Spectrum",
    "load_chain",
    "spectral_decomposition",
    "step_distribution",
    "transition_power",
    "heat_kernel",
    "heat_matrix",
    "chain_from_json",
    "chain_to_json",
    "write_json_atomic",
]


class ChainValidationError(ValueError):
    """Raised when a transition matrix or companion data fails validation."""


@dataclass(eq=False)
class ChainSpec:
    """Raw matrix input: transition matrix plus optional stationary vector.

    Parameters
    ----------
    P : ndarray, shape (n, n)
        Row-stochastic transition matrix.
    pi : ndarray, shape (n,), optional
        Stationary distribution, if known analytically.  Validated against
        ``pi @ P == pi`` on load; supplying it avoids a dense linear solve
        and preserves exact constructions (detailed-balance weights).
    labels : list of str, optional
        Display names for states; purely cosmetic.
    """

    P: np.ndarray
    pi: np.ndarray | None = None
    labels: list[str] | None = None

    @property
    def n(self) -> int:
        return int(self.P.shape[0])

    def validate(self) -> None:
        P = np.asarray(self.P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ChainValidationError(f"transition matrix must be square, got {P.shape}")
        if P.shape[0] < 2:
            raise ChainValidationError("need at least two states")
        if not np.all(np.isfinite(P)):
            raise ChainValidationError("transition matrix contains non-finite entries")
        if P.min() < 0.0:
            i, j = np.unravel_index(np.argmin(P), P.shape)
            raise ChainValidationError(f"negative entry P[{i},{j}] = {P[i, j]}")
        rs = P.sum(axis=1)
        bad = np.abs(rs - 1.0) > ROW_SUM_TOL
        if bad.any():
            i = int(np.argmax(np.abs(rs - 1.0)))
            raise ChainValidationError(
                f"row {i} sums to {float(rs[i])!r}, outside 1 +/- {ROW_SUM_TOL}")
        if self.pi is not None:
            pi = np.asarray(self.pi, dtype=float)
            if pi.shape != (P.shape[0],):
                raise ChainValidationError("pi has wrong shape")
            if pi.min() <= 0 or abs(pi.sum() - 1.0) > 1e-10:
                raise ChainValidationError("pi must be strictly positive and sum to 1")
        if self.labels is not None and len(self.labels) != P.shape[0]:
            raise ChainValidationError("labels length does not match state count")


def _solve_stationary(P: np.ndarray) -> np.ndarray:
    """Stationary row vector of P via a dense solve of (P^T - I) pi = 0."""
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    s = pi.sum()
    if not np.isfinite(s) or s <= 0:
        raise ChainValidationError("failed to compute a stationary distribution")
    return pi / s


@dataclass(eq=False)
class Chain:
    """A validated chain: matrix, stationary law, and structural flags.

    Treat instances as immutable; spectral results are cached on first use.
    """

    spec: ChainSpec
    pi: np.ndarray
    is_reversible: bool
    is_lazy: bool
    is_irreducible: bool

    @property
    def P(self) -> np.ndarray:
        return self.spec.P

    @property
    def n(self) -> int:
        return self.spec.n

    @cached_property
    def spectrum(self) -> "Spectrum":
        return spectral_decomposition(self)

    def require(self, *, reversible: bool = False, lazy: bool = False, irreducible: bool = False) -> None:
        if reversible and not self.is_reversible:
            raise ChainValidationError("operation requires a reversible chain")
        if lazy and not self.is_lazy:
            raise ChainValidationError("operation requires a lazy chain (all holding probabilities >= 1/2)")
        if irreducible and not self.is_irreducible:
            raise ChainValidationError("operation requires an irreducible chain")


def load_chain(spec: ChainSpec | np.ndarray, pi: np.ndarray | None = None,
               labels: list[str] | None = None) -> Chain:
    """Validate a transition matrix and assemble a :class:`Chain`.

    Accepts either a prepared :class:`ChainSpec` or a bare matrix.  The
    stationary distribution is taken from the spec when present (validated
    to satisfy ``pi P = pi`` within 1e-10), otherwise solved for densely.
    Irreducibility is decided on the support digraph; reversibility means
    detailed balance holds entrywise within 1e-12; laziness means every
    holding probability is at least 1/2.
    """
    if not isinstance(spec, ChainSpec):
        spec = ChainSpec(P=np.array(spec, dtype=float), pi=pi, labels=labels)
    spec.validate()
    P = np.asarray(spec.P, dtype=float)
    n = P.shape[0]

    ncomp, _ = connected_components(csr_matrix(P > 0), directed=True, connection="strong")
    irreducible = ncomp == 1

    if spec.pi is not None:
        pi_vec = np.asarray(spec.pi, dtype=float)
        resid = np.max(np.abs(pi_vec @ P - pi_vec))
        if resid > STATIONARY_TOL:
            raise ChainValidationError(f"supplied pi is not stationary (residual {resid:.3e})")
    else:
        pi_vec = _solve_stationary(P)
        if irreducible:
            resid = np.max(np.abs(pi_vec @ P - pi_vec))
            if resid > STATIONARY_TOL:
                raise ChainValidationError(f"stationary solve residual too large ({resid:.3e})")

    flows = pi_vec[:, None] * P
    reversible = bool(np.max(np.abs(flows - flows.T)) <= DETAILED_BALANCE_TOL)
    lazy = bool(np.min(np.diag(P)) >= 0.5 - LAZY_TOL)
    return Chain(spec=spec, pi=pi_vec, is_reversible=reversible,
                 is_lazy=lazy, is_irreducible=irreducible)


@dataclass(eq=False)
class Spectrum:
    """Eigen-decomposition of a reversible chain.

    ``eigenvalues`` are sorted in decreasing order with the Perron value
    first.  ``eigenfunctions`` holds one function per column, orthonormal
    in the pi-weighted inner product, so that

        P^t(x, y) = sum_i f_i(x) f_i(y) pi(y) eigenvalues[i]^t.
    """

    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    pi: np.ndarray
    t_rel: float = field(init=False)
    t_rel_absolute: float = field(init=False)

    def __post_init__(self) -> None:
        lam = self.eigenvalues
        if abs(lam[0] - 1.0) > 1e-8:
            raise ChainValidationError(f"leading eigenvalue {lam[0]!r} is not 1")
        if lam.max() > 1.0 + EIGENVALUE_RANGE_TOL or lam.min() < -1.0 - EIGENVALUE_RANGE_TOL:
            raise ChainValidationError("eigenvalue outside [-1, 1]")
        gap = 1.0 - lam[1]
        if gap <= 0:
            raise ChainValidationError("no spectral gap; chain appears reducible")
        self.t_rel = 1.0 / gap
        abs_gap = min(gap, 1.0 - abs(lam[-1])) if lam[-1] < 0 else gap
        if abs_gap <= 0:
            raise ChainValidationError("chain is periodic (eigenvalue -1)")
        self.t_rel_absolute = 1.0 / abs_gap

    @property
    def lambda_2(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[-1])

    def transition_power(self, t: int) -> np.ndarray:
        """Dense P^t from the spectral sum."""
        lam_t = np.power(self.eigenvalues, t)
        F = self.eigenfunctions
        return (F * lam_t) @ (F.T * self.pi)

    def heat_matrix(self, t: float) -> np.ndarray:
        """Dense continuized kernel exp(-t (I - P)) from the spectral sum."""
        w = np.exp(-(1.0 - self.eigenvalues) * t)
        F = self.eigenfunctions
        return (F * w) @ (F.T * self.pi)


def spectral_decomposition(chain: Chain) -> Spectrum:
    """Symmetrize, diagonalize, and return pi-orthonormal eigenfunctions.

    Refuses non-reversible or reducible input: the symmetrization
    ``D^{1/2} P D^{-1/2}`` is only similar to P under detailed balance.
    """
    chain.require(reversible=True, irreducible=True)
    pi = chain.pi
    sq = np.sqrt(pi)
    S = (sq[:, None] * chain.P) / sq[None, :]
    S = 0.5 * (S + S.T)
    lam, V = np.linalg.eigh(S)
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    V = V[:, order]
    # Fix the sign convention so the Perron column is the constant function.
    F = V / sq[:, None]
    for i in range(F.shape[1]):
        j = int(np.argmax(np.abs(F[:, i])))
        if F[j, i] < 0:
            F[:, i] = -F[:, i]
    return Spectrum(eigenvalues=lam, eigenfunctions=F, pi=pi)


def _power_iterate_row(chain: Chain, x: int, t: int) -> np.ndarray:
    v = np.zeros(chain.n)
    v[x] = 1.0
    for _ in range(t):
        v = v @ chain.P
    return v


def step_distribution(chain: Chain, x: int, t: int, method: str = "iterate") -> np.ndarray:
    """Distribution of the chain after ``t`` steps from state ``x``.

    ``method`` selects the route: ``"iterate"`` multiplies the row vector
    through P (binary powering for large t), ``"spectral"`` evaluates the
    eigenfunction sum, ``"check"`` computes both and insists they agree to
    1e-9 before returning the iterated row.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if not 0 <= x < chain.n:
        raise ValueError(f"state {x} out of range")
    if method == "iterate":
        if t > 4096:
            M = np.linalg.matrix_power(chain.P, t)
            return M[x].copy()
        return _power_iterate_row(chain, x, t)
    if method == "spectral":
        return chain.spectrum.transition_power(t)[x]
    if method == "check":
        a = step_distribution(chain, x, t, "iterate")
        b = step_distribution(chain, x, t, "spectral")
        err = float(np.max(np.abs(a - b)))
        if err > 1e-9:
            raise ChainValidationError(f"spectral and iterated P^t rows disagree by {err:.3e}")
        return a
    raise ValueError(f"unknown method {method!r}")


def transition_power(chain: Chain, t: int, method: str = "auto") -> np.ndarray:
    """Dense t-step matrix.  ``auto`` uses binary powering; ``spectral``
    uses the eigenfunction sum (reversible chains only)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if method == "spectral":
        return chain.spectrum.transition_power(t)
    return np.linalg.matrix_power(chain.P, t)


def heat_kernel(chain: Chain, x: int, t: float) -> np.ndarray:
    """Row x of the continuized kernel exp(-t (I - P))."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return chain.spectrum.heat_matrix(t)[x]


def heat_matrix(chain: Chain, t: float) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be >= 0")
    return chain.spectrum.heat_matrix(t)


# ---------------------------------------------------------------------------
# JSON round trip
#
# Format: {"n": int, "P": [[...], ...], "labels": [...]?, "pi": [...]?}


def write_json_atomic(path: str, payload: dict) -> None:
    """Serialize to a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def chain_to_json(chain: Chain | ChainSpec, path: str) -> None:
    """Write a chain to disk, normalizing any row whose float sum drifted.

    The normalization threshold sits above the residue normalization
    itself can leave, so writing a file that was just written back out
    reproduces it bit for bit.
    """
    spec = chain.spec if isinstance(chain, Chain) else chain
    P = np.array(spec.P, dtype=float)
    for i in range(P.shape[0]):
        s = P[i].sum()
        if abs(s - 1.0) > 1e-13:
            P[i] /= s
    payload: dict = {"n": int(P.shape[0]), "P": P.tolist()}
    if spec.labels is not None:
        payload["labels"] = list(spec.labels)
    pi = chain.pi if isinstance(chain, Chain) else spec.pi
    if pi is not None:
        payload["pi"] = np.asarray(pi, dtype=float).tolist()
    write_json_atomic(path, payload)


def chain_from_json(path: str) -> Chain:
    with open(path) as fh:
        payload = json.load(fh)
    P = np.array(payload["P"], dtype=float)
    if int(payload.get("n", P.shape[0])) != P.shape[0]:
        raise ChainValidationError("declared n does not match matrix shape")
    pi = payload.get("pi")
    spec = ChainSpec(P=P, pi=None if pi is None else np.array(pi, dtype=float),
                     labels=payload.get("labels"))
    return load_chain(spec)
