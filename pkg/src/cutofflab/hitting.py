"""Hitting-time tails, worst-set hitting profiles, and return-time identities.

For a target set A the killed kernel ``P_B`` (the restriction of P to
``B = complement(A)``) drives everything: tails are iterates ``P_B^t 1``,
moments come from the linear systems ``(I - P_B) h = 1`` and
``(I - P_B) m = 2h - 1``, and the eigen-decomposition of ``P_B`` in the
pi-weighted inner product yields the exact mixture-of-geometrics form of
the tail together with its decay radius.

The worst-set quantity ``p_x(alpha, t) = max { Pr_x[T_A > t] :
pi(A) >= alpha }`` is computed exactly by enumerating inclusion-minimal
feasible sets (enlarging a target can only shrink the tail) up to a state
count threshold, and by a greedy candidate family above it, in which case
results are flagged as certified lower bounds only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .chain import Chain

__all__ = [
    "TargetSet",
    "HittingProfile",
    "hitting_tail",
    "WorstSetTail",
    "worst_set_tail",
    "WorstTailProfile",
    "worst_tail_profile",
    "HitResult",
    "hit_time",
    "QSDecomposition",
    "qs_decomposition",
    "GoodSet",
    "good_set",
    "BlowUpSet",
    "blow_up_set",
    "KacQuantities",
    "kac_quantities",
    "mgf",
    "DEFAULT_EXACT_THRESHOLD",
]

DEFAULT_EXACT_THRESHOLD = 14
_FEAS_TOL = 1e-12


class IdentityCheckError(RuntimeError):
    """An exact identity failed beyond numerical tolerance; indicates a bug."""


# ---------------------------------------------------------------------------
# target sets


@dataclass(frozen=True)
class TargetSet:
    """An immutable set of states together with its stationary mass."""

    members: tuple[int, ...]
    pi_mass: float

    @staticmethod
    def from_states(chain: Chain, states) -> "TargetSet":
        members = tuple(sorted({int(s) for s in states}))
        if not members:
            raise ValueError("target set must be nonempty")
        if members[0] < 0 or members[-1] >= chain.n:
            raise ValueError("target state out of range")
        return TargetSet(members=members, pi_mass=float(chain.pi[list(members)].sum()))

    def indicator(self, n: int) -> np.ndarray:
        ind = np.zeros(n, dtype=bool)
        ind[list(self.members)] = True
        return ind


def _as_target(chain: Chain, A) -> TargetSet:
    if isinstance(A, TargetSet):
        return A
    return TargetSet.from_states(chain, A)


def _start_vector(chain: Chain, start) -> np.ndarray:
    if np.isscalar(start):
        v = np.zeros(chain.n)
        v[int(start)] = 1.0
        return v
    v = np.asarray(start, dtype=float)
    if v.shape != (chain.n,) or v.min() < -1e-15 or abs(v.sum() - 1.0) > 1e-10:
        raise ValueError("start must be a state index or a distribution over states")
    return np.clip(v, 0.0, None)


def _killed(chain: Chain, A: TargetSet) -> tuple[np.ndarray, np.ndarray]:
    """Indices of B = complement(A) and the killed kernel P_B."""
    mask = A.indicator(chain.n)
    B = np.nonzero(~mask)[0]
    return B, chain.P[np.ix_(B, B)]


def _absorption_moments(chain: Chain, A: TargetSet) -> tuple[np.ndarray, np.ndarray]:
    """Full-space vectors of E_x[T_A] and E_x[T_A^2] (zero on A)."""
    B, PB = _killed(chain, A)
    h = np.zeros(chain.n)
    m = np.zeros(chain.n)
    if B.size:
        I = np.eye(B.size)
        hB = np.linalg.solve(I - PB, np.ones(B.size))
        mB = np.linalg.solve(I - PB, 2.0 * hB - 1.0)
        h[B] = hB
        m[B] = mB
    return h, m


# ---------------------------------------------------------------------------
# tails from a fixed start


@dataclass(eq=False)
class HittingProfile:
    """Tail of T_A from a fixed start, with exact first and second moments.

    ``tail[t] = Pr[T_A > t]`` for integer t in the discrete case; for the
    continuized chain ``times`` carries the (real) evaluation grid.  The
    continuized mean equals the discrete one (unit-rate jumps), while the
    continuized second moment is ``mean + second_moment`` of the jump count.
    """

    target: TargetSet
    times: np.ndarray
    tail: np.ndarray
    mean: float
    second_moment: float
    continuous: bool

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean ** 2


def hitting_tail(chain: Chain, start, A, t_max: int = 64,
                 continuous: bool = False, t_grid=None) -> HittingProfile:
    """Exact tail ``Pr[T_A > t]`` and moments of the hitting time of A.

    ``start`` may be a state index or a distribution.  Discrete tails are
    produced for ``t = 0 .. t_max`` by iterating the killed kernel; with
    ``continuous=True`` the tail is evaluated on ``t_grid`` (default: a
    uniform grid up to ``t_max``) through the eigen-decomposition of the
    killed kernel.
    """
    A = _as_target(chain, A)
    mu = _start_vector(chain, start)
    B, PB = _killed(chain, A)
    h, m2 = _absorption_moments(chain, A)
    mean = float(mu @ h)
    second = float(mu @ m2)
    if not continuous:
        u = np.ones(B.size)
        muB = mu[B]
        tail = np.empty(t_max + 1)
        for t in range(t_max + 1):
            tail[t] = muB @ u
            u = PB @ u
        return HittingProfile(target=A, times=np.arange(t_max + 1), tail=tail,
                              mean=mean, second_moment=second, continuous=False)
    if t_grid is None:
        t_grid = np.linspace(0.0, float(t_max), 129)
    times = np.asarray(t_grid, dtype=float)
    rates, W = _ct_tail_system(chain, A)
    weights = mu[B] @ W
    tail = np.clip(np.exp(-np.outer(times, rates)) @ weights, 0.0, None)
    return HittingProfile(target=A, times=times, tail=tail, mean=mean,
                          second_moment=mean + second, continuous=True)


def _ct_tail_system(chain: Chain, A: TargetSet) -> tuple[np.ndarray, np.ndarray]:
    """Rates (1 - gamma_i) and per-state weight matrix for continuized tails.

    Returns ``(rates, W)`` with ``Pr_x[T_A > t] = sum_i W[x_B, i] exp(-rates[i] t)``
    for x in B (row indices follow the B ordering).
    """
    chain.require(reversible=True)
    B, PB = _killed(chain, A)
    if B.size == 0:
        return np.zeros(0), np.zeros((0, 0))
    pb = chain.pi[B]
    pb = pb / pb.sum()
    sq = np.sqrt(pb)
    S = 0.5 * ((sq[:, None] * PB / sq[None, :]) + (sq[:, None] * PB / sq[None, :]).T)
    gam, V = np.linalg.eigh(S)
    G = V / sq[:, None]
    coef = pb @ G
    W = G * coef[None, :]
    return 1.0 - gam, W


# ---------------------------------------------------------------------------
# subset enumeration


def _subset_tables(pi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All-subset membership table and mass vector for small state spaces."""
    n = pi.size
    masks = np.arange(1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    masses = bits @ pi
    return bits, masses


def _minimal_feasible_sets(pi: np.ndarray, alpha: float) -> list[np.ndarray]:
    """Inclusion-minimal sets with pi(A) >= alpha, as boolean rows."""
    n = pi.size
    if n > 20:
        raise ValueError("exact subset enumeration is limited to n <= 20")
    bits, masses = _subset_tables(pi)
    feasible = masses >= alpha - _FEAS_TOL
    # removing state b from a feasible set must break feasibility
    reduced = masses[:, None] - pi[None, :]
    breaks = ~bits | (reduced < alpha - _FEAS_TOL)
    minimal = feasible & breaks.all(axis=1)
    minimal[0] = False
    return [bits[i] for i in np.nonzero(minimal)[0]]


def _greedy_candidate_sets(chain: Chain, alpha: float, starts) -> list[np.ndarray]:
    """Heuristic candidate targets: hardest-to-reach states first.

    States are ranked by the exact mean hitting time from each start
    (fundamental-matrix identity), a prefix of mass >= alpha is taken, and
    the prefix is pruned to inclusion-minimality from the easy end.
    """
    pi = chain.pi
    n = chain.n
    Z = np.linalg.inv(np.eye(n) - chain.P + np.outer(np.ones(n), pi))
    out: list[np.ndarray] = []
    seen: set[bytes] = set()
    for x in starts:
        score = (np.diag(Z) - Z[x]) / pi  # E_x[T_y] for every y
        order = np.argsort(-score, kind="stable")
        sel = np.zeros(n, dtype=bool)
        mass = 0.0
        for y in order:
            sel[y] = True
            mass += pi[y]
            if mass >= alpha - _FEAS_TOL:
                break
        for y in order[::-1]:
            if sel[y] and mass - pi[y] >= alpha - _FEAS_TOL:
                sel[y] = False
                mass -= pi[y]
        key = sel.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(sel)
    return out


def _candidate_sets(chain: Chain, alpha: float, exact_threshold: int,
                    starts=None) -> tuple[list[np.ndarray], bool]:
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    if chain.n <= exact_threshold:
        return _minimal_feasible_sets(chain.pi, alpha), True
    if starts is None:
        starts = range(min(chain.n, 8))
    return _greedy_candidate_sets(chain, alpha, starts), False


class _TailStack:
    """Joint killed-kernel iteration over a family of candidate targets.

    Column j of V holds ``Pr_x[T_{A_j} > t]`` for every state x (zero on
    A_j); one step multiplies by P and re-kills the target rows.
    """

    def __init__(self, chain: Chain, sets: list[np.ndarray]):
        self.P = chain.P
        self.keep = ~np.stack(sets, axis=1) if sets else np.zeros((chain.n, 0), dtype=bool)
        self.V = self.keep.astype(float)
        self.t = 0

    def step(self) -> None:
        self.V = self.P @ self.V
        self.V *= self.keep
        self.t += 1

    def per_state_max(self) -> np.ndarray:
        if self.V.shape[1] == 0:
            return np.zeros(self.P.shape[0])
        return self.V.max(axis=1)


@dataclass(eq=False)
class WorstSetTail:
    """Value of p_x(alpha, t) with the witness target achieving it."""

    value: float
    witness: tuple[int, ...]
    exact: bool


def worst_set_tail(chain: Chain, x: int, alpha: float, t: int,
                   exact_threshold: int = DEFAULT_EXACT_THRESHOLD) -> WorstSetTail:
    """Worst-case tail over targets of mass >= alpha, from state x.

    Exact for ``n <= exact_threshold`` via minimal-set enumeration; above
    that a greedy family gives a certified lower bound (``exact=False``).
    Ties between witnesses resolve to the lexicographically smallest
    member tuple.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    sets, exact = _candidate_sets(chain, alpha, exact_threshold, starts=[int(x)])
    stack = _TailStack(chain, sets)
    for _ in range(t):
        stack.step()
    row = stack.V[int(x)]
    best, witness = 0.0, ()
    for j, sel in enumerate(sets):
        members = tuple(np.nonzero(sel)[0].tolist())
        if row[j] > best + 1e-15 or (abs(row[j] - best) <= 1e-15 and witness and members < witness):
            best, witness = float(row[j]), members
        elif not witness and row[j] >= best:
            best, witness = float(row[j]), members
    return WorstSetTail(value=best, witness=witness, exact=exact)


@dataclass(eq=False)
class WorstTailProfile:
    """Per-start worst-set tails p_x(alpha, t) for t = 0 .. T.

    ``tails[t, x]`` is exact when ``exact`` is set, otherwise a lower
    bound from the greedy candidate family.
    """

    alpha: float
    tails: np.ndarray
    exact: bool

    def global_sequence(self) -> np.ndarray:
        return self.tails.max(axis=1)

    def hit(self, eps: float, x: int | None = None) -> int:
        seq = self.tails[:, x] if x is not None else self.global_sequence()
        idx = np.nonzero(seq <= eps + 1e-12)[0]
        if idx.size == 0:
            raise RuntimeError(f"profile too short: p(alpha, t) never reached {eps}")
        return int(idx[0])


def worst_tail_profile(chain: Chain, alpha: float, stop_level: float,
                       t_max: int = 200_000,
                       exact_threshold: int = DEFAULT_EXACT_THRESHOLD) -> WorstTailProfile:
    """Scan p_x(alpha, t) jointly for all starts until the global maximum
    falls to ``stop_level``."""
    sets, exact = _candidate_sets(chain, alpha, exact_threshold)
    stack = _TailStack(chain, sets)
    rows = [stack.per_state_max()]
    while rows[-1].max() > stop_level + 1e-12:
        if stack.t >= t_max:
            raise RuntimeError("worst-set tail scan exceeded t_max")
        stack.step()
        rows.append(stack.per_state_max())
    return WorstTailProfile(alpha=alpha, tails=np.array(rows), exact=exact)


@dataclass(eq=False)
class HitResult:
    value: float
    exact: bool
    bracket: tuple[float, float] | None = None


def _hit_ct_interval(chain: Chain, alpha: float, eps: float,
                     exact_threshold: int = DEFAULT_EXACT_THRESHOLD) -> tuple[float, float, bool]:
    sets, exact = _candidate_sets(chain, alpha, exact_threshold)
    systems = []
    for sel in sets:
        A = TargetSet.from_states(chain, np.nonzero(sel)[0])
        if A.pi_mass >= 1.0 - 1e-15 and sel.all():
            continue
        rates, W = _ct_tail_system(chain, A)
        systems.append((rates, W))

    def p_ct(t: float) -> float:
        worst = 0.0
        for rates, W in systems:
            vals = W @ np.exp(-rates * t)
            worst = max(worst, float(vals.max()))
        return worst

    t_rel = chain.spectrum.t_rel
    tol = 1e-3 * max(t_rel, 1e-9)
    lo, hi = 0.0, max(1.0, t_rel)
    if p_ct(lo) <= eps:
        return 0.0, 0.0, exact
    while p_ct(hi) > eps:
        lo, hi = hi, 2.0 * hi
        if hi > 1e12:
            raise RuntimeError("failed to bracket continuized hit time")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if p_ct(mid) <= eps:
            hi = mid
        else:
            lo = mid
    return lo, hi, exact


def hit_time(chain: Chain, alpha: float, eps: float, x: int | None = None,
             continuous: bool = False,
             exact_threshold: int = DEFAULT_EXACT_THRESHOLD) -> HitResult:
    """Smallest t with p(alpha, t) <= eps (worst start unless ``x`` given).

    Discrete chains return an integer-valued time from a forward scan.
    The continuized variant bisects the spectral tail evaluation to a
    1e-3 * t_rel bracket and reports its upper end, with the bracket
    attached.  Results carry ``exact=False`` when the greedy candidate
    family was used (the value is then a certified lower bound).
    """
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    if continuous:
        if x is not None:
            raise ValueError("per-start continuized hit times are not supported")
        lo, hi, exact = _hit_ct_interval(chain, alpha, eps, exact_threshold)
        return HitResult(value=hi, exact=exact, bracket=(lo, hi))
    prof = worst_tail_profile(chain, alpha, stop_level=eps, exact_threshold=exact_threshold)
    return HitResult(value=float(prof.hit(eps, x=x)), exact=prof.exact)


# ---------------------------------------------------------------------------
# quasi-stationary structure of the killed kernel


@dataclass(eq=False)
class QSDecomposition:
    """Mixture-of-geometrics form of the stationary-start tail.

    ``Pr_{pi_B}[T_A > t] = sum_i weights[i] * gammas[i]^t`` with
    nonnegative weights summing to one and ``|gamma_i| <= gammas[0] < 1``.
    Components of B that are separated in the killed kernel are
    diagonalized independently and merged.
    """

    gammas: np.ndarray
    weights: np.ndarray
    pi_A: float

    @property
    def gamma_1(self) -> float:
        return float(self.gammas[0]) if self.gammas.size else 0.0

    def tail(self, t) -> np.ndarray | float:
        # integer powers only: gammas may be negative
        t_arr = np.atleast_1d(np.asarray(t)).astype(np.int64)
        if self.gammas.size:
            vals = (self.gammas[None, :] ** t_arr[:, None]) @ self.weights
        else:
            vals = np.zeros(t_arr.shape, dtype=float)
        vals = np.clip(vals, 0.0, None)
        return float(vals[0]) if np.isscalar(t) or np.ndim(t) == 0 else vals

    def tail_ct(self, t) -> np.ndarray | float:
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if self.gammas.size:
            vals = np.exp(-np.outer(t_arr, 1.0 - self.gammas)) @ self.weights
        else:
            vals = np.zeros(t_arr.shape)
        vals = np.clip(vals, 0.0, None)
        return float(vals[0]) if np.isscalar(t) or np.ndim(t) == 0 else vals


def qs_decomposition(chain: Chain, A) -> QSDecomposition:
    """Diagonalize the killed kernel under the pi_B inner product.

    Requires a reversible chain and a proper nonempty target.  When B
    splits into several killed-kernel components the per-component
    spectra are combined with weights pi(component)/pi(B); the leading
    eigenvalue of every component obeys the same spectral-gap ceiling
    ``1 - pi(A)/t_rel``, so the merged list does too.
    """
    chain.require(reversible=True)
    A = _as_target(chain, A)
    B, PB = _killed(chain, A)
    if B.size == 0:
        raise ValueError("target covers every state; killed kernel is empty")
    n_comp, labels = connected_components(csr_matrix(PB > 0), directed=True, connection="strong")
    piB_total = chain.pi[B].sum()
    gammas: list[np.ndarray] = []
    weights: list[np.ndarray] = []
    for c in range(n_comp):
        idx = np.nonzero(labels == c)[0]
        sub = PB[np.ix_(idx, idx)]
        p_sub = chain.pi[B[idx]]
        w_comp = p_sub.sum() / piB_total
        p_cond = p_sub / p_sub.sum()
        sq = np.sqrt(p_cond)
        S = sq[:, None] * sub / sq[None, :]
        S = 0.5 * (S + S.T)
        gam, V = np.linalg.eigh(S)
        G = V / sq[:, None]
        a = (p_cond @ G) ** 2
        gammas.append(gam)
        weights.append(w_comp * a)
    g = np.concatenate(gammas)
    w = np.concatenate(weights)
    order = np.argsort(-g, kind="stable")
    g, w = g[order], w[order]
    total = w.sum()
    if abs(total - 1.0) > 1e-9:
        raise IdentityCheckError(f"killed-kernel spectral weights sum to {total!r}")
    if w.min() < -1e-12:
        raise IdentityCheckError("negative spectral weight in killed kernel decomposition")
    if g.size and np.abs(g).max() > g[0] + 1e-12:
        raise IdentityCheckError("killed-kernel eigenvalue exceeds the leading one in modulus")
    return QSDecomposition(gammas=g, weights=np.clip(w, 0.0, None), pi_A=A.pi_mass)


# ---------------------------------------------------------------------------
# good sets and blow-up sets


@dataclass(eq=False)
class GoodSet:
    """States whose A-occupation stays within ``m sigma_s`` of pi(A) forever
    past time s, certified by a finite scan plus a spectral tail bound."""

    members: np.ndarray
    measure: float
    sigma: float
    threshold: float
    horizon: int


def good_set(chain: Chain, A, s: int, m: float) -> GoodSet:
    """Exact membership of the deviation-controlled set at scale m.

    A state y belongs iff ``|Pr_y[X_k in A] - pi(A)| < m sigma_s`` for all
    k >= s, where ``sigma_s = exp(-s/t_rel) sqrt(pi(A)(1-pi(A)))``.  The
    scan runs to the first horizon where the spectral envelope
    ``exp(-k/t_rel) sqrt(pi(A)(1-pi(A))) / sqrt(min pi)`` falls strictly
    below the threshold, after which no state can violate.
    """
    chain.require(reversible=True, lazy=True)
    A = _as_target(chain, A)
    if s < 0:
        raise ValueError("s must be >= 0")
    if m <= 0:
        raise ValueError("m must be positive")
    pa = A.pi_mass
    if not 0.0 < pa < 1.0:
        raise ValueError("good set requires a proper nonempty target (0 < pi(A) < 1)")
    t_rel = chain.spectrum.t_rel
    rho = math.sqrt(pa * (1.0 - pa))
    sigma = math.exp(-s / t_rel) * rho
    threshold = m * sigma
    msq = m * math.sqrt(chain.pi.min())
    extra = 0 if msq >= 1.0 else math.ceil(t_rel * math.log(1.0 / msq))
    horizon = s + extra + 1
    ind = A.indicator(chain.n).astype(float)
    g = ind.copy()
    ok = np.ones(chain.n, dtype=bool)
    for k in range(horizon + 1):
        if k >= s:
            ok &= np.abs(g - pa) < threshold
        g = chain.P @ g
    return GoodSet(members=ok, measure=float(chain.pi[ok].sum()), sigma=sigma,
                   threshold=threshold, horizon=horizon)


@dataclass(eq=False)
class BlowUpSet:
    """Starts that still miss A with probability >= alpha at the blow-up
    horizon ceil(t_rel * w / pi(A))."""

    t: int
    members: np.ndarray
    measure: float
    ceiling: float


def blow_up_set(chain: Chain, A, w: float, alpha: float) -> BlowUpSet:
    """Identify slow starts at the w-scaled horizon and its measure ceiling.

    The ceiling ``pi(complement A) e^{-w} / alpha`` is returned alongside;
    callers assert it, keeping computation and certification separate.
    """
    if w < 0:
        raise ValueError("w must be >= 0")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    A = _as_target(chain, A)
    t_rel = chain.spectrum.t_rel
    if A.pi_mass <= 0:
        raise ValueError("target must have positive mass")
    t = math.ceil(t_rel * w / A.pi_mass)
    B, PB = _killed(chain, A)
    u = np.ones(B.size)
    for _ in range(t):
        u = PB @ u
    tails = np.zeros(chain.n)
    tails[B] = u
    members = tails >= alpha
    ceiling = (1.0 - A.pi_mass) * math.exp(-w) / alpha
    return BlowUpSet(t=t, members=members, measure=float(chain.pi[members].sum()),
                     ceiling=ceiling)


# ---------------------------------------------------------------------------
# return-time identities


@dataclass(eq=False)
class KacQuantities:
    """Escape probabilities and entry-law hitting moments for a target A.

    ``phi_A`` is the one-step escape probability of A under pi conditioned
    on A; ``psi`` the entry law into B = complement(A); the moments are
    exact solves.  Construction enforces the flow symmetry
    ``pi(A) phi_A = pi(B) phi_B`` and the two entry-law identities
    ``E_psi[T_A] = 1/phi_B`` and
    ``E_psi[T_A^2] = E_psi[T_A] (2 E_{pi_B}[T_A] - 1)``.
    """

    target: TargetSet
    phi_A: float
    phi_B: float
    psi: np.ndarray
    mean_from_psi: float
    second_from_psi: float
    mean_from_pi_B: float


def kac_quantities(chain: Chain, A, check_tol: float = 1e-9) -> KacQuantities:
    A = _as_target(chain, A)
    ind = A.indicator(chain.n)
    B = ~ind
    if not B.any():
        raise ValueError("target covers every state; complement is empty")
    pi = chain.pi
    P = chain.P
    pa = A.pi_mass
    pb = 1.0 - pa
    flow_AB = float(pi[ind] @ P[np.ix_(ind, B)].sum(axis=1))
    flow_BA = float(pi[B] @ P[np.ix_(B, ind)].sum(axis=1))
    phi_A = flow_AB / pa
    phi_B = flow_BA / pb
    scale = max(1.0, abs(flow_AB), abs(flow_BA))
    if abs(flow_AB - flow_BA) > 1e-12 * scale:
        raise IdentityCheckError("stationary flow across the cut is asymmetric")
    if flow_AB <= 0:
        raise ValueError("complement of the target is unreachable in one step; entry law undefined")
    psi = np.zeros(chain.n)
    psi[B] = (pi[ind] / pa) @ P[np.ix_(ind, B)] / phi_A
    h, m2 = _absorption_moments(chain, A)
    mean_psi = float(psi @ h)
    second_psi = float(psi @ m2)
    piB = np.where(B, pi, 0.0)
    piB = piB / piB.sum()
    mean_piB = float(piB @ h)

    def _rel(a: float, b: float) -> float:
        return abs(a - b) / max(1.0, abs(a), abs(b))

    if _rel(mean_psi, 1.0 / phi_B) > check_tol:
        raise IdentityCheckError(
            f"entry-law mean {mean_psi!r} != 1/phi_B = {1.0 / phi_B!r}")
    if _rel(second_psi, mean_psi * (2.0 * mean_piB - 1.0)) > check_tol:
        raise IdentityCheckError("entry-law second moment identity failed")
    return KacQuantities(target=A, phi_A=phi_A, phi_B=phi_B, psi=psi,
                         mean_from_psi=mean_psi, second_from_psi=second_psi,
                         mean_from_pi_B=mean_piB)


def mgf(chain: Chain, start, A, z: float) -> float:
    """Exact E[z^{T_A}] from a start state or distribution.

    Solves ``(I - z P_B) phi = z P(., A)`` on B.  Requires ``z`` inside the
    convergence radius: ``z * gamma_1 < 1`` where gamma_1 is the spectral
    radius of the killed kernel; otherwise raises with the radius reported.
    """
    if z <= 0:
        raise ValueError("z must be positive")
    A = _as_target(chain, A)
    mu = _start_vector(chain, start)
    B, PB = _killed(chain, A)
    if B.size == 0:
        return 1.0
    gamma_1 = float(np.max(np.abs(np.linalg.eigvals(PB)))) if B.size else 0.0
    if z * gamma_1 >= 1.0 - 1e-12:
        raise ValueError(f"z = {z} is outside the convergence radius 1/gamma_1 = {1.0 / gamma_1}")
    c = 1.0 - PB.sum(axis=1)
    phi = np.linalg.solve(np.eye(B.size) - z * PB, z * c)
    return float(mu[~A.indicator(chain.n)] @ phi + mu[A.indicator(chain.n)].sum())
