"""Inequality and identity suites evaluated on one finite chain at a time.

Every suite turns a family of finite-n bounds -- mixing-time sandwiches,
hitting-time equivalences, killed-walk spectra, return-time identities,
tree-crossing concentration, banded-chain comparisons -- into concrete
number-against-number records on the given chain.  Nothing here is
asymptotic; a record stores both sides of one comparison at one parameter
tuple, and preconditions that fail are recorded as skips, never dropped.

Suite ids (see ``SUITES``):

- ``relaxation``          mixing time vs relaxation time, both directions
- ``tv-hit``              worst-case TV distance vs large-set hitting times
- ``set-probability``     set-probability floors after a per-start hit time
- ``submultiplicativity`` products of hitting tails and TV doubling
- ``hit-levels``          transfer between hitting thresholds
- ``escape``              stationary escape tails, slow-start sets, mean hits
- ``killed-spectrum``     spectral decomposition of the killed kernel
- ``maximal-function``    even-time maximal inequality, variance contraction
- ``good-set``            mass of starts with uniformly small set deviations
- ``martingale-tail``     eigenfunction floors for escape tails
- ``return-time``         return-time identities (flow symmetry, moments)
- ``return-mgf``          exponential moments of return times
- ``mix-hit``             chained mixing/hitting comparisons across levels
- ``lazy-floor``          floors forced by holding probabilities
- ``continuous-time``     heat-kernel analogues with integer ceilings dropped
- ``tree-window``         tree crossing moments and the mixing window
- ``crossing-tails``      sub-gaussian tails for tree passage times
- ``banded``              banded-chain block decomposition comparisons
- ``block-moments``       measured block-crossing constants (reported only)

``run_suite``/``run_suites`` evaluate suites on a chain and return sorted
:class:`~cutofflab.reporting.Report` objects; ``cutoff_scan`` tabulates
mixing windows and ratios across growing sizes of one family.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .chain import Chain
from .families import FAMILIES
from .hitting import (
    IdentityCheckError,
    TargetSet,
    WorstTailProfile,
    _hit_ct_interval,
    kac_quantities,
    mgf,
    worst_tail_profile,
)
from .mixing import (
    _d_spectral,
    _mixing_time_ct_interval,
    maximal_function,
    mixing_profile,
    mixing_time,
    worst_tv,
)
from .reporting import (
    Record,
    Report,
    check_identity,
    check_le,
    fingerprint,
    report_value,
    skip,
)
from .sbd import (
    _crossing_moments,
    blocks,
    central_block_hit,
    classify_sbd,
    comparable_start_bound,
)
from .trees import (
    _subtree_vertices,
    crossing_time,
    path_variance,
    tail_bound_check,
    tau_root,
    tau_sandwich_check,
    tree_from_chain,
)

__all__ = [
    "SUITES",
    "SUITE_IDS",
    "run_suite",
    "run_suites",
    "CutoffScan",
    "ScanRow",
    "cutoff_scan",
]

EPS_GRID = (1 / 16, 1 / 8, 1 / 4)
ALPHA_GRID = (1 / 4, 1 / 2, 3 / 4)
DEVIATION_GRID = (3.0, 4.0, 6.0)
WORK_GRID = (0.5, 1.0, 2.0)
TAIL_T_GRID = (0, 1, 2, 5, 10, 20, 30)
STOP_LEVEL = 1 / 512
EXACT_THRESHOLD = 14
# Spectral reconstruction of P^t amplifies roundoff by up to 1/sqrt(min pi);
# below this floor we fall back to iterated products.
_SPECTRAL_SAFE_MIN_PI = 1e-12


def _ceil(x: float) -> int:
    return int(math.ceil(x))


def _log_plus(x: float) -> float:
    return max(math.log(x), 0.0)


# ---------------------------------------------------------------------------
# killed-kernel spectral system (shared across the escape/return suites)


@dataclass(eq=False)
class _KilledSystem:
    """Eigensystem of the kernel killed on A, in survivor coordinates.

    The symmetrized killed kernel diag(sqrt(pi_B)) P_B diag(1/sqrt(pi_B))
    has a real spectrum gamma_1 >= ... >= gamma_k; started from pi
    restricted to the survivor set B, the no-hit probability is the
    mixture ``sum_i weights_i gamma_i^t`` with nonnegative weights that
    add to one.  Powers are taken in closed form so tails at very large t
    cost one vector operation.
    """

    B: np.ndarray
    pi_A: float
    pi_B: float
    gammas: np.ndarray
    weights: np.ndarray
    U: np.ndarray
    sqrt_d: np.ndarray
    right: np.ndarray

    def _powers(self, ts) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        mag = np.abs(self.gammas)[None, :] ** ts[:, None]
        neg = self.gammas < 0.0
        if neg.any():
            odd = (ts.astype(np.int64) % 2) == 1
            sign = np.where(neg[None, :] & odd[:, None], -1.0, 1.0)
            mag = mag * sign
        return mag

    def tail_stationary(self, ts) -> np.ndarray:
        """Pr[T_A > t] from pi conditioned on B, for each t in ts."""
        return np.clip(self._powers(ts) @ self.weights, 0.0, None)

    def tail_rows(self, t) -> np.ndarray:
        """Pr_x[T_A > t] for every survivor x (one t, possibly huge)."""
        coef = self._powers([t])[0] * self.right
        return np.clip((self.U @ coef) / self.sqrt_d, 0.0, 1.0)

    def tail_state(self, pos: int, ts) -> np.ndarray:
        lead = self.U[pos] / self.sqrt_d[pos]
        return np.clip(self._powers(ts) @ (lead * self.right), 0.0, 1.0)

    def tail_dist(self, dist_B: np.ndarray, ts) -> np.ndarray:
        lead = (dist_B / self.sqrt_d) @ self.U
        return np.clip(self._powers(ts) @ (lead * self.right), 0.0, None)

    def mean_stationary(self) -> float:
        return float(np.sum(self.weights / (1.0 - self.gammas)))


def _build_killed(chain: Chain, mask: np.ndarray) -> _KilledSystem:
    B = np.flatnonzero(~mask)
    if B.size == 0:
        raise ValueError("target covers the whole space; nothing survives")
    d = chain.pi[B]
    pi_B = float(d.sum())
    sq = np.sqrt(d)
    S = (sq[:, None] * chain.P[np.ix_(B, B)]) / sq[None, :]
    S = 0.5 * (S + S.T)
    g, U = np.linalg.eigh(S)
    order = np.argsort(g)[::-1]
    g, U = g[order], U[:, order]
    right = U.T @ sq
    weights = right ** 2 / pi_B
    return _KilledSystem(B=B, pi_A=1.0 - pi_B, pi_B=pi_B, gammas=g,
                         weights=weights, U=U, sqrt_d=sq, right=right)


# ---------------------------------------------------------------------------
# shared evaluation context


class _Ctx:
    """Caches spectra, profiles, mixing times, and killed systems so a
    batch of suites on one chain never recomputes a shared quantity."""

    def __init__(self, chain: Chain, params: dict):
        chain.require(reversible=True, irreducible=True)
        self.chain = chain
        self.params = params
        self.exact_threshold = int(params.get("exact_threshold", EXACT_THRESHOLD))
        self.seed = int(params.get("seed", 7))
        self.spectrum = chain.spectrum
        self.t_rel = float(self.spectrum.t_rel)
        self.min_pi = float(chain.pi.min())
        self.lazy = bool(chain.is_lazy)
        self.exact = chain.n <= self.exact_threshold
        self._tmix: dict[float, int] = {}
        self._tmix_ct: dict[float, tuple[float, float]] = {}
        self._profiles: dict[float, WorstTailProfile] = {}
        self._hits: dict[tuple, int] = {}
        self._hit_ct: dict[tuple, tuple[float, float, bool]] = {}
        self._killed: dict[bytes, _KilledSystem] = {}
        self._sets: dict[str, list] = {}
        self._functions: np.ndarray | None = None
        self._tree = None
        self._sbd = None

    # -- mixing ------------------------------------------------------------

    def tmix(self, eps: float) -> int:
        key = float(eps)
        t = self._tmix.get(key)
        if t is None:
            if self.chain.n <= 32:
                t = int(mixing_time(self.chain, key))
            elif self.min_pi >= _SPECTRAL_SAFE_MIN_PI:
                t = self._tmix_bisect(key)
            else:
                prof = mixing_profile(self.chain, eps_floor=key)
                t = prof.hit_level(key)
                if t is None:
                    raise RuntimeError("mixing profile ended above the level")
            self._tmix[key] = int(t)
        return self._tmix[key]

    def _tmix_bisect(self, eps: float) -> int:
        def d(t: int) -> float:
            return _d_spectral(self.chain, t)

        if d(0) <= eps + 1e-12:
            return 0
        hi = max(1, _ceil(self.t_rel * math.log(1.0 / (eps * self.min_pi))) + 8)
        lo = 0
        while d(hi) > eps + 1e-12:
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if d(mid) <= eps + 1e-12:
                hi = mid
            else:
                lo = mid
        return hi

    def tmix_ct(self, eps: float) -> tuple[float, float]:
        key = float(eps)
        if key not in self._tmix_ct:
            self._tmix_ct[key] = _mixing_time_ct_interval(self.chain, key)
        return self._tmix_ct[key]

    def dist(self, t: int) -> float:
        return worst_tv(self.chain, int(t))[0]

    # -- hitting -----------------------------------------------------------

    def profile(self, alpha: float) -> WorstTailProfile:
        key = round(float(alpha), 12)
        if key not in self._profiles:
            self._profiles[key] = worst_tail_profile(
                self.chain, alpha, stop_level=STOP_LEVEL,
                exact_threshold=self.exact_threshold)
        return self._profiles[key]

    def hit(self, alpha: float, eps: float, x: int | None = None) -> int:
        if eps >= 1.0:
            return 0
        key = (round(float(alpha), 12), round(float(eps), 15), x)
        if key not in self._hits:
            self._hits[key] = int(self.profile(alpha).hit(eps, x=x))
        return self._hits[key]

    def hit_ct(self, alpha: float, eps: float) -> tuple[float, float, bool]:
        if eps >= 1.0:
            return (0.0, 0.0, True)
        key = (round(float(alpha), 12), round(float(eps), 15))
        if key not in self._hit_ct:
            self._hit_ct[key] = _hit_ct_interval(
                self.chain, alpha, eps, exact_threshold=self.exact_threshold)
        return self._hit_ct[key]

    # -- shared objects ------------------------------------------------------

    def killed(self, mask: np.ndarray) -> _KilledSystem:
        key = mask.tobytes()
        if key not in self._killed:
            self._killed[key] = _build_killed(self.chain, mask)
        return self._killed[key]

    def sets(self, mode: str) -> list[tuple[np.ndarray, tuple[int, ...]]]:
        """Nonempty proper target sets as (mask, members) pairs."""
        if mode in self._sets:
            return self._sets[mode]
        n = self.chain.n
        if mode == "all" and n > 14:
            raise ValueError("exhaustive subset sweeps are limited to n <= 14")
        out = []
        if mode == "all" or (n <= 14 and (1 << n) - 2 <= 11):
            for bits in range(1, (1 << n) - 1):
                mask = np.array([(bits >> i) & 1 == 1 for i in range(n)])
                out.append((mask, tuple(int(i) for i in np.flatnonzero(mask))))
        elif mode == "sampled":
            rng = np.random.Generator(np.random.Philox(key=self.seed))
            masks = []
            lo = np.zeros(n, dtype=bool)
            lo[int(np.argmin(self.chain.pi))] = True
            hi = np.zeros(n, dtype=bool)
            hi[int(np.argmax(self.chain.pi))] = True
            masks.extend([lo, hi, ~hi])
            draws = 0
            while sum(1 for _ in masks) < 11 and draws < 200:
                draws += 1
                m = rng.random(n) < rng.uniform(0.15, 0.85)
                if m.any() and not m.all():
                    masks.append(m)
            seen = set()
            uniq = []
            for m in masks:
                key = m.tobytes()
                if key not in seen:
                    seen.add(key)
                    uniq.append(m)
            uniq.sort(key=lambda m: (int(m.sum()), m.tobytes()))
            out = [(m, tuple(int(i) for i in np.flatnonzero(m))) for m in uniq]
        else:
            raise ValueError(f"unknown set mode {mode!r}; use 'sampled' or 'all'")
        self._sets[mode] = out
        return out

    def functions(self, count: int) -> np.ndarray:
        if self._functions is None or self._functions.shape[0] < count:
            rng = np.random.Generator(np.random.Philox(key=self.seed ^ 0x5EED))
            self._functions = rng.standard_normal((max(count, 4), self.chain.n))
        return self._functions[:count]

    def tree(self):
        if self._tree is None:
            try:
                self._tree = (tree_from_chain(self.chain), "")
            except (ValueError, RuntimeError) as exc:
                self._tree = (None, str(exc))
        return self._tree

    def sbd(self):
        if self._sbd is None:
            self._sbd = classify_sbd(self.chain)
        return self._sbd


def _grid(params: dict, key: str, default) -> tuple[float, ...]:
    return tuple(float(v) for v in params.get(key, default))


def _set_mode(params: dict) -> str:
    return str(params.get("sets", "sampled"))


# ---------------------------------------------------------------------------
# relaxation-time sandwich


def _suite_relaxation(ctx: _Ctx, params: dict) -> list[Record]:
    """t_rel controls the mixing time from both sides (lazy chains)."""
    if not ctx.lazy:
        return [skip("relaxation", "requires a lazy chain (diagonal >= 1/2)")]
    records = []
    t_rel, min_pi = ctx.t_rel, ctx.min_pi
    for eps in _grid(params, "eps_grid", EPS_GRID):
        t = ctx.tmix(eps)
        if eps < 0.5:
            records.append(check_le(
                "relaxation-lower", (t_rel - 1.0) * math.log(1.0 / (2.0 * eps)),
                float(t), {"eps": eps}))
        records.append(check_le(
            "relaxation-upper", float(t),
            t_rel * math.log(1.0 / (eps * min_pi)), {"eps": eps}))
    return records


# ---------------------------------------------------------------------------
# TV mixing vs hitting times of large sets


def _suite_tv_hit(ctx: _Ctx, params: dict) -> list[Record]:
    """Worst-case TV mixing is equivalent to hitting times of large sets."""
    if not ctx.lazy:
        return [skip("tv-hit", "requires a lazy chain (diagonal >= 1/2)")]
    if not ctx.exact:
        return [skip("tv-hit", "needs exact hitting profiles "
                                f"(n > {ctx.exact_threshold})")]
    records = []
    t_rel = ctx.t_rel
    for eps in _grid(params, "eps_grid", EPS_GRID):
        if eps > 0.25 + 1e-12:
            records.append(skip("tv-hit", "level must lie in (0, 1/4]",
                                {"eps": eps}))
            continue
        p = {"eps": eps}
        t_eps = ctx.tmix(eps)
        t_high = ctx.tmix(1.0 - eps)
        records.append(check_le(
            "tv-hit-upper-half-sets", float(t_eps),
            ctx.hit(0.5, eps / 2) + _ceil(t_rel * math.log(4.0 / eps)), p))
        records.append(check_le(
            "tv-hit-lower-half-sets",
            ctx.hit(0.5, 1.5 * eps) - _ceil(2.0 * t_rel * abs(math.log(eps))),
            float(t_eps), p))
        records.append(check_le(
            "tv-hit-upper-near-one", float(t_high),
            ctx.hit(0.5, 1.0 - 2.0 * eps) + _ceil(t_rel), p))
        records.append(check_le(
            "tv-hit-lower-near-one",
            ctx.hit(0.5, 1.0 - eps / 2) - _ceil(2.0 * t_rel * abs(math.log(eps))),
            float(t_high), p))
        records.append(check_le(
            "tv-hit-lower-large-sets",
            float(ctx.hit(1.0 - eps / 4, 1.25 * eps)), float(t_eps), p))
        records.append(check_le(
            "tv-relaxation-floor",
            (t_rel - 1.0) * abs(math.log(2.0 * eps)), float(t_eps), p))
        records.append(check_le(
            "tv-hit-upper-large-sets", float(t_eps),
            ctx.hit(1.0 - eps / 4, 0.75 * eps)
            + _ceil(1.5 * t_rel * math.log(4.0 / eps)), p))
    # general-threshold equivalences: both directions at every alpha
    for alpha in _grid(params, "alpha_grid", ALPHA_GRID):
        for eps in _grid(params, "eps_grid", EPS_GRID):
            p = {"alpha": alpha, "eps": eps}
            records.append(check_le(
                "set-hit-below-mix",
                float(ctx.hit(1.0 - alpha, min(alpha + eps, 1.0))),
                float(ctx.tmix(eps)), p))
            delta = eps
            shift = _ceil(0.5 * t_rel * _log_plus(
                2.0 * (1.0 - eps) ** 2 / (alpha * eps * delta)))
            records.append(check_le(
                "mix-below-set-hit", float(ctx.tmix(min(eps + delta, 1.0))),
                ctx.hit(1.0 - alpha, eps) + shift, {**p, "delta": delta}))
    return records


# ---------------------------------------------------------------------------
# set-probability floors after a per-start hitting time


def _suite_set_probability(ctx: _Ctx, params: dict) -> list[Record]:
    """Once large sets are hit, set probabilities obey a spectral floor."""
    if not ctx.lazy:
        return [skip("set-probability", "requires a lazy chain")]
    if not ctx.exact:
        return [skip("set-probability", "needs exact hitting profiles "
                                        f"(n > {ctx.exact_threshold})")]
    records = []
    t_rel = ctx.t_rel
    F = ctx.spectrum.eigenfunctions
    lam = ctx.spectrum.eigenvalues
    pi = ctx.chain.pi
    starts = sorted({int(np.argmax(pi)), int(np.argmin(pi))})
    s_grid = sorted({0, _ceil(t_rel), _ceil(3.0 * t_rel)})
    for mask, members in ctx.sets("sampled"):
        pa = float(pi[mask].sum())
        coef = F.T @ (pi * mask)
        for x in starts:
            for alpha in (0.25, 0.5):
                prof_level = 1.0 - alpha
                for delta in _grid(params, "eps_grid", EPS_GRID):
                    t = ctx.hit(prof_level, delta, x=x)
                    for s in s_grid:
                        prob = float(F[x] @ (lam ** (t + s) * coef))
                        floor = (1.0 - delta) * (
                            pa - math.exp(-s / t_rel)
                            * math.sqrt(8.0 / alpha * pa * (1.0 - pa)))
                        records.append(check_le(
                            "post-hit-occupation-floor", floor, prob,
                            {"A": members, "x": x, "alpha": alpha,
                             "delta": delta, "s": s}))
    return records


# ---------------------------------------------------------------------------
# submultiplicativity of tails and distances


def _suite_submult(ctx: _Ctx, params: dict) -> list[Record]:
    """Hitting tails multiply over time splits; TV distance powers up."""
    records = []
    eps_grid = _grid(params, "eps_grid", EPS_GRID)
    alph = _grid(params, "alpha_grid", ALPHA_GRID)
    if ctx.exact:
        for alpha in alph:
            for i, e1 in enumerate(eps_grid):
                for e2 in eps_grid[i:]:
                    records.append(check_le(
                        "hit-submultiplicative",
                        float(ctx.hit(alpha, e1 * e2)),
                        float(ctx.hit(alpha, e1) + ctx.hit(alpha, e2)),
                        {"alpha": alpha, "eps": e1, "delta": e2}))
            seq = ctx.profile(alpha).global_sequence()
            marks = sorted({1, _ceil(ctx.t_rel), ctx.tmix(0.25)})
            for i, t in enumerate(marks):
                for s in marks[i:]:
                    if t + s >= seq.size:
                        records.append(skip(
                            "tail-supermultiplicative",
                            "profile truncated before t + s",
                            {"alpha": alpha, "t": t, "s": s}))
                        continue
                    records.append(check_le(
                        "tail-supermultiplicative",
                        float(seq[t + s]), float(seq[t] * seq[s]),
                        {"alpha": alpha, "t": t, "s": s}))
    else:
        records.append(skip("hit-submultiplicative",
                            "needs exact hitting profiles "
                            f"(n > {ctx.exact_threshold})"))
    for k in (2, 3):
        for t in sorted({ctx.tmix(0.25), ctx.tmix(1 / 8)}):
            records.append(check_le(
                "distance-power-bound", ctx.dist(k * t),
                (2.0 * ctx.dist(t)) ** k, {"k": k, "t": t}))
    return records


# ---------------------------------------------------------------------------
# transfer between hitting thresholds


def _suite_hit_levels(ctx: _Ctx, params: dict) -> list[Record]:
    """Hitting times at different mass thresholds control each other."""
    if not ctx.exact:
        return [skip("hit-levels", "needs exact hitting profiles "
                                   f"(n > {ctx.exact_threshold})")]
    records = []
    t_rel = ctx.t_rel
    alph = _grid(params, "alpha_grid", ALPHA_GRID)
    for alpha in alph:
        for beta in alph:
            if alpha > beta:
                continue
            for delta in (0.25, 0.5):
                p = {"alpha": alpha, "beta": beta, "delta": delta}
                records.append(check_le(
                    "hit-mass-monotone", float(ctx.hit(beta, delta)),
                    float(ctx.hit(alpha, delta)), p))
                shift = _ceil(t_rel / alpha * math.log(
                    (1.0 - alpha) / ((1.0 - beta) * (delta / 2))))
                records.append(check_le(
                    "hit-mass-transfer", float(ctx.hit(alpha, delta)),
                    ctx.hit(beta, delta / 2) + shift, p))
            if alpha < beta:
                eps0 = 1 / 16
                s_n = _ceil(t_rel / alpha * math.log(
                    (1.0 - alpha) / ((1.0 - beta) * eps0)))
                p = {"alpha": alpha, "beta": beta, "eps": eps0}
                records.append(check_le(
                    "hit-high-level-transfer",
                    float(ctx.hit(alpha, 1.0 - eps0)),
                    ctx.hit(beta, 1.0 - 2.0 * eps0) + s_n, p))
                records.append(check_le(
                    "hit-low-level-transfer",
                    float(ctx.hit(alpha, 2.0 * eps0)),
                    ctx.hit(beta, eps0) + s_n, p))
    return records


# ---------------------------------------------------------------------------
# escape tails from stationarity


def _suite_escape(ctx: _Ctx, params: dict) -> list[Record]:
    """Stationary escape tails decay geometrically with rate pi(A)/t_rel."""
    records = []
    t_rel = ctx.t_rel
    pi = ctx.chain.pi
    for mask, members in ctx.sets(_set_mode(params)):
        ks = ctx.killed(mask)
        pa, pb = ks.pi_A, ks.pi_B
        base = 1.0 - pa / t_rel
        tails = ks.tail_stationary(TAIL_T_GRID)
        for t, tail in zip(TAIL_T_GRID, tails):
            p = {"A": members, "t": t}
            records.append(check_le(
                "stationary-escape-tail", pb * float(tail), pb * base ** t, p))
            if base >= 0.0:
                records.append(check_le(
                    "escape-tail-exponential", pb * base ** t,
                    pb * math.exp(-t * pa / t_rel), p))
            else:
                records.append(skip(
                    "escape-tail-exponential",
                    "geometric base is negative (t_rel < pi(A))", p))
        records.append(check_le(
            "stationary-mean-hitting", pa * pb * ks.mean_stationary(),
            t_rel * pb, {"A": members}))
        for w in _grid(params, "work_grid", WORK_GRID):
            t_w = _ceil(t_rel * w / pa)
            slow = ks.tail_rows(t_w)
            for alpha in (0.25, 0.5):
                measure = float(pi[ks.B[slow >= alpha]].sum())
                records.append(check_le(
                    "slow-start-measure", measure,
                    pb * math.exp(-w) / alpha,
                    {"A": members, "w": w, "alpha": alpha}))
    return records


# ---------------------------------------------------------------------------
# killed-kernel spectrum


def _suite_killed_spectrum(ctx: _Ctx, params: dict) -> list[Record]:
    """The killed kernel's spectral mixture has the promised shape."""
    records = []
    t_rel = ctx.t_rel
    P = ctx.chain.P
    pi = ctx.chain.pi
    for mask, members in ctx.sets(_set_mode(params)):
        ks = ctx.killed(mask)
        p = {"A": members}
        records.append(check_le(
            "killed-weights-nonnegative", 0.0, float(ks.weights.min()), p))
        records.append(check_identity(
            "killed-weights-normalized", float(ks.weights.sum()), 1.0, p))
        records.append(check_le(
            "killed-spectrum-ceiling", float(ks.gammas[0]),
            1.0 - ks.pi_A / t_rel, p))
        records.append(check_le(
            "killed-spectrum-symmetric-floor",
            -float(ks.gammas[0]), float(ks.gammas[-1]), p))
        # reconstruction against direct killed-kernel iteration
        B = ks.B
        PB = P[np.ix_(B, B)]
        v = pi[B] / ks.pi_B
        direct = {}
        u = np.ones(B.size)
        for t in range(1, 21):
            u = PB @ u
            if t in (1, 5, 20):
                direct[t] = float(v @ u)
        recon = ks.tail_stationary([1, 5, 20])
        for t, r in zip((1, 5, 20), recon):
            records.append(check_identity(
                "killed-tail-reconstruction", float(r), direct[t],
                {"A": members, "t": t}))
    return records


# ---------------------------------------------------------------------------
# even-time maximal function and variance contraction


def _suite_maximal(ctx: _Ctx, params: dict) -> list[Record]:
    """sup over even times of |P^t f| is Lp-bounded by p/(p-1) ||f||_p."""
    records = []
    pi = ctx.chain.pi
    n_funcs = int(params.get("functions", 20))
    p_grid = _grid(params, "p_grid", (1.5, 2.0, 3.0))
    funcs = ctx.functions(n_funcs)
    for i, f in enumerate(funcs):
        res = maximal_function(ctx.chain, f, use_absolute_spectrum=True)
        upper = res.values + 2.0 * res.tail_bound
        for p in p_grid:
            lhs = float((pi @ upper ** p) ** (1.0 / p))
            rhs = p / (p - 1.0) * float((pi @ np.abs(f) ** p) ** (1.0 / p))
            records.append(check_le(
                "even-maximal-lp", lhs, rhs, {"f": i, "p": p}))
    if ctx.lazy:
        lam = ctx.spectrum.eigenvalues
        F = ctx.spectrum.eigenfunctions
        t_grid = sorted({1, _ceil(ctx.t_rel), _ceil(3.0 * ctx.t_rel)})
        for i, f in enumerate(funcs):
            c = F.T @ (pi * f)
            var0 = float(np.sum(c[1:] ** 2))
            for t in t_grid:
                var_t = float(np.sum((lam[1:] ** t * c[1:]) ** 2))
                records.append(check_le(
                    "variance-contraction", var_t,
                    math.exp(-2.0 * t / ctx.t_rel) * var0, {"f": i, "t": t}))
    else:
        records.append(skip("variance-contraction", "requires a lazy chain"))
    return records


# ---------------------------------------------------------------------------
# good starting sets (uniformly small deviations after time s)


def _suite_good_set(ctx: _Ctx, params: dict) -> list[Record]:
    """Most starts track pi(A) within m sigma_s from every time >= s."""
    if not ctx.lazy:
        return [skip("good-set", "requires a lazy chain")]
    records = []
    t_rel, pi = ctx.t_rel, ctx.chain.pi
    F = ctx.spectrum.eigenfunctions
    lam = ctx.spectrum.eigenvalues
    pairs = ctx.sets(_set_mode(params))
    ind = np.stack([m for m, _ in pairs]).astype(float)
    pa = ind @ pi
    rho = np.sqrt(pa * (1.0 - pa))
    m_grid = _grid(params, "m_grid", DEVIATION_GRID)
    s_grid = sorted({0, _ceil(t_rel), _ceil(3.0 * t_rel)})
    # Beyond K the deviation envelope e^{-k/t_rel} rho / sqrt(min pi) is
    # already below every threshold m e^{-s/t_rel} rho, so the suffix max
    # over [s, K] decides membership for all k >= s.
    m_min = min(m_grid)
    extra = 0
    if m_min * math.sqrt(ctx.min_pi) < 1.0:
        extra = _ceil(t_rel * math.log(1.0 / (m_min * math.sqrt(ctx.min_pi))))
    K = max(s_grid) + extra + 1
    C = F.T @ (pi[:, None] * ind.T)
    running = np.zeros((ctx.chain.n, ind.shape[0]))
    snapshots = {}
    want = set(s_grid)
    for k in range(K, -1, -1):
        dev = np.abs((F * lam ** k) @ C - pa[None, :])
        np.maximum(running, dev, out=running)
        if k in want:
            snapshots[k] = running.copy()
    for s in s_grid:
        worst = snapshots[s]
        decay = math.exp(-s / t_rel)
        for m in m_grid:
            member = (worst < m * decay * rho[None, :]).astype(float)
            measures = pi @ member
            floor = 1.0 - 8.0 / m ** 2
            for (_, members_j), measure in zip(pairs, measures):
                records.append(check_le(
                    "good-set-measure", floor, float(measure),
                    {"A": members_j, "s": s, "m": m}))
    return records


# ---------------------------------------------------------------------------
# eigenfunction martingale tails


def _suite_martingale(ctx: _Ctx, params: dict) -> list[Record]:
    """From the top of the second eigenfunction, escape tails beat lambda_2^k."""
    lam2 = float(ctx.spectrum.lambda_2)
    if lam2 <= 1e-12:
        return [skip("martingale-tail", "second eigenvalue is not positive")]
    pi = ctx.chain.pi
    f2 = ctx.spectrum.eigenfunctions[:, 1].copy()
    if float(pi[f2 <= 1e-14].sum()) < 0.5:
        f2 = -f2
    mask = f2 <= 1e-14
    pa = float(pi[mask].sum())
    x = int(np.argmax(f2))
    if mask[x]:
        return [skip("martingale-tail", "eigenfunction has no positive part")]
    records = [check_le("negative-part-mass", 0.5, pa)]
    ks = ctx.killed(mask)
    pos = int(np.nonzero(ks.B == x)[0][0])
    K = _ceil(5.0 * ctx.t_rel)
    ts = np.arange(K + 1)
    tails = ks.tail_state(pos, ts)
    floors = lam2 ** ts.astype(float)
    worst = float(np.max(floors - tails))
    records.append(check_le(
        "martingale-tail-floor-all", worst, 0.0,
        {"k_max": K}, note="max over all k <= ceil(5 t_rel) of lambda_2^k "
                           "- Pr_x[T > k]"))
    grid = sorted(set(range(0, min(K, 64) + 1))
                  | {int(v) for v in np.geomspace(1, max(K, 1), 32).round()})
    for k in grid:
        if k > K:
            continue
        records.append(check_le(
            "martingale-tail-floor", float(floors[k]), float(tails[k]),
            {"k": k, "x": x}))
    for a in (1, 2):
        k = a * ctx.tmix(0.25)
        tail = float(ks.tail_state(pos, [k])[0])
        records.append(check_le(
            "martingale-tail-at-mix", lam2 ** k, tail, {"multiple": a, "k": k}))
    return records


# ---------------------------------------------------------------------------
# return-time identities


def _suite_return_time(ctx: _Ctx, params: dict) -> list[Record]:
    """Flow symmetry and the return-time mean/second-moment identities."""
    records = []
    pi, P = ctx.chain.pi, ctx.chain.P
    t_rel = ctx.t_rel
    for mask, members in ctx.sets(_set_mode(params)):
        p = {"A": members}
        ks = ctx.killed(mask)
        flow_out = float(pi[mask] @ P[np.ix_(mask, ~mask)].sum(axis=1))
        flow_in = float(pi[~mask] @ P[np.ix_(~mask, mask)].sum(axis=1))
        records.append(check_identity(
            "interface-flow-symmetry", flow_out, flow_in, p))
        kq = kac_quantities(ctx.chain, members, check_tol=math.inf)
        records.append(check_identity(
            "return-mean-identity", kq.mean_from_psi, 1.0 / kq.phi_B, p))
        records.append(check_identity(
            "return-second-moment-identity", kq.second_from_psi,
            kq.mean_from_psi * (2.0 * kq.mean_from_pi_B - 1.0), p))
        records.append(check_le(
            "return-second-moment-bound", kq.second_from_psi,
            2.0 * kq.mean_from_psi * t_rel / ks.pi_A, p))
        psi_B = kq.psi[ks.B]
        t_marks = (1, 2, 5, 10)
        stat = ks.tail_stationary(sorted({t - 1 for t in t_marks}
                                         | set(t_marks)))
        stat_at = dict(zip(sorted({t - 1 for t in t_marks} | set(t_marks)),
                           stat))
        entry = ks.tail_dist(psi_B, [t - 1 for t in t_marks])
        for t, e in zip(t_marks, entry):
            records.append(check_identity(
                "return-law-identity",
                (stat_at[t - 1] - stat_at[t]) / kq.phi_B, float(e),
                {"A": members, "t": t}))
    return records


# ---------------------------------------------------------------------------
# exponential moments of return times


def _suite_return_mgf(ctx: _Ctx, params: dict) -> list[Record]:
    """Two-sided exponential concentration of the return time to a big set."""
    records = []
    n, pi = ctx.chain.n, ctx.chain.pi
    t_rel = ctx.t_rel
    order = np.argsort(pi)
    small = [(int(order[0]),)]
    if n >= 3:
        small.append((int(order[1]),))
        small.append((int(order[2]),))
        small.append(tuple(sorted((int(order[0]), int(order[1])))))
    complements = []
    seen = set()
    for b in small:
        if b not in seen:
            seen.add(b)
            complements.append(b)
    for b_states in complements:
        mask = np.ones(n, dtype=bool)
        mask[list(b_states)] = False  # A = everything except the slow core
        members = tuple(int(i) for i in np.flatnonzero(mask))
        kq = kac_quantities(ctx.chain, members, check_tol=math.inf)
        pa = float(pi[mask].sum())
        p_rate = 1.0 - pa / t_rel
        base = {"B": b_states}
        if p_rate <= 1e-12:
            records.append(skip("return-mgf-upper-deviation",
                                "geometric rate vanishes", base))
            continue
        a = kq.mean_from_psi
        for theta in (0.5, 1.0):
            z = 1.0 + theta * (1.0 - p_rate) / (2.0 * p_rate)
            bound = 2.0 * a * (z - 1.0) ** 2 / (1.0 - p_rate)
            p = {**base, "theta": theta}
            if a * math.log(z) + bound > 600.0:
                records.append(skip(
                    "return-mgf-upper-deviation",
                    "exponential moment exceeds double precision range", p))
                continue
            up = mgf(ctx.chain, kq.psi, members, z)
            down = mgf(ctx.chain, kq.psi, members, 1.0 / z)
            records.append(check_le(
                "return-mgf-upper-deviation",
                math.log(up) - a * math.log(z), bound, p))
            records.append(check_le(
                "return-mgf-lower-deviation",
                a * math.log(z) + math.log(down), bound, p))
    return records


# ---------------------------------------------------------------------------
# chained mixing/hitting comparisons


def _suite_mix_hit(ctx: _Ctx, params: dict) -> list[Record]:
    """A closed loop of eight comparisons tying hit times at any threshold
    to the quarter-level mixing time."""
    if not ctx.lazy:
        return [skip("mix-hit", "requires a lazy chain")]
    if not ctx.exact:
        return [skip("mix-hit", "needs exact hitting profiles "
                                f"(n > {ctx.exact_threshold})")]
    records = []
    t_rel = ctx.t_rel
    tq = ctx.tmix(0.25)
    for alpha in _grid(params, "alpha_grid", ALPHA_GRID):
        p = {"alpha": alpha}
        level = 1.0 - 0.75 * alpha
        k = _ceil(4.0 / alpha - 1.0)
        records.append(check_le(
            "quarter-power-floor", level ** k, 0.25, {**p, "k": k}))
        records.append(check_le(
            "hit-power-submultiplicative", float(ctx.hit(alpha, level ** k)),
            float(k * ctx.hit(alpha, level)), {**p, "k": k}))
        records.append(check_le(
            "hit-below-small-mix", float(ctx.hit(alpha, level)),
            float(ctx.tmix(alpha / 4)), p))
        doubling = 2 + _ceil(math.log2(1.0 / alpha))
        records.append(check_le(
            "mix-small-eps-growth", float(ctx.tmix(alpha / 4)),
            float(doubling * tq), p))
        records.append(check_le(
            "hit-quarter-upper", float(ctx.hit(alpha, 0.25)),
            4.0 / alpha * doubling * tq, p))
        shift_up = _ceil(0.5 * t_rel * math.log(98.0 / (1.0 - alpha)))
        records.append(check_le(
            "mix-below-shifted-hit", float(tq),
            ctx.hit(alpha, 1 / 8) + shift_up, p))
        records.append(check_le(
            "hit-eighth-doubling", float(ctx.hit(alpha, 1 / 8)),
            2.0 * ctx.hit(alpha, 0.25), p))
        shift_dn = _ceil(0.25 * t_rel * math.log(100.0 / (1.0 - alpha)))
        records.append(check_le(
            "hit-quarter-lower", tq / 2.0 - shift_dn,
            float(ctx.hit(alpha, 0.25)), p))
    return records


# ---------------------------------------------------------------------------
# floors forced by laziness


def _suite_lazy_floor(ctx: _Ctx, params: dict) -> list[Record]:
    """Holding probability 1/2 caps how fast tails and distances can drop."""
    if not ctx.lazy:
        return [skip("lazy-floor", "requires a lazy chain")]
    if not ctx.exact:
        return [skip("lazy-floor", "needs exact hitting profiles "
                                   f"(n > {ctx.exact_threshold})")]
    records = []
    tq = ctx.tmix(0.25)
    for alpha in _grid(params, "alpha_grid", ALPHA_GRID):
        p = {"alpha": alpha}
        if alpha <= 0.5:
            for eps in _grid(params, "eps_grid", EPS_GRID):
                records.append(check_le(
                    "lazy-hit-floor", abs(math.log2(eps)),
                    float(ctx.hit(alpha, eps / 2)), {**p, "eps": eps}))
        records.append(check_le(
            "hit-near-one-below-mix", float(ctx.hit(alpha, 1.0 - alpha / 2)),
            float(ctx.tmix(alpha / 2)), p))
        records.append(check_le(
            "mix-small-eps-doubling", float(ctx.tmix(alpha / 2)),
            float(_ceil(math.log2(2.0 / alpha)) * tq), p))
        step = _ceil(abs(math.log2(alpha / 2)))
        for k in (1, 2):
            records.append(check_le(
                "hit-power-below-mix-multiple",
                float(ctx.hit(alpha, (1.0 - alpha / 2) ** k)),
                float(k * step * tq), {**p, "k": k}))
    return records


# ---------------------------------------------------------------------------
# continuous-time analogues


def _suite_continuous_time(ctx: _Ctx, params: dict) -> list[Record]:
    """Heat-kernel versions of the sandwiches, with ceilings dropped.

    Continuous times are only located inside tight brackets, so every
    comparison uses the conservative ends: bracketed lower bounds face the
    upper end of the other side and vice versa.
    """
    records = []
    t_rel = ctx.t_rel
    eps_grid = _grid(params, "eps_grid", EPS_GRID)
    for eps in eps_grid:
        p = {"eps": eps}
        lo, hi = ctx.tmix_ct(eps)
        if eps < 0.5:
            records.append(check_le(
                "relaxation-lower-ct", t_rel * math.log(1.0 / (2.0 * eps)),
                hi, p))
        records.append(check_le(
            "relaxation-upper-ct", lo,
            t_rel * math.log(1.0 / (eps * ctx.min_pi)), p))
    if ctx.exact:
        for eps in eps_grid:
            if eps > 0.25 + 1e-12:
                records.append(skip("tv-hit-ct", "level must lie in (0, 1/4]",
                                    {"eps": eps}))
                continue
            p = {"eps": eps}
            mix_lo, mix_hi = ctx.tmix_ct(eps)
            high_lo, high_hi = ctx.tmix_ct(1.0 - eps)
            records.append(check_le(
                "tv-hit-upper-half-sets-ct", mix_lo,
                ctx.hit_ct(0.5, eps / 2)[1] + t_rel * math.log(4.0 / eps), p))
            records.append(check_le(
                "tv-hit-lower-half-sets-ct",
                ctx.hit_ct(0.5, 1.5 * eps)[0]
                - 2.0 * t_rel * abs(math.log(eps)), mix_hi, p))
            records.append(check_le(
                "tv-hit-upper-near-one-ct", high_lo,
                ctx.hit_ct(0.5, 1.0 - 2.0 * eps)[1] + t_rel, p))
            records.append(check_le(
                "tv-hit-lower-near-one-ct",
                ctx.hit_ct(0.5, 1.0 - eps / 2)[0]
                - 2.0 * t_rel * abs(math.log(eps)), high_hi, p))
            records.append(check_le(
                "tv-hit-lower-large-sets-ct",
                ctx.hit_ct(1.0 - eps / 4, 1.25 * eps)[0], mix_hi, p))
            records.append(check_le(
                "tv-hit-upper-large-sets-ct", mix_lo,
                ctx.hit_ct(1.0 - eps / 4, 0.75 * eps)[1]
                + 1.5 * t_rel * math.log(4.0 / eps), p))
        alph = _grid(params, "alpha_grid", ALPHA_GRID)
        for alpha in alph:
            for beta in alph:
                if alpha > beta:
                    continue
                for delta in (0.25, 0.5):
                    p = {"alpha": alpha, "beta": beta, "delta": delta}
                    records.append(check_le(
                        "hit-mass-monotone-ct", ctx.hit_ct(beta, delta)[0],
                        ctx.hit_ct(alpha, delta)[1], p))
                    shift = t_rel / alpha * math.log(
                        (1.0 - alpha) / ((1.0 - beta) * (delta / 2)))
                    records.append(check_le(
                        "hit-mass-transfer-ct", ctx.hit_ct(alpha, delta)[0],
                        ctx.hit_ct(beta, delta / 2)[1] + shift, p))
    else:
        records.append(skip("tv-hit-ct", "needs exact hitting profiles "
                                         f"(n > {ctx.exact_threshold})"))
    lam = ctx.spectrum.eigenvalues
    F = ctx.spectrum.eigenfunctions
    pi = ctx.chain.pi
    for i, f in enumerate(ctx.functions(5)):
        c = F.T @ (pi * f)
        var0 = float(np.sum(c[1:] ** 2))
        for mult in (0.5, 1.0, 3.0):
            t = mult * t_rel
            var_t = float(np.sum((np.exp(-(1.0 - lam[1:]) * t) * c[1:]) ** 2))
            records.append(check_le(
                "variance-contraction-ct", var_t,
                math.exp(-2.0 * t / t_rel) * var0, {"f": i, "t_rel_multiple": mult}))
    return records


# ---------------------------------------------------------------------------
# tree crossing moments and the mixing window


def _suite_tree_window(ctx: _Ctx, params: dict) -> list[Record]:
    """On trees, crossing moments concentrate the root passage time and
    force a sqrt-size mixing window."""
    tc, reason = ctx.tree()
    if tc is None:
        return [skip("tree-window", f"not a tree walk: {reason}")]
    records = []
    n = tc.n
    t_rel = ctx.t_rel
    pi = tc.pi
    depth = {v: len(tc.path_to_root(v)) - 1 for v in range(n)}
    non_root = [v for v in range(n) if v != tc.root]
    if len(non_root) > 12:
        by_depth = sorted(non_root, key=lambda v: (depth[v], v))
        idx = np.linspace(0, len(by_depth) - 1, 12).round().astype(int)
        sample = sorted({by_depth[i] for i in idx})
    else:
        sample = non_root
    for u in sample:
        ct = crossing_time(tc, u)
        members = _subtree_vertices(tc, u)
        PB = tc.chain.P[np.ix_(members, members)]
        hB = np.linalg.solve(np.eye(members.size) - PB, np.ones(members.size))
        pos = int(np.nonzero(members == u)[0][0])
        records.append(check_identity(
            "crossing-mean-formula", ct.mean, float(hB[pos]), {"u": u}))
        records.append(check_le(
            "crossing-second-moment-bound", ct.second_moment,
            4.0 * ct.mean * t_rel, {"u": u}))
    deepest = max(non_root, key=lambda v: (depth[v], v))
    targets = [(deepest, tc.root)]
    path = tc.path_to_root(deepest)
    if len(path) > 3:
        targets.append((deepest, path[len(path) // 2]))
    for x, y in targets:
        pv = path_variance(tc, x, y)
        records.append(check_le(
            "path-variance-bound", pv.variance, pv.sigma_sq,
            {"x": x, "y": y}))
        records.extend(pv.tail_records)
    if n < 3:
        records.append(skip("mixing-window-sqrt", "needs at least 3 states"))
        return records
    tq = ctx.tmix(0.25)
    rho = float(tc.mean_to_root.max())
    records.append(check_le("root-mean-below-4tmix", rho, 4.0 * tq))
    for eps in _grid(params, "eps_grid", EPS_GRID):
        if eps > 0.25 + 1e-12:
            records.append(skip("mixing-window-sqrt",
                                "level must lie in (0, 1/4]", {"eps": eps}))
            continue
        p = {"eps": eps}
        records.append(check_le(
            "mixing-window-sqrt", float(ctx.tmix(eps) - ctx.tmix(1.0 - eps)),
            35.0 * math.sqrt(t_rel * tq / eps), p))
        kappa = math.sqrt(4.0 * rho * t_rel / eps)
        records.append(check_le(
            "tau-lower-concentration", rho - kappa,
            float(tau_root(tc, 1.0 - eps)), p))
        records.append(check_le(
            "tau-upper-concentration", float(tau_root(tc, eps)),
            rho + kappa, p))
        records.extend(tau_sandwich_check(tc, eps,
                                          exact_threshold=ctx.exact_threshold))
    return records


# ---------------------------------------------------------------------------
# sub-gaussian crossing tails


def _suite_crossing_tails(ctx: _Ctx, params: dict) -> list[Record]:
    """Passage times to ancestors have sub-gaussian tails on the scale
    sqrt(mean * t_rel), for deviations up to 2.5 sqrt(mean / t_rel)."""
    tc, reason = ctx.tree()
    if tc is None:
        return [skip("crossing-tails", f"not a tree walk: {reason}")]
    c_grid = _grid(params, "c_grid", (0.5, 1.0, 1.5, 2.0))
    depth = {v: len(tc.path_to_root(v)) - 1 for v in range(tc.n)}
    non_root = [v for v in range(tc.n) if v != tc.root]
    deepest = max(non_root, key=lambda v: (depth[v], v))
    pairs = [(deepest, tc.root)]
    path = tc.path_to_root(deepest)
    if len(path) > 3:
        pairs.append((deepest, path[len(path) // 2]))
    off_path = [v for v in non_root if v not in set(path) and depth[v] >= 2]
    if off_path:
        other = max(off_path, key=lambda v: (depth[v], v))
        pairs.append((other, tc.root))
    records = []
    for x, y in pairs:
        records.extend(tail_bound_check(tc, x, y, c_grid=c_grid))
    return records


# ---------------------------------------------------------------------------
# banded chains


def _suite_banded(ctx: _Ctx, params: dict) -> list[Record]:
    """Block decomposition of a banded chain: comparable starts inside an
    interval, central-block mass, and the central hitting statistics."""
    cls = ctx.sbd()
    if not cls.is_sbd:
        return [skip("banded", "; ".join(cls.reasons) or "not banded")]
    records = [report_value(
        "banded-parameters", cls.alpha,
        {"r": cls.r, "delta": cls.delta},
        note="concentration level implied by (delta, r)")]
    dec = blocks(ctx.chain, cls.r, cls.delta)
    records.append(check_le(
        "central-block-mass-ceiling", dec.central_mass,
        dec.central_mass_bound, {"central_block": dec.central_block},
        note="pi(central block) <= r / (r + delta^r)"))
    n, r = ctx.chain.n, dec.r
    trials = []
    if n > r:
        trials.append(((0, r - 1), tuple(int(v) for v in dec.blocks[-1])))
        trials.append(((n - r, n - 1), tuple(int(v) for v in dec.blocks[0])))
    if n >= 3 * r:
        mid_lo = (n - r) // 2
        trials.append(((mid_lo, mid_lo + r - 1), (0, n - 1)))
    seen = set()
    for interval, target in trials:
        lo, hi = max(interval[0], 0), min(interval[1], n - 1)
        tgt = tuple(t for t in target if t < lo or t > hi)
        if not tgt or (lo, hi, tgt) in seen:
            continue
        seen.add((lo, hi, tgt))
        records.extend(comparable_start_bound(
            ctx.chain, (lo, hi), tgt, r=dec.r, delta=dec.delta))
    if ctx.chain.is_lazy:
        try:
            cbh = central_block_hit(ctx.chain, dec,
                                    eps_grid=_grid(params, "eps_grid", EPS_GRID),
                                    exact_threshold=ctx.exact_threshold)
            records.extend(cbh.records)
        except ValueError as exc:
            records.append(skip("central-hit-mean", str(exc)))
    else:
        records.append(skip("central-hit-mean", "requires a lazy chain"))
    return records


# ---------------------------------------------------------------------------
# measured block-crossing constants


def _suite_block_moments(ctx: _Ctx, params: dict) -> list[Record]:
    """Per-block crossing moments against t_rel and the exit flow.

    These proportionality constants are reported, never asserted: the
    suite measures how tightly block crossings track the relaxation time.
    """
    cls = ctx.sbd()
    if not cls.is_sbd:
        return [skip("block-moments", "; ".join(cls.reasons) or "not banded")]
    dec = blocks(ctx.chain, cls.r, cls.delta)
    pi, P = ctx.chain.pi, ctx.chain.P
    t_rel = ctx.t_rel
    records = []
    for j in range(dec.n_blocks):
        if j == dec.central_block:
            continue
        parent = dec.parent(j)
        if parent is None:
            continue
        left_side = j < dec.central_block
        far_blocks = range(0, j + 1) if left_side else range(j, dec.n_blocks)
        far = np.concatenate([dec.blocks[i] for i in far_blocks])
        far_mask = np.zeros(ctx.chain.n, dtype=bool)
        far_mask[far] = True
        pi_far = float(pi[far_mask].sum())
        flow = float(pi[far_mask] @ P[np.ix_(far_mask, ~far_mask)].sum(axis=1))
        phi = flow / pi_far
        side = "left" if left_side else "right"
        records.append(report_value(
            "block-exit-flow", phi, {"block": j, "side": side}))
        x_far = int(far.min()) if left_side else int(far.max())
        src = TargetSet.from_states(ctx.chain, dec.blocks[j])
        dst = TargetSet.from_states(ctx.chain, dec.blocks[parent])
        for label, start_src in (("entry-law", src),
                                 ("far-end", TargetSet.from_states(
                                     ctx.chain, [x_far]))):
            e1, e2 = _crossing_moments(ctx.chain, x_far, start_src, dst)
            p = {"block": j, "start": label}
            records.append(report_value(
                "block-second-moment-per-mean", e2 / (t_rel * max(e1, 1e-300)),
                p, note="E[T^2] / (t_rel E[T]); reported, not asserted"))
            records.append(report_value(
                "block-second-moment-flow", e2 * phi / t_rel, p,
                note="E[T^2] Phi / t_rel; reported, not asserted"))
    if not records:
        records.append(skip("block-moments", "no non-central blocks"))
    return records


# ---------------------------------------------------------------------------
# registry and drivers


SUITES = {
    "relaxation": _suite_relaxation,
    "tv-hit": _suite_tv_hit,
    "set-probability": _suite_set_probability,
    "submultiplicativity": _suite_submult,
    "hit-levels": _suite_hit_levels,
    "escape": _suite_escape,
    "killed-spectrum": _suite_killed_spectrum,
    "maximal-function": _suite_maximal,
    "good-set": _suite_good_set,
    "martingale-tail": _suite_martingale,
    "return-time": _suite_return_time,
    "return-mgf": _suite_return_mgf,
    "mix-hit": _suite_mix_hit,
    "lazy-floor": _suite_lazy_floor,
    "continuous-time": _suite_continuous_time,
    "tree-window": _suite_tree_window,
    "crossing-tails": _suite_crossing_tails,
    "banded": _suite_banded,
    "block-moments": _suite_block_moments,
}

SUITE_IDS = tuple(SUITES)


def _record_key(r: Record):
    return (r.inequality, str(sorted((str(k), str(v))
                                     for k, v in r.params.items())))


def run_suites(chain: Chain, suites, params: dict | None = None) -> list[Report]:
    """Evaluate several suites on one chain, sharing every cached quantity.

    ``params`` may override ``eps_grid``, ``alpha_grid``, ``sets``
    ("sampled" or "all"), ``seed``, ``exact_threshold``, ``functions``,
    and per-suite grids.  Unknown suite ids raise ``ValueError``.
    """
    params = dict(params or {})
    for sid in suites:
        if sid not in SUITES:
            known = ", ".join(SUITE_IDS)
            raise ValueError(f"unknown suite id {sid!r}; known suites: {known}")
    ctx = _Ctx(chain, params)
    reports = []
    for sid in suites:
        records = sorted(SUITES[sid](ctx, params), key=_record_key)
        reports.append(Report(suite=sid, chain_fingerprint=fingerprint(chain.P),
                              records=records, params=params))
    return reports


def run_suite(chain: Chain, suite: str, params: dict | None = None) -> Report:
    """Evaluate one suite on one chain; see :func:`run_suites`."""
    return run_suites(chain, [suite], params)[0]


# ---------------------------------------------------------------------------
# cutoff scans across a family


@dataclass(eq=False)
class ScanRow:
    """Mixing summary of one family member."""

    family: str
    n: int
    states: int
    t_rel: float
    t_mix: dict[float, int]
    t_mix_high: dict[float, int]
    hit: dict[float, int | None]
    window: dict[float, int]
    ratio: dict[float, float]
    product: float


@dataclass(eq=False)
class CutoffScan:
    """Window/ratio table across sizes, plus observed-trend flags.

    Flags describe the scanned sizes only: ``cutoff-trend`` means the
    ratio t_mix(eps)/t_mix(1-eps) was non-increasing and strictly smaller
    at the last size for every eps; ``product-trend`` means t_mix/t_rel
    was non-decreasing and strictly larger at the last size.  Neither is
    a claim about sizes that were not scanned.
    """

    family: str
    alpha: float
    eps_grid: tuple[float, ...]
    rows: list[ScanRow]
    flags: list[str] = field(default_factory=list)

    def row_dicts(self) -> list[dict]:
        out = []
        for row in self.rows:
            for eps in self.eps_grid:
                out.append({
                    "family": row.family,
                    "n": row.n,
                    "states": row.states,
                    "eps": eps,
                    "alpha": self.alpha,
                    "t_rel": row.t_rel,
                    "t_mix": row.t_mix[eps],
                    "t_mix_complement": row.t_mix_high[eps],
                    "window": row.window[eps],
                    "ratio": row.ratio[eps],
                    "hit": row.hit[eps],
                    "product": row.product,
                })
        return out

    def to_csv(self, path: str) -> None:
        rows = self.row_dicts()
        cols = ["family", "n", "states", "eps", "alpha", "t_rel", "t_mix",
                "t_mix_complement", "window", "ratio", "hit", "product"]
        directory = os.path.dirname(os.path.abspath(path)) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=cols)
                writer.writeheader()
                for row in rows:
                    writer.writerow({k: ("" if row[k] is None else row[k])
                                     for k in cols})
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def cutoff_scan(family, sizes, eps_grid=(0.1,), alpha: float = 0.5,
                exact_threshold: int = EXACT_THRESHOLD) -> CutoffScan:
    """Tabulate mixing windows and ratios across increasing sizes.

    ``family`` is a registered family id (see ``families.FAMILIES``) or a
    callable mapping a size to a chain.  Sizes must be strictly
    increasing and every level must lie in (0, 1/2).  Exact hitting
    times at ``alpha`` are included for members small enough to
    enumerate; larger members get ``None`` in the hit column.
    """
    sizes = [int(n) for n in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    eps_grid = tuple(float(e) for e in eps_grid)
    if not eps_grid or any(not 0.0 < e < 0.5 for e in eps_grid):
        raise ValueError("every level must lie strictly inside (0, 1/2)")
    if callable(family):
        builder, name = family, getattr(family, "__name__", "custom")
    else:
        if family not in FAMILIES:
            known = ", ".join(sorted(FAMILIES))
            raise ValueError(f"unknown family {family!r}; known: {known}")
        builder, name = FAMILIES[family], family
    rows = []
    for n in sizes:
        chain = builder(n)
        t_rel = float(chain.spectrum.t_rel)
        levels = sorted({*eps_grid, *(1.0 - e for e in eps_grid), 0.25})
        floor = min(levels)
        prof = mixing_profile(chain, eps_floor=floor)
        t_at = {}
        for level in levels:
            t = prof.hit_level(level)
            if t is None:
                raise RuntimeError(f"profile ended above level {level}")
            t_at[level] = int(t)
        hit = {e: None for e in eps_grid}
        if chain.n <= exact_threshold:
            hp = worst_tail_profile(chain, alpha, stop_level=min(eps_grid),
                                    exact_threshold=exact_threshold)
            hit = {e: int(hp.hit(e)) for e in eps_grid}
        t_mix = {e: t_at[e] for e in eps_grid}
        t_high = {e: t_at[1.0 - e] for e in eps_grid}
        window, ratio = {}, {}
        for e in eps_grid:
            w = t_mix[e] - t_high[e]
            if w < 0:
                raise IdentityCheckError(
                    f"window is negative at n={n}, eps={e}: {w}")
            window[e] = w
            ratio[e] = (math.inf if t_high[e] == 0
                        else t_mix[e] / t_high[e])
            if ratio[e] < 1.0 - 1e-12:
                raise IdentityCheckError(
                    f"mixing ratio below 1 at n={n}, eps={e}")
        rows.append(ScanRow(family=name, n=n, states=chain.n, t_rel=t_rel,
                            t_mix=t_mix, t_mix_high=t_high, hit=hit,
                            window=window, ratio=ratio,
                            product=t_at[0.25] / t_rel))
    flags = []
    if len(rows) >= 2:
        if all(all(b.ratio[e] <= a.ratio[e] + 1e-12
                   for a, b in zip(rows, rows[1:]))
               and rows[-1].ratio[e] < rows[0].ratio[e] - 1e-12
               for e in eps_grid):
            flags.append("cutoff-trend")
        prods = [r.product for r in rows]
        if (all(b >= a - 1e-12 for a, b in zip(prods, prods[1:]))
                and prods[-1] > prods[0] + 1e-12):
            flags.append("product-trend")
    return CutoffScan(family=name, alpha=float(alpha), eps_grid=eps_grid,
                      rows=rows, flags=flags)
