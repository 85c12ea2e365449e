"""Weighted-tree walks: crossing times, concentration, and mixing windows.

A tree walk is specified by positive edge weights and per-vertex holding
probabilities (at least 1/2): from u the walk stays with probability
``holding[u]`` and otherwise moves to a neighbor with probability
proportional to the edge weight.  Detailed balance gives
``pi(u) proportional to W(u) / (1 - holding[u])`` with W the weight sum
at u.

The tree is rooted at a central vertex (every component of the complement
has stationary mass at most 1/2), which makes each edge-crossing time obey
``E_u[T_parent^2] <= 4 E_u[T_parent] t_rel`` and turns hitting times of
ancestors into sums of independent crossings -- the engine behind the
variance, window, and sub-gaussian tail checks here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .chain import Chain, ChainSpec, load_chain, write_json_atomic
from .hitting import IdentityCheckError
from .mixing import mixing_time
from .reporting import Record, check_le, skip

__all__ = [
    "TreeSpec",
    "RootedTreeChain",
    "build_tree_chain",
    "tree_from_chain",
    "CrossingTime",
    "crossing_time",
    "PathVariance",
    "path_variance",
    "tau_root",
    "window_check",
    "tail_bound_check",
    "tree_to_json",
    "tree_from_json",
]


@dataclass(eq=False)
class TreeSpec:
    """Edge-weighted tree with holding probabilities.

    ``edges`` is a list of (u, v, weight) with 0-based vertex indices;
    ``holding[u]`` is the laziness at u and must be at least 1/2.
    """

    n: int
    edges: list[tuple[int, int, float]]
    holding: np.ndarray

    def validate(self) -> None:
        if self.n < 2:
            raise ValueError("tree needs at least two vertices")
        if len(self.edges) != self.n - 1:
            raise ValueError(f"a tree on {self.n} vertices has {self.n - 1} edges, "
                             f"got {len(self.edges)}")
        h = np.asarray(self.holding, dtype=float)
        if h.shape != (self.n,):
            raise ValueError("holding vector has wrong length")
        if h.min() < 0.5 - 1e-12 or h.max() >= 1.0:
            raise ValueError("holding probabilities must lie in [1/2, 1)")
        seen = set()
        for u, v, w in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise ValueError(f"bad edge ({u}, {v})")
            if w <= 0:
                raise ValueError(f"edge ({u}, {v}) has non-positive weight")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        # n-1 distinct edges + connectivity equivalent to acyclicity
        if _component_count(self.n, self.edges) != 1:
            raise ValueError("edge set is not connected")


def _component_count(n: int, edges) -> int:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    comps = n
    for u, v, _ in edges:
        ra, rb = find(u), find(v)
        if ra != rb:
            parent[ra] = rb
            comps -= 1
    return comps


def _adjacency(spec: TreeSpec) -> list[list[tuple[int, float]]]:
    adj: list[list[tuple[int, float]]] = [[] for _ in range(spec.n)]
    for u, v, w in spec.edges:
        adj[u].append((v, float(w)))
        adj[v].append((u, float(w)))
    return adj


def _central_vertex(pi: np.ndarray, adj) -> int:
    """Smallest-index vertex all of whose complement components weigh <= 1/2."""
    n = pi.size
    parent = np.full(n, -1, dtype=int)
    order = [0]
    seen = {0}
    for v in order:
        for u, _ in adj[v]:
            if u not in seen:
                seen.add(u)
                parent[u] = v
                order.append(u)
    mass = pi.copy()
    for v in reversed(order[1:]):
        mass[parent[v]] += mass[v]
    best = None
    for v in range(n):
        worst = 1.0 - mass[v]  # component holding the temporary root's side
        for u, _ in adj[v]:
            if parent[u] == v:
                worst = max(worst, mass[u])
        if worst <= 0.5 + 1e-12:
            best = v
            break
    if best is None:
        raise RuntimeError("no central vertex found; tree masses are inconsistent")
    return best


@dataclass(eq=False)
class RootedTreeChain:
    """A tree walk rooted at its central vertex.

    ``parent[u]`` is the next vertex toward the root (-1 at the root),
    ``subtree_mass[u]`` the stationary mass of u's subtree, and ``mu[u]``
    the one-step probability of moving from u to its parent.
    """

    spec: TreeSpec
    chain: Chain
    root: int
    parent: np.ndarray
    order: np.ndarray  # BFS order from the root
    subtree_mass: np.ndarray
    mu: np.ndarray

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def pi(self) -> np.ndarray:
        return self.chain.pi

    @cached_property
    def t_rel(self) -> float:
        return self.chain.spectrum.t_rel

    def path_to_root(self, x: int) -> list[int]:
        path = [x]
        while path[-1] != self.root:
            path.append(int(self.parent[path[-1]]))
        return path

    def is_ancestor(self, y: int, x: int) -> bool:
        return y in self.path_to_root(x)

    @cached_property
    def mean_to_root(self) -> np.ndarray:
        """E_x[T_root] for every x, via one killed-kernel solve."""
        B = np.array([v for v in range(self.n) if v != self.root])
        PB = self.chain.P[np.ix_(B, B)]
        h = np.zeros(self.n)
        h[B] = np.linalg.solve(np.eye(B.size) - PB, np.ones(B.size))
        return h


def build_tree_chain(spec: TreeSpec) -> RootedTreeChain:
    """Assemble the walk, its exact stationary law, and the central rooting."""
    spec.validate()
    n = spec.n
    adj = _adjacency(spec)
    W = np.array([sum(w for _, w in nbrs) for nbrs in adj])
    h = np.asarray(spec.holding, dtype=float)
    P = np.zeros((n, n))
    for u in range(n):
        P[u, u] = h[u]
        for v, w in adj[u]:
            P[u, v] = (1.0 - h[u]) * w / W[u]
    pi = W / (1.0 - h)
    pi = pi / pi.sum()
    chain = load_chain(ChainSpec(P=P, pi=pi))
    if not chain.is_reversible:
        raise RuntimeError("tree walk failed detailed balance; construction bug")

    root = _central_vertex(pi, adj)
    parent = np.full(n, -1, dtype=int)
    order = [root]
    seen = {root}
    for v in order:
        for u, _ in adj[v]:
            if u not in seen:
                seen.add(u)
                parent[u] = v
                order.append(u)
    order = np.array(order)
    subtree = pi.copy()
    for v in order[:0:-1]:
        subtree[parent[v]] += subtree[v]
    mu = np.zeros(n)
    for u in range(n):
        if parent[u] >= 0:
            mu[u] = P[u, parent[u]]
    return RootedTreeChain(spec=spec, chain=chain, root=root, parent=parent,
                           order=order, subtree_mass=subtree, mu=mu)


def tree_from_chain(chain: Chain) -> RootedTreeChain:
    """Recover tree structure from any reversible chain with tree support.

    Edge weights are the stationary flows ``pi(u) P(u, v)`` (symmetric
    under detailed balance); holdings are the diagonal.  The rebuilt walk
    reproduces the original matrix exactly.
    """
    chain.require(reversible=True, irreducible=True)
    P = chain.P
    n = chain.n
    off = P.copy()
    np.fill_diagonal(off, 0.0)
    sym = (off > 0)
    if not (sym == sym.T).all():
        raise ValueError("support is not symmetric; not a reversible tree walk")
    iu, ju = np.nonzero(np.triu(sym, k=1))
    if iu.size != n - 1:
        raise ValueError(f"support has {iu.size} undirected edges; a tree needs {n - 1}")
    edges = [(int(u), int(v), float(chain.pi[u] * P[u, v])) for u, v in zip(iu, ju)]
    spec = TreeSpec(n=n, edges=edges, holding=np.diag(P).copy())
    tc = build_tree_chain(spec)
    if np.max(np.abs(tc.chain.P - P)) > 1e-12:
        raise RuntimeError("tree reconstruction failed to reproduce the kernel")
    return tc


# ---------------------------------------------------------------------------
# crossing times


@dataclass(eq=False)
class CrossingTime:
    """Moments of the time to step from u to its parent edge endpoint."""

    u: int
    mean: float
    second_moment: float
    variance: float


def _subtree_vertices(tc: RootedTreeChain, u: int) -> np.ndarray:
    children: dict[int, list[int]] = {}
    for v in range(tc.n):
        if tc.parent[v] >= 0:
            children.setdefault(int(tc.parent[v]), []).append(v)
    stack = [u]
    members = []
    while stack:
        v = stack.pop()
        members.append(v)
        stack.extend(children.get(v, []))
    return np.array(sorted(members))


def crossing_time(tc: RootedTreeChain, u: int, check_tol: float = 1e-9) -> CrossingTime:
    """Exact crossing-time moments for the edge (u, parent(u)).

    The mean is the flow formula ``pi(subtree(u)) / (pi(u) mu_u)`` and the
    second moment the entry-law identity
    ``2 t_u E_{pi restricted to subtree}[T_parent] - t_u``; both are
    cross-checked against direct linear solves, and the ceiling
    ``r_u <= 4 t_u t_rel`` (valid under the central rooting) is enforced.
    """
    if u == tc.root:
        raise ValueError("the root has no parent edge")
    pi = tc.pi
    t_u = tc.subtree_mass[u] / (pi[u] * tc.mu[u])
    members = _subtree_vertices(tc, u)
    PB = tc.chain.P[np.ix_(members, members)]
    I = np.eye(members.size)
    hB = np.linalg.solve(I - PB, np.ones(members.size))
    pos = int(np.nonzero(members == u)[0][0])
    t_u_solve = float(hB[pos])
    if abs(t_u - t_u_solve) > check_tol * max(1.0, abs(t_u)):
        raise IdentityCheckError(f"crossing mean mismatch: formula {t_u}, solve {t_u_solve}")
    pw = pi[members] / pi[members].sum()
    mean_from_stationary = float(pw @ hB)
    r_u = 2.0 * t_u * mean_from_stationary - t_u
    mB = np.linalg.solve(I - PB, 2.0 * hB - 1.0)
    r_u_solve = float(mB[pos])
    if abs(r_u - r_u_solve) > check_tol * max(1.0, abs(r_u)):
        raise IdentityCheckError(f"crossing second moment mismatch: formula {r_u}, solve {r_u_solve}")
    ceiling = 4.0 * t_u * tc.t_rel
    if r_u > ceiling * (1.0 + 1e-9) + 1e-9:
        raise IdentityCheckError(f"crossing second moment {r_u} exceeds 4 t_u t_rel = {ceiling}")
    return CrossingTime(u=u, mean=t_u, second_moment=r_u, variance=r_u - t_u * t_u)


@dataclass(eq=False)
class PathVariance:
    """Moments of T_y from x for an ancestor y, via independent crossings."""

    x: int
    y: int
    mean: float
    variance: float
    sigma_sq: float
    tail_records: list[Record]


def _tail_function(chain: Chain, target: int, t_max: int) -> np.ndarray:
    """Pr[T_target > t] for all starts, t = 0 .. t_max; rows are times."""
    B = np.array([v for v in range(chain.n) if v != target])
    PB = chain.P[np.ix_(B, B)]
    u = np.ones(B.size)
    out = np.zeros((t_max + 1, chain.n))
    for t in range(t_max + 1):
        out[t, B] = u
        u = PB @ u
    return out


def path_variance(tc: RootedTreeChain, x: int, y: int | None = None,
                  c_grid=(1.0, 2.0, 3.0)) -> PathVariance:
    """Variance of T_y from x as a sum of independent crossing variances.

    Asserts agreement with the direct second-moment solve, the ceiling
    ``Var <= sigma^2 = 4 E_x[T_y] t_rel``, and the one-sided Chebyshev
    consequences ``Pr[T >= mean + c sigma] <= 1/(1+c^2)`` (and the mirrored
    lower tail) against exact tail evaluations for each c in ``c_grid``.
    """
    y = tc.root if y is None else y
    path = tc.path_to_root(x)
    if y not in path:
        raise ValueError(f"{y} is not an ancestor of {x}")
    path = path[: path.index(y) + 1]
    if len(path) < 2:
        raise ValueError("x and y coincide")
    mean = 0.0
    var = 0.0
    for u in path[:-1]:
        ct = crossing_time(tc, u)
        mean += ct.mean
        var += ct.variance
    # independence of increments: compare with a direct solve to the target
    B = np.array([v for v in range(tc.n) if v != y])
    PB = tc.chain.P[np.ix_(B, B)]
    I = np.eye(B.size)
    hB = np.linalg.solve(I - PB, np.ones(B.size))
    mB = np.linalg.solve(I - PB, 2.0 * hB - 1.0)
    pos = int(np.nonzero(B == x)[0][0])
    mean_solve, second_solve = float(hB[pos]), float(mB[pos])
    if abs(mean - mean_solve) > 1e-9 * max(1.0, abs(mean)):
        raise IdentityCheckError("path mean disagrees with direct solve")
    var_solve = second_solve - mean_solve ** 2
    if abs(var - var_solve) > 1e-9 * max(1.0, abs(var), second_solve):
        raise IdentityCheckError("crossing variances do not add up to the direct variance")
    sigma_sq = 4.0 * mean * tc.t_rel
    if var > sigma_sq * (1.0 + 1e-9):
        raise IdentityCheckError(f"variance {var} exceeds 4 E t_rel = {sigma_sq}")

    sigma = math.sqrt(sigma_sq)
    t_cap = int(math.ceil(mean + max(c_grid) * sigma)) + 1
    tails = _tail_function(tc.chain, y, t_cap)
    records = []
    for c in c_grid:
        bound = 1.0 / (1.0 + c * c)
        thr_hi = mean + c * sigma
        p_hi = float(tails[min(t_cap, max(0, math.ceil(thr_hi) - 1)), x])
        rec = check_le("one-sided-upper-tail", p_hi, bound,
                       params={"x": x, "y": y, "c": c, "threshold": thr_hi})
        records.append(rec)
        thr_lo = mean - c * sigma
        if thr_lo <= 0:
            p_lo = 0.0
        else:
            p_lo = 1.0 - float(tails[min(t_cap, int(math.floor(thr_lo))), x])
        records.append(check_le("one-sided-lower-tail", p_lo, bound,
                                params={"x": x, "y": y, "c": c, "threshold": thr_lo}))
    for rec in records:
        if not rec.passed:
            raise IdentityCheckError(f"Chebyshev tail check failed: {rec.inequality} {rec.params}")
    return PathVariance(x=x, y=y, mean=mean, variance=var, sigma_sq=sigma_sq,
                        tail_records=records)


# ---------------------------------------------------------------------------
# root hitting and windows


def tau_root(tc: RootedTreeChain, eps: float, t_max: int = 1_000_000) -> int:
    """Smallest t with ``max_x Pr_x[T_root > t] <= eps``."""
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    B = np.array([v for v in range(tc.n) if v != tc.root])
    PB = tc.chain.P[np.ix_(B, B)]
    u = np.ones(B.size)
    t = 0
    while u.max() > eps + 1e-12:
        u = PB @ u
        t += 1
        if t > t_max:
            raise RuntimeError("tau_root scan failed to terminate")
    return t


def tau_sandwich_check(tc: RootedTreeChain, eps: float, delta: float | None = None,
                       exact_threshold: int = 14) -> list[Record]:
    """Worst-set sandwich: tau(eps) <= hit_{1/2}(eps) <= tau(eps - delta) + s_delta
    with ``s_delta = ceil(4 t_rel |ln(4 delta / 9)|)``."""
    from .hitting import hit_time

    if delta is None:
        delta = eps / 2.0
    if not 0 < delta < eps:
        raise ValueError("need 0 < delta < eps")
    if tc.n > exact_threshold:
        return [skip("tau-hit-sandwich", f"n = {tc.n} exceeds exact threshold", {"eps": eps})]
    hit = hit_time(tc.chain, 0.5, eps).value
    lo = tau_root(tc, eps)
    s_delta = math.ceil(4.0 * tc.t_rel * abs(math.log(4.0 * delta / 9.0)))
    hi = tau_root(tc, eps - delta) + s_delta
    return [
        check_le("tau-below-worst-set-hit", lo, hit, {"eps": eps}),
        check_le("worst-set-hit-below-shifted-tau", hit, hi,
                 {"eps": eps, "delta": delta, "s_delta": s_delta}),
    ]


def window_check(tc: RootedTreeChain, eps: float) -> list[Record]:
    """Mixing-window and root-concentration checks for a tree walk.

    Verifies, at level eps in (0, 1/4] on trees with at least 3 vertices:
    the square-root mixing window
    ``t_mix(eps) - t_mix(1-eps) <= 35 sqrt(t_rel t_mix / eps)``,
    the domination ``max_x E_x[T_root] <= 4 t_mix``, and the two-sided
    localization of tau_root around ``rho = max_x E_x[T_root]`` within
    ``kappa = sqrt(4 rho t_rel / eps)``.
    """
    if not 0 < eps <= 0.25:
        raise ValueError("eps must be in (0, 1/4]")
    if tc.n < 3:
        raise ValueError("window check needs at least 3 vertices")
    chain = tc.chain
    t_rel = tc.t_rel
    t_mix = mixing_time(chain, 0.25)
    t_hi = mixing_time(chain, eps)
    t_lo = mixing_time(chain, 1.0 - eps)
    window = t_hi - t_lo
    bound = 35.0 * math.sqrt(t_rel * t_mix / eps)
    records = [check_le("mixing-window-sqrt", window, bound,
                        {"eps": eps, "t_mix": t_mix, "t_rel": t_rel})]
    rho = float(tc.mean_to_root.max())
    records.append(check_le("root-mean-below-4tmix", rho, 4.0 * t_mix,
                            {"t_mix": t_mix}))
    kappa = math.sqrt(4.0 * rho * t_rel / eps)
    records.append(check_le("tau-lower-concentration", rho - kappa,
                            tau_root(tc, 1.0 - eps), {"eps": eps, "rho": rho, "kappa": kappa}))
    records.append(check_le("tau-upper-concentration", tau_root(tc, eps),
                            rho + kappa, {"eps": eps, "rho": rho, "kappa": kappa},
                            note="strict in exact arithmetic"))
    return records


def tail_bound_check(tc: RootedTreeChain, x: int, y: int | None = None,
                     c_grid=(0.5, 1.0, 2.0)) -> list[Record]:
    """Sub-gaussian two-sided tail bounds for T_y around its mean.

    For ``b = sqrt(E_x[T_y] t_rel)`` and admissible
    ``c <= 2.5 sqrt(E_x[T_y] / t_rel)`` the exact tails must satisfy
    ``Pr_x[|T_y - E_x[T_y]| >= c b] <= exp(-c^2 / 20)`` on each side.
    Inadmissible c values are recorded as skips.
    """
    y = tc.root if y is None else y
    path = tc.path_to_root(x)
    if y not in path or y == x:
        raise ValueError("y must be a proper ancestor of x")
    B = np.array([v for v in range(tc.n) if v != y])
    PB = tc.chain.P[np.ix_(B, B)]
    hB = np.linalg.solve(np.eye(B.size) - PB, np.ones(B.size))
    pos = int(np.nonzero(B == x)[0][0])
    t_xy = float(hB[pos])
    b = math.sqrt(t_xy * tc.t_rel)
    c_max = 2.5 * math.sqrt(t_xy / tc.t_rel)
    admissible = [c for c in c_grid if c <= c_max]
    records: list[Record] = []
    if not admissible:
        return [skip("sub-gaussian-tails", f"no admissible c (c_max = {c_max:.3g})",
                     {"x": x, "y": y})]
    t_cap = int(math.ceil(t_xy + max(admissible) * b)) + 1
    tails = _tail_function(tc.chain, y, t_cap)
    for c in c_grid:
        if c > c_max:
            records.append(skip("sub-gaussian-tails", f"c = {c} exceeds c_max = {c_max:.3g}",
                                {"x": x, "y": y, "c": c}))
            continue
        bound = math.exp(-c * c / 20.0)
        thr_hi = t_xy + c * b
        p_hi = float(tails[min(t_cap, max(0, math.ceil(thr_hi) - 1)), x])
        records.append(check_le("sub-gaussian-upper-tail", p_hi, bound,
                                {"x": x, "y": y, "c": c, "b": b}))
        thr_lo = t_xy - c * b
        p_lo = 0.0 if thr_lo <= 0 else 1.0 - float(tails[min(t_cap, int(math.floor(thr_lo))), x])
        records.append(check_le("sub-gaussian-lower-tail", p_lo, bound,
                                {"x": x, "y": y, "c": c, "b": b}))
    return records


# ---------------------------------------------------------------------------
# JSON round trip


def tree_to_json(spec: TreeSpec, path: str) -> None:
    payload = {
        "vertices": spec.n,
        "edges": [{"u": int(u), "v": int(v), "w": float(w)} for u, v, w in spec.edges],
        "holding": np.asarray(spec.holding, dtype=float).tolist(),
    }
    write_json_atomic(path, payload)


def tree_from_json(path: str) -> TreeSpec:
    with open(path) as fh:
        payload = json.load(fh)
    edges = [(int(e["u"]), int(e["v"]), float(e["w"])) for e in payload["edges"]]
    spec = TreeSpec(n=int(payload["vertices"]), edges=edges,
                    holding=np.array(payload["holding"], dtype=float))
    spec.validate()
    return spec
