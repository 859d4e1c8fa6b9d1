"""Edge classification into the well-connected (R) and self-reinforcing (Q)
classes over a fixed side pair (A, B), plus the bad-edge matching check and
the two empirical conclusion checks built on them.

Classification verdicts are memoized per ordered edge and reproducible from
(H, A, B, params, seed).  For an edge between the sides the canonical order
puts the B-endpoint first: the pair tested is (neighbourhood of the
B-endpoint inside A, neighbourhood of the A-endpoint inside B).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from gridramsey.graphs import (
    Graph,
    VertexSet,
    edge_count_between,
    edge_count_within,
    iter_bits,
)
from gridramsey.regularity import _mix64, is_dense_pair

__all__ = [
    "EdgeClassParams",
    "EdgeClassification",
    "Matching",
    "bad_edge_matching",
    "check_pemb_conclusion",
    "check_cor_pemb_conclusion",
]

_REL_TOL = 1e-9


@dataclass(frozen=True)
class EdgeClassParams:
    """Constants for the R/Q verdicts.

    nu is kept separate from the conclusion-check mu even though the pipeline
    instantiates nu = mu.  eps_prime >= alpha is allowed: the denseness
    threshold alpha - eps_prime is then vacuous, which the permissive smoke
    configurations rely on.
    """

    eps_prime: float
    alpha: float
    p: float
    nu: float
    gamma: float
    dense_trials: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        if self.eps_prime <= 0:
            raise ValueError("eps_prime must be positive")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0 < self.p <= 1:
            raise ValueError("p must lie in (0, 1]")
        if not 0 < self.nu < 1:
            raise ValueError("nu must lie in (0, 1)")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.dense_trials < 1:
            raise ValueError("dense_trials must be positive")


@dataclass
class Matching:
    """Vertex-disjoint edge list."""

    edges: list[tuple[int, int]]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for u, v in self.edges:
            if u in seen or v in seen or u == v:
                raise ValueError("matching edges are not vertex-disjoint")
            seen.add(u)
            seen.add(v)

    def __len__(self) -> int:
        return len(self.edges)


class EdgeClassification:
    """Memoized per-edge verdicts against a fixed (A, B) side pair."""

    def __init__(self, H: Graph, A: VertexSet, B: VertexSet, params: EdgeClassParams):
        if not A.isdisjoint(B):
            raise ValueError("A and B must be disjoint")
        self.H = H
        self.A = A
        self.B = B
        self.params = params
        self.r_memo: dict[tuple[int, int], bool] = {}
        self.q_memo: dict[tuple[int, int], bool] = {}
        self._floor_a = params.alpha * params.p * A.size
        self._floor_b = params.alpha * params.p * B.size

    # -- R ------------------------------------------------------------------

    def in_R(self, w: int, z: int) -> bool:
        """Literal verdict on the ordered edge (w, z):
        degree floors into A and B plus a dense verdict on the pair
        (N_H(w, A), N_H(z, B))."""
        key = (w, z)
        cached = self.r_memo.get(key)
        if cached is not None:
            return cached
        verdict = self._compute_R(w, z)
        self.r_memo[key] = verdict
        return verdict

    def _compute_R(self, w: int, z: int) -> bool:
        H, params = self.H, self.params
        nw = H.row(w) & self.A.bits
        nz = H.row(z) & self.B.bits
        size_w = nw.bit_count()
        size_z = nz.bit_count()
        tol_a = _REL_TOL * max(1.0, self._floor_a)
        tol_b = _REL_TOL * max(1.0, self._floor_b)
        if size_w < self._floor_a - tol_a or size_z < self._floor_b - tol_b:
            return False
        if size_w == 0 or size_z == 0:
            return False
        X = VertexSet(H.n, nw)
        Y = VertexSet(H.n, nz)
        if size_w <= 12 and size_z <= 12:
            verdict = is_dense_pair(
                H, X, Y, params.eps_prime, params.alpha, params.p, mode="exhaustive"
            )
        else:
            verdict = is_dense_pair(
                H,
                X,
                Y,
                params.eps_prime,
                params.alpha,
                params.p,
                mode="sampled",
                trials=params.dense_trials,
                seed=_mix64(params.seed, w, z),
            )
        return verdict.dense

    # -- Q ------------------------------------------------------------------

    def in_Q(self, w: int, z: int) -> bool:
        """At least a (1 - nu)-fraction of the edges between N_H(w, A) and
        N_H(z, B) must themselves be in R.  An empty inner edge set counts as
        vacuously satisfied."""
        key = (w, z)
        cached = self.q_memo.get(key)
        if cached is not None:
            return cached
        verdict = self._compute_Q(w, z)
        self.q_memo[key] = verdict
        return verdict

    def _compute_Q(self, w: int, z: int) -> bool:
        H = self.H
        nw = H.row(w) & self.A.bits
        nz = H.row(z) & self.B.bits
        inner: list[tuple[int, int]] = []
        for a in iter_bits(nw):
            for b in iter_bits(H.row(a) & nz):
                inner.append((a, b))
        m = len(inner)
        if m == 0:
            return True
        need = math.ceil((1 - self.params.nu) * m - 1e-9)
        passes = 0
        fails = 0
        max_fails = m - need
        for a, b in inner:
            if self.in_R(b, a):  # canonical order: B-endpoint first
                passes += 1
                if passes >= need:
                    return True
            else:
                fails += 1
                if fails > max_fails:
                    return False
        return passes >= need

    # -- helpers --------------------------------------------------------------

    def canonical_order(self, u: int, v: int) -> tuple[int, int]:
        """Order an A-B edge as (B-endpoint, A-endpoint)."""
        if u in self.B and v in self.A:
            return (u, v)
        if v in self.B and u in self.A:
            return (v, u)
        raise ValueError(f"edge ({u}, {v}) does not cross the (A, B) pair")

    def edge_in_R(self, u: int, v: int) -> bool:
        return self.in_R(*self.canonical_order(u, v))

    def edge_in_Q(self, u: int, v: int) -> bool:
        return self.in_Q(*self.canonical_order(u, v))

    def edge_in_RQ(self, u: int, v: int) -> bool:
        w, z = self.canonical_order(u, v)
        return self.in_R(w, z) and self.in_Q(w, z)

    def recompute_R(self, w: int, z: int) -> bool:
        """Fresh evaluation bypassing the memo (memo-transparency checks)."""
        return self._compute_R(w, z)

    def records(self) -> list[dict]:
        """Classification dump records: one per ordered edge touched."""
        out = []
        keys = sorted(set(self.r_memo) | set(self.q_memo))
        for w, z in keys:
            out.append(
                {
                    "u": w,
                    "v": z,
                    "in_R": self.r_memo.get((w, z)),
                    "in_Q": self.q_memo.get((w, z)),
                    "seed": self.params.seed,
                    "trials": self.params.dense_trials,
                }
            )
        return out


# -- matching --------------------------------------------------------------------


def _cross_edges(H: Graph, A: VertexSet, B: VertexSet) -> list[tuple[int, int]]:
    """Edges (a, b) with a in A, b in B, sorted by (a, b)."""
    out = []
    for a in iter_bits(A.bits):
        for b in iter_bits(H.row(a) & B.bits):
            out.append((a, b))
    return out


def _maximum_matching(
    edges: list[tuple[int, int]]
) -> list[tuple[int, int]]:
    """Greedy matching improved by augmenting paths until maximum."""
    match_a: dict[int, int] = {}
    match_b: dict[int, int] = {}
    adj: dict[int, list[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
    for a, b in edges:
        if a not in match_a and b not in match_b:
            match_a[a] = b
            match_b[b] = a

    def try_augment(a: int, visited: set[int]) -> bool:
        for b in adj.get(a, ()):
            if b in visited:
                continue
            visited.add(b)
            if b not in match_b or try_augment(match_b[b], visited):
                match_a[a] = b
                match_b[b] = a
                return True
        return False

    for a in sorted(adj):
        if a not in match_a:
            try_augment(a, set())
    return sorted(match_a.items())


def bad_edge_matching(
    H: Graph,
    A: VertexSet,
    B: VertexSet,
    params: EdgeClassParams,
    *,
    eta: Optional[float] = None,
    cls: Optional[EdgeClassification] = None,
) -> tuple[Matching, dict]:
    """Maximum matching among cross edges that fail the R verdict.

    Precondition violations (bipartiteness between the sides, size window,
    degree floors) are reported, not fatal.  The report states the matching
    size against the gamma * |B| threshold.
    """
    if not A.isdisjoint(B):
        raise ValueError("A and B must be disjoint")
    if cls is None:
        cls = EdgeClassification(H, A, B, params)
    precond = {
        "size_window_ok": True if eta is None else (
            eta * H.n <= min(A.size, B.size)
            and A.size <= B.size <= 2 * A.size
        ),
        "inner_edges_A": edge_count_within(H, A),
        "inner_edges_B": edge_count_within(H, B),
    }
    floor_a = params.alpha * params.p * A.size
    floor_b = params.alpha * params.p * B.size
    deg_violations = 0
    for a in iter_bits(A.bits):
        if (H.row(a) & B.bits).bit_count() < floor_b - _REL_TOL:
            deg_violations += 1
    for b in iter_bits(B.bits):
        if (H.row(b) & A.bits).bit_count() < floor_a - _REL_TOL:
            deg_violations += 1
    precond["degree_floor_violations"] = deg_violations

    bad = [
        (a, b) for a, b in _cross_edges(H, A, B) if not cls.in_R(b, a)
    ]
    matched = _maximum_matching(bad)
    matching = Matching(matched)
    threshold = params.gamma * B.size
    report = {
        "matching_size": len(matching),
        "bad_edge_count": len(bad),
        "threshold_gamma_B": threshold,
        "below_threshold": len(matching) < threshold,
        "method": "greedy+augmentation (maximum)",
        "preconditions": precond,
    }
    return matching, report


# -- conclusion checks --------------------------------------------------------------


def _edge_fractions(
    H: Graph,
    X: VertexSet,
    Y: VertexSet,
    cls: EdgeClassification,
) -> tuple[int, float, float]:
    """Count E_H(X, Y) and the fractions landing in R and in Q.

    For an edge (x, y) with x in X and y in Y the tested order puts the
    Y-endpoint first, matching the orientation the conclusion statements use.
    """
    total = 0
    r_hits = 0
    q_hits = 0
    for x in iter_bits(X.bits):
        for y in iter_bits(H.row(x) & Y.bits):
            total += 1
            if cls.in_R(y, x):
                r_hits += 1
                if cls.in_Q(y, x):
                    q_hits += 1
            elif cls.in_Q(y, x):
                q_hits += 1
    if total == 0:
        raise ValueError("E_H(X, Y) is empty")
    return total, r_hits / total, q_hits / total


def _conclusion_check(
    H: Graph,
    X: VertexSet,
    Y: VertexSet,
    A: VertexSet,
    B: VertexSet,
    params: EdgeClassParams,
    mu: float,
    *,
    linear_sizes: bool,
    eta: Optional[float],
    host: Optional[Graph],
    u: Optional[int],
    v: Optional[int],
    eps_hyp: Optional[float],
    dense_trials: int,
) -> dict:
    n = H.n
    hyp: dict[str, Optional[bool]] = {}
    if linear_sizes:
        hyp["X_Y_linear_size"] = (
            None if eta is None else (X.size >= eta * n and Y.size >= eta * n)
        )
    else:
        if host is not None and u is not None and v is not None:
            hyp["X_in_host_nbhd"] = not (X.bits & ~host.row(v))
            hyp["Y_in_host_nbhd"] = not (Y.bits & ~host.row(u))
        else:
            hyp["X_in_host_nbhd"] = None
            hyp["Y_in_host_nbhd"] = None
        hyp["X_Y_size"] = (
            None
            if eta is None
            else (X.size >= eta * params.p * n and Y.size >= eta * params.p * n)
        )
    hyp["X_Y_disjoint"] = X.isdisjoint(Y)
    if linear_sizes:
        hyp["A_B_sizes"] = (
            None if eta is None else (min(A.size, B.size) >= eta * n)
        )
    else:
        hyp["A_B_sizes"] = (
            None
            if eta is None
            else (eta * n <= A.size <= B.size <= 2 * A.size)
        )
    e_xy = edge_count_between(H, X, Y)
    hyp["XY_edge_floor"] = e_xy > (params.alpha / 2) * params.p * X.size * Y.size
    if eps_hyp is not None:
        dense = is_dense_pair(
            H,
            A,
            B,
            eps_hyp,
            params.alpha,
            params.p,
            mode="sampled",
            trials=dense_trials,
            seed=_mix64(params.seed, 0xAB),
        )
        hyp["AB_dense_no_witness"] = dense.dense
    else:
        hyp["AB_dense_no_witness"] = None

    cls = EdgeClassification(H, A, B, replace(params, nu=mu))
    total, f_r, f_q = _edge_fractions(H, X, Y, cls)
    applicable = f_r >= 1 - mu - _REL_TOL
    holds = (not applicable) or f_q >= 1 - 2 * mu - _REL_TOL
    return {
        "hypotheses": hyp,
        "edge_count": total,
        "f_R": f_r,
        "f_Q": f_q,
        "mu": mu,
        "applicable": applicable,
        "implication_holds": holds,
    }


def check_pemb_conclusion(
    H: Graph,
    X: VertexSet,
    Y: VertexSet,
    A: VertexSet,
    B: VertexSet,
    params: EdgeClassParams,
    mu: float,
    *,
    eta: Optional[float] = None,
    host: Optional[Graph] = None,
    u: Optional[int] = None,
    v: Optional[int] = None,
    eps_hyp: Optional[float] = None,
    dense_trials: int = 400,
) -> dict:
    """Neighbourhood-scale conclusion check: if at least a (1 - mu)-fraction
    of E_H(X, Y) lies in R, then at least a (1 - 2 mu)-fraction lies in Q
    (with nu = mu).  Hypotheses are checked where the inputs allow and
    reported alongside the fractions."""
    return _conclusion_check(
        H,
        X,
        Y,
        A,
        B,
        params,
        mu,
        linear_sizes=False,
        eta=eta,
        host=host,
        u=u,
        v=v,
        eps_hyp=eps_hyp,
        dense_trials=dense_trials,
    )


def check_cor_pemb_conclusion(
    H: Graph,
    X: VertexSet,
    Y: VertexSet,
    A: VertexSet,
    B: VertexSet,
    params: EdgeClassParams,
    mu: float,
    *,
    eta: Optional[float] = None,
    eps_hyp: Optional[float] = None,
    dense_trials: int = 400,
) -> dict:
    """Linear-size variant of the conclusion check: X and Y are arbitrary
    disjoint sets of linear size rather than neighbourhood subsets."""
    return _conclusion_check(
        H,
        X,
        Y,
        A,
        B,
        params,
        mu,
        linear_sizes=True,
        eta=eta,
        host=None,
        u=None,
        v=None,
        eps_hyp=eps_hyp,
        dense_trials=dense_trials,
    )
