"""Verifiers for the almost-sure random-graph properties, a Chernoff-tail
calculator, and the first-moment grid-threshold calculator.

Each verifier reports exact counts and a capped violation list; every listed
violation is re-verified against the bitset kernels before it is reported.
The concentration statements are asymptotic, so at desk scale a verifier can
fail honestly; reports carry the margins rather than suppressing them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from gridramsey.graphs import (
    Graph,
    VertexSet,
    codegree,
    count_c4_constrained,
    edge_count_between,
    edge_count_within,
    neighbours_in,
)

__all__ = [
    "DeltaParams",
    "PropertyReport",
    "verify_degrees",
    "verify_codegrees",
    "count_heavy_into_neighbourhood",
    "count_heavy_into_set",
    "verify_nbhd_edge_concentration",
    "verify_global_concentration",
    "verify_c4_bound",
    "chernoff_tail",
    "first_moment_threshold",
    "run_property_suite",
    "DEFAULT_PROPERTY_DELTAS",
]

_VIOLATION_CAP = 100
_CODEGREE_SCAN_GUARD = 20_000


@dataclass(frozen=True)
class DeltaParams:
    """Concentration tolerance; the tail bound below holds for delta <= 3/2."""

    delta: float

    def __post_init__(self) -> None:
        if not 0 < self.delta <= 1.5:
            raise ValueError("delta must lie in (0, 3/2]")


@dataclass
class PropertyReport:
    property_id: str
    passed: bool
    violations: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    violation_cap: int = _VIOLATION_CAP

    def as_dict(self) -> dict:
        return {
            "property": self.property_id,
            "passed": self.passed,
            "violations": self.violations,
            "params": self.params,
            "counts": self.counts,
            "violation_cap": self.violation_cap,
        }


def _strict_window(x: float, low: float, high: float) -> bool:
    return low < x < high


def _packed_degrees(G: Graph) -> np.ndarray:
    return np.bitwise_count(G.packed()).sum(axis=1).astype(np.int64)


# -- degrees and codegrees ------------------------------------------------------


def verify_degrees(G: Graph, p: float, delta: float) -> PropertyReport:
    """Every vertex degree must lie strictly inside (1 +- delta) p n."""
    n = G.n
    low, high = (1 - delta) * p * n, (1 + delta) * p * n
    degs = _packed_degrees(G)
    bad = np.flatnonzero((degs <= low) | (degs >= high))
    violations = []
    for v in bad[:_VIOLATION_CAP]:
        v = int(v)
        d = G.degree(v)  # re-verify via the bitset kernel
        violations.append({"vertex": v, "degree": d})
    margin_low = float(degs.min() - low) if n else 0.0
    margin_high = float(high - degs.max()) if n else 0.0
    return PropertyReport(
        "i.degrees",
        passed=len(bad) == 0,
        violations=violations,
        params={"p": p, "delta": delta, "n": n},
        counts={
            "min_degree": int(degs.min()) if n else 0,
            "max_degree": int(degs.max()) if n else 0,
            "lower_bound": low,
            "upper_bound": high,
            "margin_lower": margin_low,
            "margin_upper": margin_high,
            "violation_count": int(len(bad)),
        },
    )


def verify_codegrees(
    G: Graph, p: float, delta: float, *, allow_large: bool = False
) -> PropertyReport:
    """Every unordered pair's joint-neighbourhood size must lie in (1 +- delta) p^2 n.

    The full pair scan is quadratic; it runs as a blocked 0/1 matrix product
    and re-verifies any flagged pair with the bitset kernel.
    """
    n = G.n
    if n > _CODEGREE_SCAN_GUARD and not allow_large:
        raise ValueError(
            f"codegree scan is O(n^2); n={n} exceeds the guard "
            f"({_CODEGREE_SCAN_GUARD}); pass allow_large=True to override"
        )
    low, high = (1 - delta) * p * p * n, (1 + delta) * p * p * n
    dense = np.unpackbits(G.packed(), axis=1, bitorder="little")[:, :n].astype(
        np.float32
    )
    violations = []
    total_bad = 0
    min_cod, max_cod = None, None
    block = 1024
    for start in range(0, n, block):
        stop = min(n, start + block)
        prod = dense[start:stop] @ dense.T  # codegree counts, exact in float32
        cods = prod.astype(np.int64)
        for local_u in range(stop - start):
            u = start + local_u
            row = cods[local_u, u + 1 :]
            if row.size == 0:
                continue
            lo = int(row.min())
            hi = int(row.max())
            min_cod = lo if min_cod is None else min(min_cod, lo)
            max_cod = hi if max_cod is None else max(max_cod, hi)
            bad = np.flatnonzero((row <= low) | (row >= high))
            total_bad += len(bad)
            for off in bad:
                if len(violations) >= _VIOLATION_CAP:
                    break
                w = u + 1 + int(off)
                violations.append(
                    {"u": u, "w": w, "codegree": codegree(G, u, w)}
                )
    return PropertyReport(
        "i.codegrees",
        passed=total_bad == 0,
        violations=violations,
        params={"p": p, "delta": delta, "n": n},
        counts={
            "min_codegree": min_cod,
            "max_codegree": max_cod,
            "lower_bound": low,
            "upper_bound": high,
            "violation_count": total_bad,
        },
    )


# -- heavy-vertex counts ----------------------------------------------------------


def _count_heavy(G: Graph, target_bits: int, cap: float) -> tuple[int, list[int]]:
    heavy = []
    for y in range(G.n):
        if (G.row(y) & target_bits).bit_count() > cap:
            heavy.append(y)
    return len(heavy), heavy


def count_heavy_into_neighbourhood(
    G: Graph, p: float, delta: float, v: int, X: VertexSet
) -> tuple[int, PropertyReport]:
    """Count vertices with too many neighbours inside X, a subset of N(v)."""
    if X.bits & ~G.row(v):
        raise ValueError("X must be a subset of the neighbourhood of v")
    if X.size < delta * p * G.n:
        raise ValueError("X too small: need |X| >= delta * p * n")
    cap = (1 + delta) * p * X.size
    bound = 7 / (delta**3 * p)
    count, heavy = _count_heavy(G, X.bits, cap)
    violations = [
        {"y": y, "neighbours_in_X": neighbours_in(G, y, X).size}
        for y in heavy[:_VIOLATION_CAP]
    ]
    report = PropertyReport(
        "ii",
        passed=count <= bound,
        violations=violations if count > bound else [],
        params={"p": p, "delta": delta, "v": v, "set_size": X.size},
        counts={"heavy_count": count, "bound": bound, "degree_cap": cap},
    )
    return count, report


def count_heavy_into_set(
    G: Graph, p: float, delta: float, U: VertexSet
) -> tuple[int, PropertyReport]:
    """Count vertices with too many neighbours inside a linear-size set U."""
    if U.size < delta * G.n:
        raise ValueError("U too small: need |U| >= delta * n")
    cap = (1 + delta) * p * U.size
    bound = 7 / (delta**3 * p)
    count, heavy = _count_heavy(G, U.bits, cap)
    violations = [
        {"y": y, "neighbours_in_U": neighbours_in(G, y, U).size}
        for y in heavy[:_VIOLATION_CAP]
    ]
    report = PropertyReport(
        "iii",
        passed=count <= bound,
        violations=violations if count > bound else [],
        params={"p": p, "delta": delta, "set_size": U.size},
        counts={"heavy_count": count, "bound": bound, "degree_cap": cap},
    )
    return count, report


# -- edge concentration ------------------------------------------------------------


def verify_nbhd_edge_concentration(
    G: Graph,
    p: float,
    delta: float,
    u: int,
    w: int,
    U: VertexSet,
    W: VertexSet,
    *,
    enforce_sizes: bool = True,
) -> PropertyReport:
    """Edge count between neighbourhood subsets must lie in (1 +- delta) p |U| |W|.

    The W-side floor 3 * delta^-3 * p * n / log(n) exceeds any neighbourhood
    until n is astronomically large; with enforce_sizes=False the floor check
    is recorded in the report instead of raised.
    """
    if u == w:
        raise ValueError("need two distinct vertices")
    if U.bits & ~G.row(u):
        raise ValueError("U must be a subset of the neighbourhood of u")
    if W.bits & ~G.row(w):
        raise ValueError("W must be a subset of the neighbourhood of w")
    u_floor = delta * p * G.n
    w_floor = 3 * p * G.n / (delta**3 * math.log(G.n)) if G.n > 1 else 0.0
    sizes_ok = U.size >= u_floor and W.size >= w_floor
    if enforce_sizes and not sizes_ok:
        raise ValueError(
            f"size preconditions violated: |U|={U.size} (floor {u_floor:.1f}), "
            f"|W|={W.size} (floor {w_floor:.1f})"
        )
    e = edge_count_between(G, U, W)
    low, high = (1 - delta) * p * U.size * W.size, (1 + delta) * p * U.size * W.size
    passed = _strict_window(e, low, high)
    return PropertyReport(
        "iv",
        passed=passed,
        violations=[] if passed else [{"u": u, "w": w, "edges": e}],
        params={
            "p": p,
            "delta": delta,
            "u": u,
            "w": w,
            "U_size": U.size,
            "W_size": W.size,
            "sizes_ok": sizes_ok,
            "w_floor": w_floor,
        },
        counts={"edges": e, "lower_bound": low, "upper_bound": high},
    )


def verify_global_concentration(
    G: Graph, p: float, delta: float, A: VertexSet, B: VertexSet
) -> PropertyReport:
    """Within-set and cross-set edge counts of linear-size sets concentrate."""
    if not A.isdisjoint(B):
        raise ValueError("A and B must be disjoint")
    if A.size < delta * G.n or B.size < delta * G.n:
        raise ValueError("need |A|, |B| >= delta * n")
    e_in = edge_count_within(G, A)
    e_cross = edge_count_between(G, A, B)
    exp_in = p * math.comb(A.size, 2)
    exp_cross = p * A.size * B.size
    ok_in = _strict_window(e_in, (1 - delta) * exp_in, (1 + delta) * exp_in)
    ok_cross = _strict_window(
        e_cross, (1 - delta) * exp_cross, (1 + delta) * exp_cross
    )
    violations = []
    if not ok_in:
        violations.append({"kind": "within", "edges": e_in, "expected": exp_in})
    if not ok_cross:
        violations.append(
            {"kind": "between", "edges": e_cross, "expected": exp_cross}
        )
    return PropertyReport(
        "v",
        passed=ok_in and ok_cross,
        violations=violations,
        params={"p": p, "delta": delta, "A_size": A.size, "B_size": B.size},
        counts={
            "edges_within": e_in,
            "edges_between": e_cross,
            "expected_within": exp_in,
            "expected_between": exp_cross,
        },
    )


def verify_c4_bound(
    G: Graph,
    p: float,
    delta: float,
    X: VertexSet,
    Y: VertexSet,
    A: VertexSet,
    B: VertexSet,
    u: int,
    v: int,
) -> PropertyReport:
    """Constrained 4-cycle count must stay below 2 p^4 |X| |Y| |A| |B|."""
    if u == v:
        raise ValueError("need two distinct vertices")
    if X.bits & ~G.row(u):
        raise ValueError("X must be a subset of the neighbourhood of u")
    if Y.bits & ~G.row(v):
        raise ValueError("Y must be a subset of the neighbourhood of v")
    if not X.isdisjoint(Y):
        raise ValueError("X and Y must be disjoint")
    if not A.isdisjoint(B):
        raise ValueError("A and B must be disjoint")
    if X.size < delta * p * G.n or Y.size < delta * p * G.n:
        raise ValueError("need |X|, |Y| >= delta * p * n")
    if A.size < delta * G.n or B.size < delta * G.n:
        raise ValueError("need |A|, |B| >= delta * n")
    count = count_c4_constrained(G, X, Y, A, B)
    bound = 2 * p**4 * X.size * Y.size * A.size * B.size
    passed = count <= bound
    return PropertyReport(
        "vi",
        passed=passed,
        violations=[] if passed else [{"count": count, "bound": bound}],
        params={
            "p": p,
            "delta": delta,
            "u": u,
            "v": v,
            "sizes": [X.size, Y.size, A.size, B.size],
        },
        counts={"c4_count": count, "bound": bound},
    )


# -- calculators ---------------------------------------------------------------------


def chernoff_tail(n_trials: float, p: float, delta: float) -> float:
    """Two-sided binomial tail bound 2 exp(-delta^2 n p / 3), delta in (0, 3/2]."""
    if not 0 < delta <= 1.5:
        raise ValueError("delta must lie in (0, 3/2]")
    return 2.0 * math.exp(-(delta**2) * n_trials * p / 3.0)


def first_moment_threshold(n: int, p: float) -> Optional[int]:
    """Smallest s >= 2 with n^(s^2) * p^(2 s (s-1)) < 1, or None if no s exists.

    Computed in log space: s^2 ln n + 2 s (s-1) ln p < 0.  For p >= n^(-1/2)
    the expectation exceeds 1 for every s.
    """
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if n < 2:
        raise ValueError("n must be at least 2")
    ln_n, ln_p = math.log(n), math.log(p)
    if ln_n + 2 * ln_p >= 0:
        return None
    s = 2
    while s * s * ln_n + 2 * s * (s - 1) * ln_p >= 0:
        s += 1
    return s


# -- per-seed suite ---------------------------------------------------------------


DEFAULT_PROPERTY_DELTAS = {
    "i.degrees": 0.15,
    "i.codegrees": 0.2,
    "ii": 0.2,
    "iii": 0.2,
    "iv": 0.2,
    "v": 0.15,
    "vi": 0.2,
}


def _suite_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=np.array([seed & (2**64 - 1), 0x5E], dtype=np.uint64))
    )


def run_property_suite(
    G: Graph,
    p: float,
    seed: int,
    properties: Optional[list[str]] = None,
    deltas: Optional[dict] = None,
    pair_samples: int = 50,
) -> list[PropertyReport]:
    """Run the selected verifiers on deterministic, seed-derived instance sets.

    Instance choices follow the statements: X is a full neighbourhood for the
    heavy count, U a 0.2n random set, the concentration checks use random
    vertex pairs with full neighbourhoods, and the 4-cycle check gets
    neighbourhood-derived disjoint sets at the minimum allowed sizes.
    """
    n = G.n
    deltas = {**DEFAULT_PROPERTY_DELTAS, **(deltas or {})}
    wanted = properties or ["i", "ii", "iii", "iv", "v", "vi"]
    expanded = []
    for w in wanted:
        if w == "i":
            expanded += ["i.degrees", "i.codegrees"]
        else:
            expanded.append(w)
    gen = _suite_rng(seed)
    reports: list[PropertyReport] = []

    def pick_vertex_with_degree(lo: float) -> int:
        start = int(gen.integers(0, n))
        for off in range(n):
            v = (start + off) % n
            if G.degree(v) >= lo:
                return v
        raise ValueError("no vertex with a large enough neighbourhood")

    for prop in expanded:
        delta = deltas.get(prop, deltas.get(prop.split(".")[0], 0.2))
        if prop == "i.degrees":
            reports.append(verify_degrees(G, p, delta))
        elif prop == "i.codegrees":
            reports.append(verify_codegrees(G, p, delta))
        elif prop == "ii":
            v = pick_vertex_with_degree(delta * p * n)
            X = G.neighbourhood(v)
            _, rep = count_heavy_into_neighbourhood(G, p, delta, v, X)
            reports.append(rep)
        elif prop == "iii":
            size = max(int(0.2 * n), math.ceil(delta * n))
            ids = gen.permutation(n)[:size]
            _, rep = count_heavy_into_set(
                G, p, delta, VertexSet.from_ids(n, ids.tolist())
            )
            reports.append(rep)
        elif prop == "iv":
            floor = delta * p * n
            all_pass = True
            fails = []
            w_floor = None
            for k in range(pair_samples):
                u = pick_vertex_with_degree(floor)
                w = pick_vertex_with_degree(floor)
                if u == w:
                    w = (w + 1) % n
                rep = verify_nbhd_edge_concentration(
                    G,
                    p,
                    delta,
                    u,
                    w,
                    G.neighbourhood(u),
                    G.neighbourhood(w),
                    enforce_sizes=False,
                )
                w_floor = rep.params["w_floor"]
                if not rep.passed:
                    all_pass = False
                    fails.extend(rep.violations)
            reports.append(
                PropertyReport(
                    "iv",
                    passed=all_pass,
                    violations=fails[:_VIOLATION_CAP],
                    params={
                        "p": p,
                        "delta": delta,
                        "pairs_sampled": pair_samples,
                        "w_floor_unmet_at_this_scale": w_floor,
                    },
                    counts={"failed_pairs": len(fails)},
                )
            )
        elif prop == "v":
            size = max(int(0.2 * n), math.ceil(delta * n))
            perm = gen.permutation(n)
            A = VertexSet.from_ids(n, perm[:size].tolist())
            B = VertexSet.from_ids(n, perm[size : 2 * size].tolist())
            reports.append(verify_global_concentration(G, p, delta, A, B))
        elif prop == "vi":
            floor = math.ceil(delta * p * n)
            u = pick_vertex_with_degree(floor + 1)
            v = pick_vertex_with_degree(floor + 1)
            if v == u:
                v = (v + 1) % n
            nu_ids = [x for x in G.neighbourhood(u).ids() if x != v]
            X = VertexSet.from_ids(n, nu_ids[:floor])
            nv_pool = [
                x for x in G.neighbourhood(v).ids() if x != u and x not in X
            ]
            if len(nv_pool) < floor:
                raise ValueError("neighbourhoods overlap too much for disjoint X, Y")
            Y = VertexSet.from_ids(n, nv_pool[:floor])
            size_ab = math.ceil(delta * n)
            perm = gen.permutation(n)
            A = VertexSet.from_ids(n, perm[:size_ab].tolist())
            B = VertexSet.from_ids(n, perm[size_ab : 2 * size_ab].tolist())
            reports.append(verify_c4_bound(G, p, delta, X, Y, A, B, u, v))
        else:
            raise ValueError(f"unknown property {prop!r}")
    return reports
