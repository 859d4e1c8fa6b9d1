"""Scaled densities, denseness/regularity verdicts, boundedness, and partitions.

The exact verdicts enumerate only subset pairs at the minimum qualifying
sizes: removing a maximum-degree vertex from one side never increases the
pair density and removing a minimum-degree vertex never decreases it, so any
violating pair can be stripped down to the extremal sizes while remaining a
violation.  Sampled verdicts are one-sided: a returned witness is re-verified
against the definition with exact integer edge counts, absence of a witness
is evidence only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from gridramsey.graphs import (
    Graph,
    VertexSet,
    edge_count_between,
    iter_bits,
)

__all__ = [
    "DensityParams",
    "PartitionConfig",
    "Partition",
    "DenseVerdict",
    "RegularVerdict",
    "BoundedVerdict",
    "DensePairNotFound",
    "p_density",
    "is_bounded",
    "is_regular_pair_exact",
    "is_regular_pair_sampled",
    "is_dense_pair",
    "enlargement_check",
    "inheritance_sampler",
    "regular_partition",
    "dense_pair_from_partition",
]

_EXHAUSTIVE_SIDE_LIMIT = 12
_REL_TOL = 1e-9
_U64 = (1 << 64) - 1


def _mix64(*values: int) -> int:
    """Deterministic 64-bit mix of integers (splitmix64 finaliser chain)."""
    h = 0x9E3779B97F4A7C15
    for v in values:
        h = (h ^ (v & _U64)) * 0xBF58476D1CE4E5B9 & _U64
        h = (h ^ (h >> 27)) * 0x94D049BB133111EB & _U64
        h ^= h >> 31
    return h


def _philox(*key: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=np.array([_mix64(*key), 0], dtype=np.uint64))
    )


def _clearly_below(value: float, threshold: float) -> bool:
    return value < threshold - _REL_TOL * max(1.0, abs(threshold))


def _min_qualifying(eps: float, size: int) -> int:
    return max(1, math.ceil(eps * size - 1e-12))


# -- parameter and verdict types ---------------------------------------------


@dataclass(frozen=True)
class DensityParams:
    """Density scale plus the regularity / boundedness knobs."""

    p: float
    eps: float = 0.25
    alpha: float = 0.5
    K: float = 2.0
    eta: float = 0.1

    def __post_init__(self) -> None:
        if not 0 < self.p <= 1:
            raise ValueError("p must lie in (0, 1]")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.K <= 1:
            raise ValueError("K must exceed 1")
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")


@dataclass(frozen=True)
class PartitionConfig:
    t0: int
    Tmax: int = 64
    lam: float = 0.01
    refine_rounds: int = 2
    seed: int = 0
    pair_trials: int = 200

    def __post_init__(self) -> None:
        if not 2 <= self.t0 <= self.Tmax:
            raise ValueError("need 2 <= t0 <= Tmax")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be >= 0")


@dataclass
class Partition:
    classes: list[VertexSet]
    exceptional: VertexSet

    @property
    def t(self) -> int:
        return len(self.classes)

    @property
    def n(self) -> int:
        return self.exceptional.n

    def check_invariants(self) -> None:
        sizes = {c.size for c in self.classes}
        if len(sizes) > 1:
            raise AssertionError("classes are not of equal size")
        union = self.exceptional.bits
        for c in self.classes:
            if union & c.bits:
                raise AssertionError("partition parts overlap")
            union |= c.bits
        if union != (1 << self.n) - 1:
            raise AssertionError("partition does not cover the vertex set")


@dataclass
class DenseVerdict:
    dense: bool
    witness: Optional[tuple[VertexSet, VertexSet]] = None
    trials_used: int = 0
    exhaustive: bool = False
    witness_density: Optional[float] = None


@dataclass
class RegularVerdict:
    regular: bool
    d_full: float
    witness: Optional[tuple[VertexSet, VertexSet]] = None
    trials_used: int = 0
    exhaustive: bool = False
    witness_density: Optional[float] = None


@dataclass
class BoundedVerdict:
    bounded: bool
    witness: Optional[tuple[VertexSet, VertexSet]] = None
    trials_used: int = 0
    exhaustive: bool = False


class DensePairNotFound(RuntimeError):
    """No class pair qualified; carries the full density table."""

    def __init__(self, table: list[dict]):
        super().__init__("no qualifying dense class pair found")
        self.table = table


# -- p-density ----------------------------------------------------------------


def p_density(H: Graph, X: VertexSet, Y: VertexSet, p: float) -> float:
    """e_H(X, Y) normalised by p |X| |Y|."""
    if p <= 0:
        raise ValueError("p must be positive")
    if X.size == 0 or Y.size == 0:
        raise ValueError("p_density needs nonempty sides")
    if not X.isdisjoint(Y):
        raise ValueError("p_density needs disjoint sides")
    return edge_count_between(H, X, Y) / (p * X.size * Y.size)


# -- shared subset-pair scanning machinery -------------------------------------


def _submatrix(H: Graph, x_ids: np.ndarray, y_ids: np.ndarray) -> np.ndarray:
    """Bipartite adjacency of (x_ids, y_ids) as a uint8 0/1 matrix."""
    packed = H.packed()
    rows = np.unpackbits(packed[x_ids], axis=1, bitorder="little")[:, : H.n]
    return rows[:, y_ids]


def _exact_pair_count(H: Graph, xs: Iterable[int], y_bits: int) -> int:
    total = 0
    for x in xs:
        total += (H.row(x) & y_bits).bit_count()
    return total


def _extremal_extrema(
    H: Graph, x_ids: list[int], y_ids: list[int], m1: int, m2: int
) -> tuple[float, tuple, float, tuple]:
    """Min and max pair density over all subset pairs of sizes (m1, m2).

    For a fixed Y-side subset the optimal X-side subset greedily takes the
    m1 smallest (resp. largest) degree-into-Y' vertices, so only one side is
    enumerated.  Returns (min_d, argmin_pair, max_d, argmax_pair) with
    densities as raw counts / (m1*m2); the caller applies 1/p.
    """
    if math.comb(len(y_ids), m2) > math.comb(len(x_ids), m1):
        lo, lo_pair, hi, hi_pair = _extremal_extrema(H, y_ids, x_ids, m2, m1)
        return lo, (lo_pair[1], lo_pair[0]), hi, (hi_pair[1], hi_pair[0])
    nbr = []
    for x in x_ids:
        mask = 0
        row = H.row(x)
        for i, y in enumerate(y_ids):
            if (row >> y) & 1:
                mask |= 1 << i
        nbr.append(mask)
    best_min = None
    best_max = None
    for ys in combinations(range(len(y_ids)), m2):
        y_mask = 0
        for i in ys:
            y_mask |= 1 << i
        cnt = [(nbr[i] & y_mask).bit_count() for i in range(len(x_ids))]
        order = sorted(range(len(x_ids)), key=lambda i: cnt[i])
        lo = sum(cnt[i] for i in order[:m1])
        hi = sum(cnt[i] for i in order[-m1:])
        if best_min is None or lo < best_min[0]:
            best_min = (lo, tuple(order[:m1]), ys)
        if best_max is None or hi > best_max[0]:
            best_max = (hi, tuple(order[-m1:]), ys)
    scale = m1 * m2
    lo_pair = (
        [x_ids[i] for i in best_min[1]],
        [y_ids[i] for i in best_min[2]],
    )
    hi_pair = (
        [x_ids[i] for i in best_max[1]],
        [y_ids[i] for i in best_max[2]],
    )
    return best_min[0] / scale, lo_pair, best_max[0] / scale, hi_pair


def _check_exhaustive_sides(X: VertexSet, Y: VertexSet) -> None:
    if X.size > _EXHAUSTIVE_SIDE_LIMIT or Y.size > _EXHAUSTIVE_SIDE_LIMIT:
        raise ValueError(
            f"exhaustive verdicts support sides up to {_EXHAUSTIVE_SIDE_LIMIT}"
        )


def is_dense_pair(
    H: Graph,
    X: VertexSet,
    Y: VertexSet,
    eps: float,
    alpha: float,
    p: float,
    *,
    mode: str = "sampled",
    trials: int = 2000,
    seed: int = 0,
) -> DenseVerdict:
    """Verdict on: every qualifying sub-pair has p-density >= alpha - eps.

    Exhaustive mode is definitionally exact (sides <= 12).  Sampled mode
    draws subset pairs at the extremal sizes plus a stratified share of
    larger sizes; if the extremal space fits inside the trial budget it is
    enumerated outright, which makes the verdict exact as well.
    """
    if X.size == 0 or Y.size == 0:
        raise ValueError("dense verdict needs nonempty sides")
    threshold = alpha - eps
    m1 = _min_qualifying(eps, X.size)
    m2 = _min_qualifying(eps, Y.size)
    if mode == "exhaustive":
        _check_exhaustive_sides(X, Y)
        lo, lo_pair, _, _ = _extremal_extrema(H, X.ids(), Y.ids(), m1, m2)
        d = lo / p
        if _clearly_below(d, threshold):
            wit = (
                VertexSet.from_ids(H.n, lo_pair[0]),
                VertexSet.from_ids(H.n, lo_pair[1]),
            )
            return DenseVerdict(False, wit, 0, True, d)
        return DenseVerdict(True, None, 0, True)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")

    def violates(d: float) -> bool:
        return _clearly_below(d, threshold)

    witness, used = _scan_pairs(H, X, Y, m1, m2, trials, seed, violates, p)
    if witness is not None:
        wx, wy, d = witness
        return DenseVerdict(False, (wx, wy), used, False, d)
    return DenseVerdict(True, None, used, False)


def is_regular_pair_exact(
    H: Graph, X: VertexSet, Y: VertexSet, eps: float, p: float
) -> RegularVerdict:
    """Exact two-sided regularity verdict for sides up to 12."""
    _check_exhaustive_sides(X, Y)
    d_full = p_density(H, X, Y, p)
    m1 = _min_qualifying(eps, X.size)
    m2 = _min_qualifying(eps, Y.size)
    lo, lo_pair, hi, hi_pair = _extremal_extrema(H, X.ids(), Y.ids(), m1, m2)
    lo_d, hi_d = lo / p, hi / p
    tol = _REL_TOL * max(1.0, abs(d_full), eps)
    if d_full - lo_d > eps + tol:
        wit = (
            VertexSet.from_ids(H.n, lo_pair[0]),
            VertexSet.from_ids(H.n, lo_pair[1]),
        )
        return RegularVerdict(False, d_full, wit, 0, True, lo_d)
    if hi_d - d_full > eps + tol:
        wit = (
            VertexSet.from_ids(H.n, hi_pair[0]),
            VertexSet.from_ids(H.n, hi_pair[1]),
        )
        return RegularVerdict(False, d_full, wit, 0, True, hi_d)
    return RegularVerdict(True, d_full, None, 0, True)


def is_regular_pair_sampled(
    H: Graph,
    X: VertexSet,
    Y: VertexSet,
    eps: float,
    p: float,
    *,
    trials: int = 200,
    seed: int = 0,
) -> RegularVerdict:
    """One-sided sampled regularity check; witnesses re-verified exactly."""
    d_full = p_density(H, X, Y, p)
    m1 = _min_qualifying(eps, X.size)
    m2 = _min_qualifying(eps, Y.size)
    tol = _REL_TOL * max(1.0, abs(d_full), eps)

    def violates(d: float) -> bool:
        return abs(d - d_full) > eps + tol

    witness, used = _scan_pairs(H, X, Y, m1, m2, trials, seed, violates, p)
    if witness is not None:
        wx, wy, d = witness
        return RegularVerdict(False, d_full, (wx, wy), used, False, d)
    return RegularVerdict(True, d_full, None, used, False)


def _scan_pairs(
    H: Graph,
    X: VertexSet,
    Y: VertexSet,
    m1: int,
    m2: int,
    trials: int,
    seed: int,
    violates: Callable[[float], bool],
    p: float,
) -> tuple[Optional[tuple[VertexSet, VertexSet, float]], int]:
    """Common subset-pair scanner for the sampled verdicts.

    Enumerates the extremal-size space outright when it fits in the budget,
    otherwise spends 75% of trials there and 25% on larger stratified sizes.
    A flagged pair is re-verified with exact integer counts before being
    returned as a witness.
    """
    x_ids = X.ids_array()
    y_ids = Y.ids_array()
    nx, ny = len(x_ids), len(y_ids)
    space = math.comb(nx, m1) * math.comb(ny, m2)
    used = 0

    def exact_density(xs: Sequence[int], ys: Sequence[int]) -> float:
        y_bits = 0
        for y in ys:
            y_bits |= 1 << int(y)
        e = _exact_pair_count(H, (int(x) for x in xs), y_bits)
        return e / (p * len(xs) * len(ys))

    if space <= trials:
        for xs in combinations(range(nx), m1):
            for ys in combinations(range(ny), m2):
                used += 1
                sx = x_ids[list(xs)]
                sy = y_ids[list(ys)]
                d = exact_density(sx, sy)
                if violates(d):
                    return (
                        (
                            VertexSet.from_ids(H.n, sx.tolist()),
                            VertexSet.from_ids(H.n, sy.tolist()),
                            d,
                        ),
                        used,
                    )
        return None, used

    M = _submatrix(H, x_ids, y_ids)
    gen = _philox(seed)
    extremal = (trials * 3) // 4
    plan: list[tuple[int, int]] = [(m1, m2)] * extremal
    for _ in range(trials - extremal):
        k1 = int(gen.integers(m1, nx + 1))
        k2 = int(gen.integers(m2, ny + 1))
        plan.append((k1, k2))
    for k1, k2 in plan:
        used += 1
        rx = gen.permutation(nx)[:k1]
        ry = gen.permutation(ny)[:k2]
        e = int(M[np.ix_(rx, ry)].sum())
        d = e / (p * k1 * k2)
        if violates(d):
            xs = x_ids[rx]
            ys = y_ids[ry]
            d_exact = exact_density(xs, ys)
            if violates(d_exact):
                return (
                    (
                        VertexSet.from_ids(H.n, xs.tolist()),
                        VertexSet.from_ids(H.n, ys.tolist()),
                        d_exact,
                    ),
                    used,
                )
    return None, used


# -- boundedness ---------------------------------------------------------------


def is_bounded(
    H: Graph,
    params: DensityParams,
    *,
    mode: str = "sampled",
    trials: int = 2000,
    seed: int = 0,
) -> BoundedVerdict:
    """Check that no large disjoint pair carries more than K times its share.

    Exhaustive mode enumerates every disjoint (X, Y) with both sizes at least
    eta*n (only for n <= 16; the walk is 3^n).  Sampled mode hunts witnesses
    at the minimum qualifying size plus stratified larger sizes; a witness is
    always genuine, absence of one is not proof.
    """
    n = H.n
    k_min = max(1, math.ceil(params.eta * n - 1e-12))
    Kp = params.K * params.p

    def exceeds(e: int, sx: int, sy: int) -> bool:
        return e > Kp * sx * sy + _REL_TOL * max(1.0, Kp * sx * sy)

    if mode == "exhaustive":
        if n > 16:
            raise ValueError("exhaustive boundedness supports n <= 16")
        full = (1 << n) - 1
        checked = 0
        for xm in range(1, full + 1):
            if xm.bit_count() < k_min:
                continue
            comp = full ^ xm
            ym = comp
            while ym:
                if ym.bit_count() >= k_min:
                    checked += 1
                    sx, sy = xm.bit_count(), ym.bit_count()
                    e = _exact_pair_count(H, iter_bits(xm), ym)
                    if exceeds(e, sx, sy):
                        return BoundedVerdict(
                            False,
                            (VertexSet(n, xm), VertexSet(n, ym)),
                            checked,
                            True,
                        )
                ym = (ym - 1) & comp
        return BoundedVerdict(True, None, checked, True)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    if 2 * k_min > n:
        raise ValueError("eta too large: no disjoint qualifying pair exists")
    gen = _philox(seed, 0xB0)
    extremal = (trials * 3) // 4
    for t in range(trials):
        if t < extremal:
            k1 = k2 = k_min
        else:
            hi = n // 2
            k1 = int(gen.integers(k_min, hi + 1))
            k2 = int(gen.integers(k_min, min(hi, n - k1) + 1))
        perm = gen.permutation(n)
        xs = perm[:k1]
        ys = perm[k1 : k1 + k2]
        y_bits = 0
        for y in ys:
            y_bits |= 1 << int(y)
        e = _exact_pair_count(H, (int(x) for x in xs), y_bits)
        if exceeds(e, k1, k2):
            return BoundedVerdict(
                False,
                (
                    VertexSet.from_ids(n, xs.tolist()),
                    VertexSet.from_ids(n, ys.tolist()),
                ),
                t + 1,
                False,
            )
    return BoundedVerdict(True, None, trials, False)


# -- hereditary checks ---------------------------------------------------------


def enlargement_check(
    H: Graph,
    U_prime: VertexSet,
    W_prime: VertexSet,
    U: VertexSet,
    W: VertexSet,
    eps: float,
    alpha: float,
    p: float,
) -> bool:
    """Test-harness op: does denseness of the core pair force 2*eps-denseness
    of the slightly enlarged pair on this instance?

    Preconditions: U >= U', W >= W', growth bounded by a factor 1 + eps^3/10,
    sides small enough for exhaustive verdicts.
    """
    if (U_prime.bits & ~U.bits) or (W_prime.bits & ~W.bits):
        raise ValueError("enlarged sets must contain the core sets")
    cap = 1 + eps**3 / 10
    if U.size > cap * U_prime.size + 1e-12 or W.size > cap * W_prime.size + 1e-12:
        raise ValueError("size-ratio precondition violated")
    core = is_dense_pair(H, U_prime, W_prime, eps, alpha, p, mode="exhaustive")
    if not core.dense:
        return True
    grown = is_dense_pair(H, U, W, 2 * eps, alpha, p, mode="exhaustive")
    return grown.dense


def inheritance_sampler(
    H: Graph,
    X: VertexSet,
    Y: VertexSet,
    eps_prime: float,
    alpha: float,
    p: float,
    w1: int,
    w2: int,
    trials: int,
    seed: int,
    *,
    inner_trials: int = 300,
) -> float:
    """Fraction of uniformly drawn (w1, w2)-sub-pairs failing a sampled dense
    verdict; an empirical stand-in for the exponentially-small failure bound.
    """
    if not 1 <= w1 <= X.size or not 1 <= w2 <= Y.size:
        raise ValueError("subset sizes out of range")
    x_ids = X.ids_array()
    y_ids = Y.ids_array()
    gen = _philox(seed, 0x1E)
    failures = 0
    for t in range(trials):
        xs = x_ids[gen.permutation(len(x_ids))[:w1]]
        ys = y_ids[gen.permutation(len(y_ids))[:w2]]
        sub_x = VertexSet.from_ids(H.n, xs.tolist())
        sub_y = VertexSet.from_ids(H.n, ys.tolist())
        verdict = is_dense_pair(
            H,
            sub_x,
            sub_y,
            eps_prime,
            alpha,
            p,
            mode="sampled",
            trials=inner_trials,
            seed=_mix64(seed, t),
        )
        if not verdict.dense:
            failures += 1
    return failures / trials if trials else 0.0


# -- partitions ----------------------------------------------------------------


def _equitable_from_order(n: int, order: Sequence[int], t: int) -> Partition:
    m = n // t
    classes = []
    for i in range(t):
        ids = order[i * m : (i + 1) * m]
        classes.append(VertexSet.from_ids(n, [int(v) for v in ids]))
    leftover = order[t * m :]
    exceptional = VertexSet.from_ids(n, [int(v) for v in leftover])
    return Partition(classes, exceptional)


def _pair_quality(
    H: Graph,
    partition: Partition,
    p: float,
    eps: float,
    trials: int,
    seed: int,
) -> list[dict]:
    records = []
    cls = partition.classes
    for i in range(len(cls)):
        for j in range(i + 1, len(cls)):
            d = p_density(H, cls[i], cls[j], p)
            verdict = is_regular_pair_sampled(
                H, cls[i], cls[j], eps, p, trials=trials, seed=_mix64(seed, i, j)
            )
            rec = {
                "i": i,
                "j": j,
                "p_density": d,
                "verdict": "regular" if verdict.regular else "irregular",
            }
            if verdict.witness is not None:
                rec["witness"] = [
                    verdict.witness[0].ids(),
                    verdict.witness[1].ids(),
                ]
            records.append(rec)
    return records


def regular_partition(
    H: Graph,
    p: float,
    eps: float,
    config: PartitionConfig,
) -> tuple[Partition, dict]:
    """Witness-driven refinement heuristic for an equitable partition.

    Starts from a random equitable partition with t0 classes, repeatedly
    splits classes along sampled irregularity witnesses, and stops once the
    sampled irregular fraction drops to eps, the class cap is hit, or the
    round budget runs out.  The quality report carries the per-pair verdicts;
    the partition is not a certificate of regularity.
    """
    n = H.n
    if n < config.t0:
        raise ValueError("graph too small for the requested class count")
    gen = _philox(config.seed, 0x9A)
    order = [int(v) for v in gen.permutation(n)]
    t = config.t0
    partition = _equitable_from_order(n, order, t)
    rounds_used = 0
    records = _pair_quality(H, partition, p, eps, config.pair_trials, config.seed)
    for rnd in range(config.refine_rounds):
        irregular = [r for r in records if r["verdict"] == "irregular"]
        frac = len(irregular) / len(records) if records else 0.0
        if frac <= eps or 2 * t > config.Tmax:
            break
        rounds_used = rnd + 1
        # Split every class along the witness sets that touch it.
        touching: dict[int, list[int]] = {i: [] for i in range(t)}
        for r in irregular:
            if "witness" not in r:
                continue
            wx, wy = r["witness"]
            bx = _ids_bits(wx)
            by = _ids_bits(wy)
            touching[r["i"]].append(bx)
            touching[r["j"]].append(by)
        atoms: list[list[int]] = []
        for i, cls in enumerate(partition.classes):
            masks = touching[i][:8]
            groups: dict[tuple, list[int]] = {}
            for v in cls.ids():
                sig = tuple(bool(m >> v & 1) for m in masks)
                groups.setdefault(sig, []).append(v)
            for sig in sorted(groups):
                atoms.append(groups[sig])
        atoms.append(partition.exceptional.ids())
        t = min(config.Tmax, 2 * t)
        m_new = n // t
        chunks: list[list[int]] = []
        pool: list[int] = []
        for atom in atoms:
            full_part = len(atom) // m_new
            for k in range(full_part):
                chunks.append(atom[k * m_new : (k + 1) * m_new])
            pool.extend(atom[full_part * m_new :])
        for k in range(len(pool) // m_new):
            chunks.append(pool[k * m_new : (k + 1) * m_new])
        leftover = pool[(len(pool) // m_new) * m_new :]
        if len(chunks) > config.Tmax:
            for extra in chunks[config.Tmax :]:
                leftover.extend(extra)
            chunks = chunks[: config.Tmax]
        t = len(chunks)
        partition = Partition(
            [VertexSet.from_ids(n, c) for c in chunks],
            VertexSet.from_ids(n, leftover),
        )
        records = _pair_quality(
            H, partition, p, eps, config.pair_trials, _mix64(config.seed, rnd)
        )
    irregular = sum(1 for r in records if r["verdict"] == "irregular")
    frac = irregular / len(records) if records else 0.0
    report = {
        "t": partition.t,
        "class_size": partition.classes[0].size if partition.classes else 0,
        "exceptional_size": partition.exceptional.size,
        "irregular_fraction": frac,
        "rounds_used": rounds_used,
        "regular": frac <= eps
        and partition.exceptional.size <= eps * n + _REL_TOL,
        "pairs": records,
    }
    return partition, report


def _ids_bits(ids: Iterable[int]) -> int:
    bits = 0
    for v in ids:
        bits |= 1 << v
    return bits


def dense_pair_from_partition(
    H: Graph,
    partition: Partition,
    alpha_prime: float,
    p: float,
    *,
    eps: float = 0.25,
    trials: int = 200,
    seed: int = 0,
) -> tuple[int, int, VertexSet, VertexSet, dict]:
    """Pick the densest class pair clearing the alpha'/4 density floor.

    Qualifying pairs must also pass a sampled regularity verdict.  Ties break
    towards the lexicographically smallest (i, j).  Raises DensePairNotFound
    with the full density table when nothing qualifies.
    """
    cls = partition.classes
    table = []
    best = None
    for i in range(len(cls)):
        for j in range(i + 1, len(cls)):
            e = edge_count_between(H, cls[i], cls[j])
            floor = (alpha_prime / 4) * p * cls[i].size * cls[j].size
            d = e / (p * cls[i].size * cls[j].size)
            qualifies = e > floor + _REL_TOL * max(1.0, floor)
            rec = {"i": i, "j": j, "p_density": d, "passes_floor": qualifies}
            if qualifies:
                verdict = is_regular_pair_sampled(
                    H, cls[i], cls[j], eps, p, trials=trials, seed=_mix64(seed, i, j)
                )
                rec["regular"] = verdict.regular
                if verdict.regular and (
                    best is None or d > best[0] + _REL_TOL * max(1.0, best[0])
                ):
                    best = (d, i, j)
            table.append(rec)
    if best is None:
        raise DensePairNotFound(table)
    _, i, j = best
    report = {"chosen": {"i": i, "j": j}, "table": table}
    return i, j, cls[i], cls[j], report
