"""Immutable bitset-backed graphs, seeded random graphs, grids, and counting kernels.

Vertices are 0-based ids in ``range(n)``.  Adjacency is stored as one Python
integer per vertex, bit ``v`` of row ``u`` set iff ``uv`` is an edge.  All
set-intersection counting goes through ``int.bit_count`` which is the dominant
kernel for every density computation downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Graph",
    "VertexSet",
    "GridSpec",
    "RandomModel",
    "build_graph",
    "gnp",
    "grid_graph",
    "complete_graph",
    "cycle_graph",
    "neighbours_in",
    "edge_count_between",
    "edge_count_within",
    "codegree",
    "count_c4_constrained",
    "iter_bits",
    "read_edge_list",
    "write_edge_list",
]

# Dense bool-matrix construction is used up to this order; beyond it the slow
# per-edge path keeps memory bounded.
_MATRIX_BUILD_LIMIT = 25_000

_U64 = (1 << 64) - 1


def iter_bits(x: int) -> Iterator[int]:
    """Yield the positions of set bits of ``x`` in ascending order."""
    while x:
        lsb = x & -x
        yield lsb.bit_length() - 1
        x ^= lsb


def _bits_to_ids(bits: int, n: int) -> np.ndarray:
    """Set-bit positions of ``bits`` as an int64 array (ascending)."""
    nbytes = (n + 7) // 8
    raw = np.frombuffer(bits.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little")[:n])


def _ids_to_bits(ids: Iterable[int]) -> int:
    bits = 0
    for i in ids:
        bits |= 1 << i
    return bits


@dataclass(frozen=True)
class VertexSet:
    """A subset of ``range(n)`` as a dense bit-vector with cached cardinality."""

    n: int
    bits: int
    size: int = field(init=False)

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError("vertex set has bits outside range(n)")
        object.__setattr__(self, "size", self.bits.bit_count())

    @classmethod
    def from_ids(cls, n: int, ids: Iterable[int]) -> "VertexSet":
        ids = list(ids)
        for i in ids:
            if not 0 <= i < n:
                raise ValueError(f"vertex id {i} out of range(0, {n})")
        return cls(n, _ids_to_bits(ids))

    @classmethod
    def empty(cls, n: int) -> "VertexSet":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        return cls(n, (1 << n) - 1)

    def ids(self) -> list[int]:
        return list(iter_bits(self.bits))

    def ids_array(self) -> np.ndarray:
        return _bits_to_ids(self.bits, self.n)

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.n and bool((self.bits >> v) & 1)

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def _check(self, other: "VertexSet") -> None:
        if self.n != other.n:
            raise ValueError("vertex sets live over different ground sets")

    def __and__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.n, self.bits & other.bits)

    def __or__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.n, self.bits | other.bits)

    def __sub__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.n, self.bits & ~other.bits)

    def isdisjoint(self, other: "VertexSet") -> bool:
        self._check(other)
        return (self.bits & other.bits) == 0


@dataclass(frozen=True)
class GridSpec:
    """An ``s`` by ``t`` grid: ``s*t`` vertices, ``s*(t-1) + t*(s-1)`` edges."""

    s: int
    t: int

    def __post_init__(self) -> None:
        if self.s < 1 or self.t < 1:
            raise ValueError("grid dimensions must be >= 1")

    @property
    def vertex_count(self) -> int:
        return self.s * self.t

    @property
    def edge_count(self) -> int:
        return self.s * (self.t - 1) + self.t * (self.s - 1)


@dataclass(frozen=True)
class RandomModel:
    """Parameters of a seeded binomial random graph draw.

    ``C`` is the probability-scaling constant and ``delta`` the concentration
    parameter carried along for the property verifiers; neither affects the
    sampled edge set.
    """

    n: int
    p: float
    seed: int
    C: float = 1.0
    delta: float = 0.2

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.p == 0.0 and self.n > 1:
            # p = 0 is allowed (empty graph); the lower regime bound is advisory.
            pass

    def paper_regime_ok(self) -> bool:
        """Whether p clears C * sqrt(log n / n), the regime the theory assumes."""
        if self.n < 2:
            return False
        return self.p >= self.C * float(np.sqrt(np.log(self.n) / self.n))


class Graph:
    """Immutable simple graph with per-vertex bit-vector adjacency."""

    __slots__ = ("n", "edge_count", "_rows", "_packed")

    def __init__(self, n: int, rows: Sequence[int], edge_count: int):
        self.n = n
        self._rows = tuple(rows)
        self.edge_count = edge_count
        self._packed = None

    # -- construction ------------------------------------------------------

    @classmethod
    def _from_rows(cls, n: int, rows: Sequence[int]) -> "Graph":
        total = 0
        for r in rows:
            total += r.bit_count()
        if total % 2:
            raise ValueError("adjacency rows are not symmetric")
        return cls(n, rows, total // 2)

    # -- queries -----------------------------------------------------------

    def row(self, v: int) -> int:
        return self._rows[v]

    def rows(self) -> tuple[int, ...]:
        return self._rows

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self._rows[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self._rows[v].bit_count()

    def neighbourhood(self, v: int) -> VertexSet:
        return VertexSet(self.n, self._rows[v])

    def vertices(self) -> range:
        return range(self.n)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges as (u, v) with u < v, lexicographically sorted."""
        for u in range(self.n):
            high = self._rows[u] >> (u + 1)
            for off in iter_bits(high):
                yield (u, u + 1 + off)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """All edges (u < v) as two int64 arrays in lexicographic order."""
        us = []
        vs = []
        for u in range(self.n):
            high = self._rows[u] >> (u + 1)
            if high:
                ids = _bits_to_ids(high, self.n - u - 1) + (u + 1)
                us.append(np.full(len(ids), u, dtype=np.int64))
                vs.append(ids)
        if not us:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        return np.concatenate(us), np.concatenate(vs)

    def packed(self) -> np.ndarray:
        """Adjacency packed as a (n, ceil(n/8)) uint8 matrix, little bit order.

        Cached; shared read-only by the vectorised kernels.
        """
        if self._packed is None:
            nbytes = (self.n + 7) // 8
            buf = bytearray(self.n * nbytes)
            for v in range(self.n):
                buf[v * nbytes : (v + 1) * nbytes] = self._rows[v].to_bytes(
                    nbytes, "little"
                )
            arr = np.frombuffer(bytes(buf), dtype=np.uint8).reshape(self.n, nbytes)
            arr.setflags(write=False)
            self._packed = arr
        return self._packed

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self._rows == other._rows
        )

    def __hash__(self) -> int:
        return hash((self.n, self._rows))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a simple graph from an edge list.

    Duplicate edges (in either orientation) collapse; self-loops and ids
    outside ``range(n)`` are rejected with the offending pair.
    """
    rows = [0] * n
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) has an endpoint outside range(0, {n})")
        if u == v:
            raise ValueError(f"self-loop ({u}, {v}) is not allowed")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph._from_rows(n, rows)


def _graph_from_bool_matrix(mat: np.ndarray) -> Graph:
    """Internal: symmetric bool matrix (no diagonal) -> Graph."""
    n = mat.shape[0]
    packed = np.packbits(mat, axis=1, bitorder="little")
    nbytes = packed.shape[1]
    rows = [
        int.from_bytes(packed[v].tobytes(), "little") for v in range(n)
    ]
    total = sum(r.bit_count() for r in rows)
    return Graph(n, rows, total // 2)


def graph_from_edge_arrays(n: int, us: np.ndarray, vs: np.ndarray) -> Graph:
    """Build a graph from parallel edge-endpoint arrays (validated upstream)."""
    if n <= _MATRIX_BUILD_LIMIT:
        mat = np.zeros((n, n), dtype=bool)
        mat[us, vs] = True
        mat[vs, us] = True
        np.fill_diagonal(mat, False)
        return _graph_from_bool_matrix(mat)
    rows = [0] * n
    for u, v in zip(us.tolist(), vs.tolist()):
        if u != v:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
    return Graph._from_rows(n, rows)


def gnp(model: RandomModel) -> Graph:
    """Sample a binomial random graph; identical model gives identical bits.

    Each vertex row of the upper triangle is drawn from its own counter-based
    Philox stream keyed by (seed, row), so the result does not depend on how
    work is scheduled across threads.
    """
    n = model.n
    p = model.p
    if n <= _MATRIX_BUILD_LIMIT:
        mat = np.zeros((n, n), dtype=bool)
        for u in range(n - 1):
            k = n - u - 1
            gen = np.random.Generator(
                np.random.Philox(key=np.array([model.seed & _U64, u], dtype=np.uint64))
            )
            mat[u, u + 1 :] = gen.random(k) < p
        mat |= mat.T
        return _graph_from_bool_matrix(mat)
    rows = [0] * n
    for u in range(n - 1):
        k = n - u - 1
        gen = np.random.Generator(
            np.random.Philox(key=np.array([model.seed & _U64, u], dtype=np.uint64))
        )
        draw = gen.random(k) < p
        hi = int.from_bytes(
            np.packbits(draw, bitorder="little").tobytes(), "little"
        )
        rows[u] |= hi << (u + 1)
        for off in iter_bits(hi):
            rows[u + 1 + off] |= 1 << u
    return Graph._from_rows(n, rows)


def grid_graph(spec: GridSpec) -> Graph:
    """The s-by-t grid, vertices indexed row-major: (r, c) -> r*t + c."""
    s, t = spec.s, spec.t
    edges = []
    for r in range(s):
        for c in range(t):
            v = r * t + c
            if c + 1 < t:
                edges.append((v, v + 1))
            if r + 1 < s:
                edges.append((v, v + t))
    return build_graph(s * t, edges)


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    rows = [full ^ (1 << v) for v in range(n)]
    return Graph(n, rows, n * (n - 1) // 2)


def cycle_graph(k: int) -> Graph:
    if k < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return build_graph(k, [(i, (i + 1) % k) for i in range(k)])


# -- counting kernels -------------------------------------------------------


def neighbours_in(G: Graph, v: int, X: VertexSet) -> VertexSet:
    """N_G(v) intersected with X."""
    if not 0 <= v < G.n:
        raise ValueError(f"vertex {v} out of range(0, {G.n})")
    return VertexSet(G.n, G.row(v) & X.bits)


def edge_count_between(G: Graph, X: VertexSet, Y: VertexSet) -> int:
    """Number of pairs (x, y) in X x Y with xy an edge and x != y.

    For disjoint X, Y this is exactly the bipartite edge count; for
    overlapping sets each edge inside the overlap is counted in both
    orientations (ordered-pair convention).
    """
    yb = Y.bits
    total = 0
    for x in iter_bits(X.bits):
        total += (G.row(x) & yb).bit_count()
    return total


def edge_count_within(G: Graph, A: VertexSet) -> int:
    """Number of edges of G with both endpoints in A."""
    ab = A.bits
    total = 0
    for a in iter_bits(ab):
        total += (G.row(a) & ab).bit_count()
    return total // 2


def codegree(G: Graph, u: int, w: int) -> int:
    """Size of the joint neighbourhood of two distinct vertices."""
    if u == w:
        raise ValueError("codegree requires two distinct vertices")
    return (G.row(u) & G.row(w)).bit_count()


def count_c4_constrained(
    G: Graph, X: VertexSet, Y: VertexSet, A: VertexSet, B: VertexSet
) -> int:
    """Count labelled tuples (x, y, a, b) in X x Y x A x B forming a 4-cycle.

    Required edges: xy, ya, ab, bx.  Membership is honoured literally, so
    overlapping sets can contribute degenerate tuples; each tuple counts once.
    """
    yb, ab_, bb = Y.bits, A.bits, B.bits
    total = 0
    for x in iter_bits(X.bits):
        rx = G.row(x)
        rx_b = rx & bb
        if not rx_b:
            continue
        for y in iter_bits(rx & yb):
            for a in iter_bits(G.row(y) & ab_):
                total += (G.row(a) & rx_b).bit_count()
    return total


# -- edge-list text format ---------------------------------------------------
#
# First line "n m", then m lines "u v" (0-based).  The writer emits edges
# sorted lexicographically so the bytes are stable.


def read_edge_list(text: str) -> Graph:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty edge-list input")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("line 1: expected header 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ValueError(f"line 1: non-integer header: {lines[0]!r}") from exc
    if n < 0 or m < 0:
        raise ValueError("line 1: negative n or m")
    edges = []
    seen = 0
    for idx, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {idx}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ValueError(f"line {idx}: non-integer endpoint: {line!r}") from exc
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"line {idx}: endpoint outside range(0, {n})")
        if u == v:
            raise ValueError(f"line {idx}: self-loop ({u}, {v})")
        edges.append((u, v))
        seen += 1
    if seen != m:
        raise ValueError(f"header declares {m} edges but {seen} data lines found")
    return build_graph(n, edges)


def write_edge_list(G: Graph) -> str:
    out = [f"{G.n} {G.edge_count}"]
    for u, v in G.edges():
        out.append(f"{u} {v}")
    return "\n".join(out) + "\n"
