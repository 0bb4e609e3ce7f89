"""Bitset graphs, neighbourhood and domination primitives, corners, graph6.

A :class:`Graph` stores one Python ``int`` per vertex whose set bits are the
open neighbourhood of that vertex. Loops are never stored: the "pass" move of
the pursuit game is modelled by working with closed neighbourhoods.

Vertex sets at the API boundary are ``frozenset[int]``; internally everything
is a bit mask.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Iterator

from .errors import BudgetExceeded, Graph6Error

VertexSet = frozenset

DEFAULT_WORK_LIMIT = 20_000_000
GRAPH6_MAX_N = 62
GRAPH6_HEADER = b">>graph6<<"


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def members(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def lowest(mask: int) -> int | None:
    if not mask:
        return None
    return (mask & -mask).bit_length() - 1


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``adj[v]`` is the open neighbourhood of ``v`` as a bit mask.
    """

    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"graph needs at least one vertex, got n={self.n}")
        if len(self.adj) != self.n:
            raise ValueError("adjacency must have exactly n rows")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row & ~full:
                raise ValueError(f"row {v} references a vertex >= n")
            if row >> v & 1:
                raise ValueError(f"self-loop stored at vertex {v}")
            for u in members(row):
                if not self.adj[u] >> v & 1:
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop ({u}, {v}) not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)))

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls.from_edges(n, ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        if n < 3:
            raise ValueError("a cycle needs at least 3 vertices")
        return cls.from_edges(n, ((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def star(cls, leaves: int) -> Graph:
        return cls.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))

    @classmethod
    def petersen(cls) -> Graph:
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return cls.from_edges(10, outer + spokes + inner)

    # -- queries ------------------------------------------------------------

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range for n={self.n}")

    def closed(self, v: int) -> int:
        return self.adj[v] | (1 << v)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in members(self.adj[u] >> (u + 1) << (u + 1)):
                yield u, v

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def delete_vertex(self, u: int) -> Graph:
        """Induced subgraph on ``V - {u}``; vertices above ``u`` shift down."""
        self.check_vertex(u)
        if self.n == 1:
            raise ValueError("cannot delete the only vertex")
        low = (1 << u) - 1
        rows = []
        for v in range(self.n):
            if v == u:
                continue
            row = self.adj[v]
            rows.append((row & low) | ((row >> (u + 1)) << u))
        return Graph(self.n - 1, tuple(rows))

    def __str__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count()})"


def _check_set(g: Graph, s: Iterable[int]) -> int:
    m = 0
    for v in s:
        g.check_vertex(v)
        m |= 1 << v
    return m


def neighborhoods(g: Graph, v: int) -> tuple[VertexSet, VertexSet, VertexSet]:
    """Return ``(N(v), N[v], V - N[v])`` as vertex sets."""
    g.check_vertex(v)
    closed = g.closed(v)
    return (
        frozenset(members(g.adj[v])),
        frozenset(members(closed)),
        frozenset(members(g.full_mask & ~closed)),
    )


def closed_union(g: Graph, mask: int) -> int:
    """Union of closed neighbourhoods of the vertices in ``mask``."""
    out = 0
    for u in members(mask):
        out |= g.closed(u)
    return out


def non_neighborhood_mask(g: Graph, mask: int) -> int:
    return g.full_mask & ~closed_union(g, mask)


def common_non_neighborhood(g: Graph, s: Iterable[int]) -> VertexSet:
    """Vertices outside every closed neighbourhood of ``s``."""
    m = _check_set(g, s)
    if not m:
        raise ValueError("common non-neighbourhood of an empty set is undefined")
    return frozenset(members(non_neighborhood_mask(g, m)))


def is_dominating_set(g: Graph, s: Iterable[int]) -> bool:
    m = _check_set(g, s)
    return closed_union(g, m) == g.full_mask


def delta_k(g: Graph, k: int, work_limit: int = DEFAULT_WORK_LIMIT) -> tuple[int, VertexSet]:
    """Exhaustive minimum of ``|N^c(S)|`` over all ``k``-subsets ``S``.

    Returns the minimum and the lexicographically first set attaining it.
    A minimum of zero means a dominating set of size ``k`` exists.

    Raises:
        ValueError: if ``k`` is not in ``1..n``.
        BudgetExceeded: if ``C(n, k)`` exceeds ``work_limit``.
    """
    if not 1 <= k <= g.n:
        raise ValueError(f"k={k} out of range 1..{g.n}")
    work = comb(g.n, k)
    if work > work_limit:
        raise BudgetExceeded(f"delta_k needs {work} subsets, limit is {work_limit}")
    closed = [g.closed(v) for v in range(g.n)]
    full = g.full_mask
    best, witness = g.n + 1, ()
    for s in combinations(range(g.n), k):
        cover = 0
        for u in s:
            cover |= closed[u]
        missed = (full & ~cover).bit_count()
        if missed < best:
            best, witness = missed, s
            if best == 0:
                break
    return best, frozenset(witness)


def domination_number(g: Graph, work_limit: int = DEFAULT_WORK_LIMIT) -> int:
    for k in range(1, g.n + 1):
        if delta_k(g, k, work_limit)[0] == 0:
            return k
    raise AssertionError("V always dominates itself")


def corners(g: Graph) -> list[tuple[int, int]]:
    """All corners ``u`` with their lowest-index witness ``w`` (``N[u] ⊆ N[w]``)."""
    return _corners_within(g, g.full_mask)


def _corners_within(g: Graph, alive: int) -> list[tuple[int, int]]:
    closed = {v: g.closed(v) & alive for v in members(alive)}
    out = []
    for u, nu in closed.items():
        # a witness must lie in N[u]
        for w in members(nu):
            if w != u and nu & ~closed[w] == 0:
                out.append((u, w))
                break
    return out


@dataclass(frozen=True)
class DismantlingResult:
    order: tuple[tuple[int, int], ...]
    success: bool


def dismantling_order(g: Graph) -> DismantlingResult:
    """Greedily delete the lowest-indexed corner until one vertex is left.

    Deleting any corner preserves dismantlability, so the greedy choice fails
    only on graphs that are not dismantlable; in that case ``order`` is the
    maximal prefix that was found.
    """
    alive = g.full_mask
    order = []
    while alive & (alive - 1):
        found = _first_corner(g, alive)
        if found is None:
            return DismantlingResult(tuple(order), False)
        order.append(found)
        alive &= ~(1 << found[0])
    return DismantlingResult(tuple(order), True)


def _first_corner(g: Graph, alive: int) -> tuple[int, int] | None:
    for u in members(alive):
        nu = g.closed(u) & alive
        for w in members(nu):
            if w != u and nu & ~(g.closed(w) & alive) == 0:
                return u, w
    return None


def is_dismantlable(g: Graph) -> bool:
    return dismantling_order(g).success


def has_universal_vertex(g: Graph) -> int | None:
    full = g.full_mask
    for v in range(g.n):
        if g.closed(v) == full:
            return v
    return None


# -- graph6 -----------------------------------------------------------------


def graph6_encode(g: Graph) -> bytes:
    """Encode ``g`` as header-free graph6 (``n <= 62`` only)."""
    n = g.n
    if n > GRAPH6_MAX_N:
        raise Graph6Error(f"graph6 encoding supports n <= {GRAPH6_MAX_N}, got {n}")
    bits = [g.adj[i] >> j & 1 for j in range(1, n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    out = bytearray([n + 63])
    for pos in range(0, len(bits), 6):
        value = 0
        for b in bits[pos:pos + 6]:
            value = value << 1 | b
        out.append(value + 63)
    return bytes(out)


def graph6_decode(text: bytes | str) -> Graph:
    """Decode one graph6 record; a leading ``>>graph6<<`` header is stripped."""
    if isinstance(text, str):
        text = text.encode("ascii", errors="replace")
    data = text.strip()
    if data.startswith(GRAPH6_HEADER):
        data = data[len(GRAPH6_HEADER):]
    if not data:
        raise Graph6Error("empty graph6 string")
    for byte in data:
        if not 63 <= byte <= 126:
            raise Graph6Error(f"byte {byte} outside the graph6 range 63..126")
    if data[0] == 126:
        raise Graph6Error(f"graph6 sizes above {GRAPH6_MAX_N} are not supported")
    n = data[0] - 63
    if n < 1:
        raise Graph6Error("graph6 graph must have at least one vertex")
    nbits = n * (n - 1) // 2
    need = -(-nbits // 6)
    payload = data[1:]
    if len(payload) < need:
        raise Graph6Error(f"truncated graph6 payload: need {need} bytes, got {len(payload)}")
    if len(payload) > need:
        raise Graph6Error(f"trailing bytes after graph6 payload ({len(payload) - need} extra)")
    rows = [0] * n
    pos = 0
    for j in range(1, n):
        for i in range(j):
            byte = payload[pos // 6] - 63
            if byte >> (5 - pos % 6) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            pos += 1
    return Graph(n, tuple(rows))
