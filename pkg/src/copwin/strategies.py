"""Two explicit robber strategies and the graph conditions that make them win.

Greedy escape
    Fix a ``k``-set ``S`` and a vertex ``v`` that ``S`` does not dominate.
    Cops on all of ``S``: the robber sits on ``v``. Otherwise, with ``T`` the
    occupied part of ``S``, she moves to a vertex of ``N(v)`` (no cop on
    ``v``) or of ``N^c(v) - S`` (a cop on ``v``) that avoids ``N[T]`` and is
    adjacent to no cop.

Evasion
    A vertex ``b`` is dangerous if some ``k``-set ``A`` not containing it
    leaves at most ``2q`` of ``b``'s neighbours undominated. With fewer than
    ``q`` dangerous vertices and ``delta_k >= q`` the robber can live forever
    on safe vertices: not dangerous and outside every cop's closed
    neighbourhood.

Certificates are sufficient conditions only: a false verdict claims nothing.
"""

from __future__ import annotations

import enum
import random
from collections import deque
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, product
from math import comb
from typing import Iterable, Sequence

from .errors import BudgetExceeded, NoSafeMove
from .game import RobberController
from .graph import (
    DEFAULT_WORK_LIMIT,
    Graph,
    VertexSet,
    closed_union,
    delta_k,
    lowest,
    mask_of,
    members,
    non_neighborhood_mask,
)

GREEDY_WORK_LIMIT = 200_000_000


class Mode(enum.Enum):
    NEIGHBOR = "neighbor"
    NON_NEIGHBOR = "non-neighbor"


class CertificateKind(enum.Enum):
    GREEDY_ESCAPE = "greedy-escape"
    EVASION = "evasion"


@dataclass(frozen=True)
class Certificate:
    kind: CertificateKind
    k: int
    verdict: bool
    S: VertexSet | None = None
    v: int | None = None
    q: int | None = None
    dangerous_count: int | None = None
    delta_k: int | None = None


def _escape_base(g: Graph, v: int, mode: Mode) -> int:
    if mode is Mode.NEIGHBOR:
        return g.adj[v]
    return g.full_mask & ~g.closed(v)


def escape_vertex(
    g: Graph,
    v: int,
    blockers: Iterable[int],
    w: int,
    mode: Mode = Mode.NEIGHBOR,
    exclude: Iterable[int] = (),
) -> int | None:
    """Lowest ``w'`` in ``N(v)`` (or ``N^c(v)``) adjacent to ``w`` and to no blocker.

    ``w'`` is never ``v``, ``w``, a blocker, or a member of ``exclude``.
    """
    bmask = mask_of(blockers)
    for x in (v, w):
        g.check_vertex(x)
    if bmask >> w & 1:
        raise ValueError(f"w={w} must not be a blocker")
    if v == w or bmask >> v & 1:
        raise ValueError(f"v={v} must differ from w and the blockers")
    cand = _escape_base(g, v, mode) & g.adj[w] & ~closed_union(g, bmask)
    cand &= ~(mask_of(exclude) | 1 << v | 1 << w)
    return lowest(cand)


# -- greedy escape ---------------------------------------------------------------


@dataclass(frozen=True)
class GreedyContext:
    S: VertexSet
    v: int
    k: int

    @classmethod
    def build(cls, g: Graph, S: Iterable[int], v: int) -> GreedyContext:
        S = frozenset(S)
        for x in (*S, v):
            g.check_vertex(x)
        if not S:
            raise ValueError("S must be non-empty")
        if not non_neighborhood_mask(g, mask_of(S)) >> v & 1:
            raise ValueError(f"v={v} is dominated by S={sorted(S)}")
        return cls(S, v, len(S))


def _proper_subsets(s: Sequence[int]) -> Iterable[tuple[int, ...]]:
    for size in range(len(s)):
        yield from combinations(s, size)


class _Work:
    def __init__(self, limit: int):
        self.limit = limit
        self.spent = 0

    def charge(self, amount: int) -> None:
        self.spent += amount
        if self.spent > self.limit:
            raise BudgetExceeded(f"greedy certificate exceeded its work limit of {self.limit} checks")


def _greedy_holds(g: Graph, s: tuple[int, ...], v: int, work: _Work) -> bool:
    k = len(s)
    smask = mask_of(s)
    wmask = g.full_mask & ~smask & ~(1 << v)
    wlist = members(wmask)
    closed = [g.closed(x) for x in range(g.n)]
    nbr_v = g.adj[v]
    non_v = g.full_mask & ~g.closed(v) & ~smask

    for t in _proper_subsets(s):
        t_block = 0
        for x in t:
            t_block |= closed[x]
        # a cop standing on v takes one of the k slots in the non-neighbour case
        for base, room in ((nbr_v, k - len(t)), (non_v, k - 1 - len(t))):
            avail = base & ~t_block
            size = min(room, len(wlist))
            # robber free to pick any vertex: start of game, or stepping off v
            work.charge(comb(len(wlist), size))
            for u in combinations(wlist, size):
                blocked = 0
                for x in u:
                    blocked |= closed[x]
                if not avail & ~blocked:
                    return False
            size = min(room, len(wlist) - 1)
            for w in wlist:
                reach = avail & g.adj[w]
                if not reach:
                    return False
                others = [x for x in wlist if x != w]
                work.charge(comb(len(others), size))
                for u in combinations(others, size):
                    blocked = 0
                    for x in u:
                        blocked |= closed[x]
                    if not reach & ~blocked:
                        return False
    return True


def greedy_escape_certificate(g: Graph, k: int, work_limit: int = GREEDY_WORK_LIMIT) -> Certificate:
    """Search all ``(S, v)`` for a pair on which the greedy robber cannot be caught.

    The condition checked for a pair is that for every proper ``T ⊂ S``, every
    placement ``U`` of the remaining cops in ``W = V - S - v`` and every robber
    vertex ``w`` in ``W - U`` an escape vertex exists, both in ``N(v)`` and (for
    the case of a cop on ``v``) in ``N^c(v) - S``; likewise for a robber free
    to choose any vertex. Lexicographically first witnesses are returned.

    Raises:
        BudgetExceeded: once more than ``work_limit`` blocker sets have been
            scheduled for checking.
    """
    if not 1 <= k < g.n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={g.n}")
    work = _Work(work_limit)
    for s in combinations(range(g.n), k):
        for v in members(non_neighborhood_mask(g, mask_of(s))):
            if _greedy_holds(g, s, v, work):
                return Certificate(CertificateKind.GREEDY_ESCAPE, k, True, S=frozenset(s), v=v)
    return Certificate(CertificateKind.GREEDY_ESCAPE, k, False)


def _all_passed(cops: Sequence[int], previous: Sequence[int] | None) -> bool:
    return previous is not None and tuple(sorted(previous)) == tuple(sorted(cops))


def greedy_robber_move(
    g: Graph,
    ctx: GreedyContext,
    cops: Sequence[int],
    current: int | None = None,
    previous_cops: Sequence[int] | None = None,
) -> int:
    """Next vertex for the greedy robber; ``current=None`` means initial placement.

    Raises:
        NoSafeMove: if the applicable rule has no reachable candidate.
    """
    if current is not None and _all_passed(cops, previous_cops):
        return current
    cmask = mask_of(cops)
    smask = mask_of(ctx.S)
    if cmask == smask:
        cand = 1 << ctx.v
    else:
        t_block = closed_union(g, cmask & smask)
        if cmask >> ctx.v & 1:
            cand = g.full_mask & ~g.closed(ctx.v) & ~smask
        else:
            cand = g.adj[ctx.v]
        cand &= ~t_block & ~closed_union(g, cmask)
    if current is not None:
        cand &= g.closed(current)
    if not cand:
        raise NoSafeMove(f"greedy robber stuck: cops={tuple(sorted(cops))}, robber={current}")
    return lowest(cand)


class GreedyRobber:
    def __init__(self, ctx: GreedyContext):
        self.ctx = ctx

    def place(self, g, cops, rng):
        return greedy_robber_move(g, self.ctx, cops)

    def move(self, g, cops, robber, previous_cops, rng):
        return greedy_robber_move(g, self.ctx, cops, robber, previous_cops)


# -- evasion --------------------------------------------------------------------------


@dataclass(frozen=True)
class DangerReport:
    k: int
    q: int
    dangerous: dict[int, VertexSet]
    delta_k: int

    @property
    def mask(self) -> int:
        return mask_of(self.dangerous)

    @property
    def count(self) -> int:
        return len(self.dangerous)


def dangerous_vertices(g: Graph, k: int, q: int, work_limit: int = DEFAULT_WORK_LIMIT) -> DangerReport:
    """Exhaustive scan of every ``(b, A)``: ``b`` is dangerous when some ``k``-set
    ``A`` avoiding it has ``|N^c(A) ∩ N(b)| <= 2q``. The first such ``A`` in
    lexicographic order is kept as the threatening witness."""
    if not 1 <= k < g.n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={g.n}")
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    work = g.n * comb(g.n - 1, k)
    if work > work_limit:
        raise BudgetExceeded(f"danger scan needs {work} checks, limit is {work_limit}")
    full = g.full_mask
    closed = [g.closed(x) for x in range(g.n)]
    dangerous = {}
    for b in range(g.n):
        nb = g.adj[b]
        others = [x for x in range(g.n) if x != b]
        for a in combinations(others, k):
            cover = 0
            for x in a:
                cover |= closed[x]
            if (nb & full & ~cover).bit_count() <= 2 * q:
                dangerous[b] = frozenset(a)
                break
    return DangerReport(k, q, dangerous, delta_k(g, k, work_limit)[0])


def evasion_certificate(
    g: Graph, k: int, q: int | None = None, work_limit: int = DEFAULT_WORK_LIMIT
) -> Certificate:
    """True iff fewer than ``q`` vertices are dangerous and ``delta_k >= q``.

    ``q`` defaults to ``k + 1``.
    """
    q = k + 1 if q is None else q
    report = dangerous_vertices(g, k, q, work_limit)
    verdict = report.count < q and report.delta_k >= q
    return Certificate(
        CertificateKind.EVASION, k, verdict, q=q, dangerous_count=report.count, delta_k=report.delta_k
    )


def safe_vertices(g: Graph, cops: Iterable[int], report: DangerReport) -> VertexSet:
    free = g.full_mask & ~closed_union(g, mask_of(cops)) & ~report.mask
    return frozenset(members(free))


def evasion_robber_move(
    g: Graph,
    report: DangerReport,
    cops: Sequence[int],
    current: int | None = None,
    previous_cops: Sequence[int] | None = None,
) -> int:
    free = g.full_mask & ~closed_union(g, mask_of(cops)) & ~report.mask
    if current is None:
        cand = free
    else:
        if _all_passed(cops, previous_cops) and free >> current & 1:
            return current
        cand = free & g.closed(current)
    if not cand:
        raise NoSafeMove(f"no safe vertex: cops={tuple(sorted(cops))}, robber={current}")
    return lowest(cand)


class EvasionRobber:
    def __init__(self, report: DangerReport):
        self.report = report

    def place(self, g, cops, rng):
        return evasion_robber_move(g, self.report, cops)

    def move(self, g, cops, robber, previous_cops, rng):
        return evasion_robber_move(g, self.report, cops, robber, previous_cops)


# -- exhaustive check ------------------------------------------------------------------


def beat_robber(g: Graph, k: int, robber: RobberController) -> list[tuple[tuple[int, ...], int]] | None:
    """Search every cop strategy against a deterministic robber controller.

    The robber's reply depends only on the previous and current cop multisets
    and her vertex, so the game collapses to reachability over
    ``(cops, robber)`` states. Returns a winning line of play for the cops
    (ending with the position in which the robber is caught or stuck), or
    ``None`` when no cop strategy ever wins.
    """
    rng = random.Random(0)
    closed = [members(g.closed(v)) for v in range(g.n)]
    moves: dict[tuple[int, ...], list[tuple[int, ...]]] = {}

    def dests(c: tuple[int, ...]) -> list[tuple[int, ...]]:
        if c not in moves:
            moves[c] = sorted({tuple(sorted(p)) for p in product(*(closed[x] for x in c))})
        return moves[c]

    parent: dict[tuple[tuple[int, ...], int], tuple | None] = {}
    queue: deque = deque()

    def line(state, last):
        out = [last] if last is not None else []
        while state is not None:
            out.append(state)
            state = parent[state]
        return out[::-1]

    for c in combinations_with_replacement(range(g.n), k):
        try:
            r = robber.place(g, c, rng)
        except NoSafeMove:
            return [(c, -1)]
        if r in c:
            return [(c, r)]
        if (c, r) not in parent:
            parent[(c, r)] = None
            queue.append((c, r))
    while queue:
        c, r = queue.popleft()
        for c2 in dests(c):
            if r in c2:
                return line((c, r), (c2, r))
            try:
                r2 = robber.move(g, c2, r, c, rng)
            except NoSafeMove:
                return line((c, r), (c2, -1))
            if r2 in c2 or not g.closed(r) >> r2 & 1:
                return line((c, r), (c2, r2))
            if (c2, r2) not in parent:
                parent[(c2, r2)] = (c, r)
                queue.append((c2, r2))
    return None
