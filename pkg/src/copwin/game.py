"""Exact solution of the k-cop pursuit game by retrograde analysis.

Positions are ``(cops, robber, side-to-move)`` with ``cops`` a sorted multiset
of ``k`` vertices. Cop multisets are indexed by their colex rank, which turns
the whole game into two boolean ``(M, n)`` arrays (cops to move / robber to
move) and one sparse ``(M, M)`` transition matrix over cop multisets. The
least fixed point is then reached by alternating two matrix products.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement, product
from math import comb
from typing import Protocol, Sequence

import numpy as np
from scipy import sparse

from .errors import BudgetExceeded, NoSafeMove, PositionMismatch
from .graph import Graph, delta_k, members

DEFAULT_STATE_BUDGET = 50_000_000
# joint cop moves expanded per vectorized block when building transitions
_MOVE_BLOCK = 1 << 20


class Side(enum.Enum):
    COPS = "cops"
    ROBBER = "robber"


class Outcome(enum.Enum):
    COP_WIN = "cop-win"
    ROBBER_WIN = "robber-win"


@dataclass(frozen=True)
class Position:
    cops: tuple[int, ...]
    robber: int
    to_move: Side = Side.COPS

    def __post_init__(self) -> None:
        if not self.cops:
            raise ValueError("a position needs at least one cop")
        if tuple(sorted(self.cops)) != tuple(self.cops):
            object.__setattr__(self, "cops", tuple(sorted(self.cops)))

    @property
    def captured(self) -> bool:
        return self.robber in self.cops


def state_count(n: int, k: int) -> int:
    return comb(n + k - 1, k) * n * 2


def _binomials(limit: int, k: int) -> np.ndarray:
    table = np.zeros((limit + 1, k + 1), dtype=np.int64)
    for x in range(limit + 1):
        for j in range(k + 1):
            table[x, j] = comb(x, j)
    return table


def _rank(sorted_configs: np.ndarray, binom: np.ndarray) -> np.ndarray:
    """Colex rank of sorted multisets, one per row."""
    k = sorted_configs.shape[1]
    shifted = sorted_configs + np.arange(k)
    return binom[shifted, np.arange(1, k + 1)].sum(axis=1)


@dataclass
class GameTable:
    """Solved ``(G, k)`` game.

    ``cop_win[i, r]`` / ``robber_turn_cop_win[i, r]`` give the status of the
    position with cop multiset ``configs[i]`` and robber at ``r`` with the cops
    (resp. robber) to move. Ranks count the cop moves still needed under
    optimal play and are ``-1`` on robber-win positions.
    """

    graph: Graph
    k: int
    configs: np.ndarray
    transitions: sparse.csr_matrix
    cop_win: np.ndarray
    cop_rank: np.ndarray
    robber_turn_cop_win: np.ndarray
    robber_turn_rank: np.ndarray
    # robber moves from (i, r) that avoid cop-win cops-to-move positions
    escapes: np.ndarray
    _binom: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def num_positions(self) -> int:
        return self.cop_win.size * 2

    def index(self, cops: Sequence[int]) -> int:
        if len(cops) != self.k:
            raise PositionMismatch(f"expected {self.k} cops, got {len(cops)}")
        for c in cops:
            if not 0 <= c < self.n:
                raise PositionMismatch(f"cop vertex {c} out of range")
        arr = np.array([sorted(cops)], dtype=np.int64)
        return int(_rank(arr, self._binom)[0])

    def config(self, i: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.configs[i])

    def destinations(self, i: int) -> np.ndarray:
        t = self.transitions
        return t.indices[t.indptr[i]:t.indptr[i + 1]]

    def _check(self, p: Position) -> int:
        if not 0 <= p.robber < self.n:
            raise PositionMismatch(f"robber vertex {p.robber} out of range")
        return self.index(p.cops)

    def status(self, p: Position) -> Outcome:
        i = self._check(p)
        table = self.cop_win if p.to_move is Side.COPS else self.robber_turn_cop_win
        return Outcome.COP_WIN if table[i, p.robber] else Outcome.ROBBER_WIN

    def rank(self, p: Position) -> int | None:
        i = self._check(p)
        table = self.cop_rank if p.to_move is Side.COPS else self.robber_turn_rank
        r = int(table[i, p.robber])
        return None if r < 0 else r

    @cached_property
    def winning_placements(self) -> np.ndarray:
        """Indices of cop multisets that win against every robber placement."""
        return np.flatnonzero(self.cop_win.all(axis=1))

    @property
    def is_cop_win(self) -> bool:
        return self.winning_placements.size > 0

    def capture_time(self) -> int | None:
        """Best worst-case number of cop moves over winning placements."""
        if not self.is_cop_win:
            return None
        worst = self.cop_rank[self.winning_placements].max(axis=1)
        return int(worst.min())


def _transition_matrix(g: Graph, k: int, configs: np.ndarray, binom: np.ndarray) -> sparse.csr_matrix:
    """0/1 matrix with ``T[i, j] = 1`` iff cops at config ``i`` can move to config ``j``."""
    m = len(configs)
    closed = [members(g.closed(v)) for v in range(g.n)]
    width = max(map(len, closed))
    padded = np.full((g.n, width), -1, dtype=np.int64)
    for v, nbrs in enumerate(closed):
        padded[v, : len(nbrs)] = nbrs
    # every way of picking one closed-neighbourhood slot per cop
    choices = np.array(list(product(range(width), repeat=k)), dtype=np.int64)
    block = max(1, _MOVE_BLOCK // len(choices))
    rows, cols = [], []
    for start in range(0, m, block):
        cfg = configs[start : start + block]
        moves = padded[cfg[:, None, :], choices[None, :, :]]
        valid = (moves >= 0).all(axis=2)
        moves.sort(axis=2)
        ranks = _rank(moves.reshape(-1, k), binom).reshape(valid.shape)
        src = np.broadcast_to(np.arange(start, start + len(cfg))[:, None], valid.shape)
        rows.append(src[valid])
        cols.append(ranks[valid])
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    t = sparse.csr_matrix((np.ones(len(r), dtype=np.float32), (r, c)), shape=(m, m))
    t.sum_duplicates()
    t.data[:] = 1
    t.sort_indices()
    return t


def solve_game(g: Graph, k: int, state_budget: int = DEFAULT_STATE_BUDGET) -> GameTable:
    """Solve the ``k``-cop game on ``g`` exactly.

    Capture positions are cop wins of rank 0. A cops-to-move position is a cop
    win of rank ``t + 1`` once some joint cop move reaches a robber-to-move
    cop win of rank ``t``; a robber-to-move position is a cop win of rank
    ``t`` once every robber move within ``N[robber]`` reaches a cops-to-move
    cop win of rank at most ``t``. Everything outside the fixed point is a
    robber win.

    Raises:
        BudgetExceeded: if ``C(n+k-1, k) * n * 2`` exceeds ``state_budget``.
    """
    if k < 1:
        raise ValueError(f"need at least one cop, got k={k}")
    n = g.n
    states = state_count(n, k)
    if states > state_budget:
        raise BudgetExceeded(f"game needs {states} position slots, budget is {state_budget}")

    binom = _binomials(n + k, k)
    m = comb(n + k - 1, k)
    configs = np.empty((m, k), dtype=np.int64)
    listed = np.array(list(combinations_with_replacement(range(n), k)), dtype=np.int64)
    configs[_rank(listed, binom)] = listed

    transitions = _transition_matrix(g, k, configs, binom)

    capture = np.zeros((m, n), dtype=bool)
    capture[np.arange(m)[:, None], configs] = True
    closed_adj = np.eye(n, dtype=np.float32)
    for u, v in g.edges():
        closed_adj[u, v] = closed_adj[v, u] = 1.0

    cop_win = capture.copy()
    cop_rank = np.where(capture, 0, -1).astype(np.int32)
    rob_win = np.zeros((m, n), dtype=bool)
    rob_rank = np.full((m, n), -1, dtype=np.int32)
    t = 0
    while True:
        escapes = (~cop_win).astype(np.float32) @ closed_adj
        fresh = (capture | (escapes == 0)) & ~rob_win
        rob_rank[fresh] = t
        rob_win |= fresh
        reach = np.asarray(transitions @ rob_win.astype(np.float32)) > 0
        fresh = reach & ~cop_win
        if not fresh.any():
            break
        t += 1
        cop_rank[fresh] = t
        cop_win |= fresh

    return GameTable(
        graph=g,
        k=k,
        configs=configs,
        transitions=transitions,
        cop_win=cop_win,
        cop_rank=cop_rank,
        robber_turn_cop_win=rob_win,
        robber_turn_rank=rob_rank,
        escapes=escapes.astype(np.int32),
        _binom=binom,
    )


def is_k_cop_win(g: Graph, k: int, state_budget: int = DEFAULT_STATE_BUDGET) -> bool:
    """True iff some cop placement beats every robber reply placement."""
    return solve_game(g, k, state_budget).is_cop_win


def cop_number(g: Graph, state_budget: int = DEFAULT_STATE_BUDGET) -> int:
    """Smallest ``k`` that is ``k``-cop-win, capped by the domination number."""
    cap = 1
    while delta_k(g, cap)[0] != 0:
        cap += 1
    for k in range(1, cap):
        if is_k_cop_win(g, k, state_budget):
            return k
    return cap


# -- strategy extraction ------------------------------------------------------


def _check_table(table: GameTable, g: Graph) -> None:
    if table.graph != g:
        raise PositionMismatch("position graph differs from the solved graph")


def optimal_cop_placement(table: GameTable) -> tuple[int, ...]:
    """Lowest winning placement, else the one covering most robber starts."""
    wins = table.winning_placements
    if wins.size:
        return min(table.config(int(i)) for i in wins)
    covered = table.cop_win.sum(axis=1)
    best = np.flatnonzero(covered == covered.max())
    return min(table.config(int(i)) for i in best)


def optimal_robber_placement(table: GameTable, cops: Sequence[int]) -> int:
    i = table.index(cops)
    free = np.flatnonzero(~table.cop_win[i])
    if free.size:
        return int(free[0])
    ranks = table.cop_rank[i]
    return int(np.flatnonzero(ranks == ranks.max())[0])


def optimal_move(
    table: GameTable, g: Graph, p: Position, rng: random.Random | None = None
) -> tuple[int, ...] | int:
    """Table-optimal move for the side to move in ``p``.

    Cops in a won position take a rank-decreasing joint move (lexicographically
    smallest destination multiset). Cops in a lost position never pass (unless
    they cannot move) and pick the destination leaving the robber the fewest
    escaping replies, breaking ties with ``rng`` when given (lexicographically
    otherwise). The robber keeps a
    robber-win position if one is reachable (lowest index), else stalls on the
    lowest-index move with the largest remaining rank.
    """
    _check_table(table, g)
    i = table._check(p)
    if p.captured:
        raise PositionMismatch("position is already a capture")
    r = p.robber
    if p.to_move is Side.COPS:
        dest = table.destinations(i)
        if table.cop_win[i, r]:
            target = table.cop_rank[i, r] - 1
            good = dest[table.robber_turn_rank[dest, r] == target]
            return min(table.config(int(j)) for j in good)
        # lost anyway: keep moving, so a robber that merely waits is exposed
        moving = dest[dest != i] if len(dest) > 1 else dest
        pressure = table.escapes[moving, r]
        best = sorted(table.config(int(j)) for j in moving[pressure == pressure.min()])
        return rng.choice(best) if rng is not None else best[0]
    moves = members(g.closed(r))
    if not table.robber_turn_cop_win[i, r]:
        for x in moves:
            if not table.cop_win[i, x]:
                return x
    ranks = [int(table.cop_rank[i, x]) for x in moves]
    top = max(ranks)
    return moves[ranks.index(top)]


# -- matches -------------------------------------------------------------------


class CopController(Protocol):
    def place(self, g: Graph, k: int, rng: random.Random) -> Sequence[int]: ...

    def move(self, g: Graph, cops: tuple[int, ...], robber: int, rng: random.Random) -> Sequence[int]: ...


class RobberController(Protocol):
    def place(self, g: Graph, cops: tuple[int, ...], rng: random.Random) -> int: ...

    def move(
        self,
        g: Graph,
        cops: tuple[int, ...],
        robber: int,
        previous_cops: tuple[int, ...],
        rng: random.Random,
    ) -> int: ...


class OptimalCops:
    def __init__(self, table: GameTable):
        self.table = table

    def place(self, g, k, rng):
        return optimal_cop_placement(self.table)

    def move(self, g, cops, robber, rng):
        return optimal_move(self.table, g, Position(cops, robber, Side.COPS), rng)


class OptimalRobber:
    def __init__(self, table: GameTable):
        self.table = table

    def place(self, g, cops, rng):
        return optimal_robber_placement(self.table, cops)

    def move(self, g, cops, robber, previous_cops, rng):
        return optimal_move(self.table, g, Position(cops, robber, Side.ROBBER))


class DominatingSetCops:
    """Sit on a dominating set, then jump onto the robber when adjacent."""

    def __init__(self, dominating: Sequence[int]):
        self.dominating = tuple(sorted(dominating))

    def place(self, g, k, rng):
        if len(self.dominating) != k:
            raise ValueError(f"dominating set has {len(self.dominating)} vertices, need {k}")
        return self.dominating

    def move(self, g, cops, robber, rng):
        out = list(cops)
        for j, c in enumerate(out):
            if g.closed(c) >> robber & 1:
                out[j] = robber
                break
        return out


class ScriptedCops:
    def __init__(self, placement: Sequence[int], moves: Sequence[Sequence[int]]):
        self.placement = tuple(placement)
        self.moves = list(moves)
        self._turn = 0

    def place(self, g, k, rng):
        self._turn = 0
        return self.placement

    def move(self, g, cops, robber, rng):
        if self._turn < len(self.moves):
            out = self.moves[self._turn]
        else:
            out = cops
        self._turn += 1
        return out


class ScriptedRobber:
    def __init__(self, placement: int, moves: Sequence[int]):
        self.placement = placement
        self.moves = list(moves)
        self._turn = 0

    def place(self, g, cops, rng):
        self._turn = 0
        return self.placement

    def move(self, g, cops, robber, previous_cops, rng):
        out = self.moves[self._turn] if self._turn < len(self.moves) else robber
        self._turn += 1
        return out


class MatchEnd(enum.Enum):
    CAPTURED = "captured"
    SURVIVED = "survived"
    FAULT = "fault"


@dataclass
class MatchTrace:
    cop_placement: tuple[int, ...]
    robber_placement: int | None
    rounds: list[tuple[tuple[int, ...], int | None]] = field(default_factory=list)
    outcome: MatchEnd = MatchEnd.SURVIVED
    round: int = 0
    fault: str | None = None

    def describe(self) -> str:
        if self.outcome is MatchEnd.CAPTURED:
            return f"Captured({self.round})"
        if self.outcome is MatchEnd.SURVIVED:
            return f"Survived({self.round})"
        return f"Fault({self.round}: {self.fault})"


def legal_cop_move(g: Graph, before: Sequence[int], after: Sequence[int]) -> bool:
    """Whether ``after`` is reachable from ``before`` with each cop moving in ``N[c]``.

    Cops are interchangeable, so this is a bipartite perfect-matching test.
    """
    if len(before) != len(after):
        return False
    if any(not 0 <= x < g.n for x in after):
        return False
    match: dict[int, int] = {}

    def augment(i: int, seen: set[int]) -> bool:
        for j, dst in enumerate(after):
            if j in seen or not g.closed(before[i]) >> dst & 1:
                continue
            seen.add(j)
            if j not in match or augment(match[j], seen):
                match[j] = i
                return True
        return False

    return all(augment(i, set()) for i in range(len(before)))


def play_match(
    g: Graph,
    k: int,
    cops: CopController,
    robber: RobberController,
    max_rounds: int,
    seed: int = 0,
) -> MatchTrace:
    """Play one match; cops place first, then move first in every round.

    Illegal moves and strategy failures end the match with a ``FAULT`` outcome
    naming the culprit rather than being corrected.
    """
    rng = random.Random(seed)

    def fault(trace: MatchTrace, rnd: int, msg: str) -> MatchTrace:
        trace.outcome, trace.round, trace.fault = MatchEnd.FAULT, rnd, msg
        return trace

    placement = tuple(sorted(cops.place(g, k, rng)))
    trace = MatchTrace(placement, None)
    if len(placement) != k or any(not 0 <= c < g.n for c in placement):
        return fault(trace, 0, f"illegal cop placement {placement}")
    try:
        start = robber.place(g, placement, rng)
    except NoSafeMove as exc:
        return fault(trace, 0, f"robber: {exc}")
    if not 0 <= start < g.n:
        return fault(trace, 0, f"illegal robber placement {start}")
    trace.robber_placement = start
    if start in placement:
        trace.outcome, trace.round = MatchEnd.CAPTURED, 0
        return trace

    cur_cops, cur_r = placement, start
    for rnd in range(1, max_rounds + 1):
        nxt = tuple(sorted(cops.move(g, cur_cops, cur_r, rng)))
        if not legal_cop_move(g, cur_cops, nxt):
            return fault(trace, rnd, f"illegal cop move {cur_cops} -> {nxt}")
        if cur_r in nxt:
            trace.rounds.append((nxt, None))
            trace.outcome, trace.round = MatchEnd.CAPTURED, rnd
            return trace
        try:
            r = robber.move(g, nxt, cur_r, cur_cops, rng)
        except NoSafeMove as exc:
            trace.rounds.append((nxt, None))
            return fault(trace, rnd, f"robber: {exc}")
        trace.rounds.append((nxt, r))
        if not (0 <= r < g.n and g.closed(cur_r) >> r & 1):
            return fault(trace, rnd, f"illegal robber move {cur_r} -> {r}")
        if r in nxt:
            trace.outcome, trace.round = MatchEnd.CAPTURED, rnd
            return trace
        cur_cops, cur_r = nxt, r
    trace.outcome, trace.round = MatchEnd.SURVIVED, max_rounds
    return trace
