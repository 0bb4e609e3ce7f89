"""Seeded G(n, p) sampling, exhaustive labelled enumeration, Monte Carlo.

Trials and enumeration shards are independent, so both can be spread over a
process pool; the merge is a plain sum of counters, so results never depend
on scheduling.
"""

from __future__ import annotations

import enum
import math
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded
from .game import DEFAULT_STATE_BUDGET, is_k_cop_win
from .graph import Graph, delta_k, has_universal_vertex, is_dismantlable
from .rng import SplitMix64, derive_seed

ENUMERATION_CAP = 6
ENUMERATION_HARD_CAP = 7


class EventKind(str, enum.Enum):
    KCOPWIN = "kcopwin"
    KDOM = "kdom"
    UNIVERSAL = "universal"
    DISMANTLABLE = "dismantlable"


@dataclass(frozen=True)
class EventSpec:
    kind: EventKind
    k: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", EventKind(self.kind))
        if self.k < 1:
            raise ValueError(f"event k must be >= 1, got {self.k}")

    def __str__(self) -> str:
        if self.kind in (EventKind.KCOPWIN, EventKind.KDOM):
            return f"{self.kind.value}(k={self.k})"
        return self.kind.value


@dataclass(frozen=True)
class SamplerConfig:
    n: int
    p: float
    seed: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class Estimate:
    trials: int
    successes: int
    point: float
    ci_low: float
    ci_high: float
    # trials whose evaluation hit a budget; excluded from ``trials``
    failed: int = 0


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def sample_gnp(cfg: SamplerConfig) -> Graph:
    """One G(n, p) sample.

    Pairs are visited in row-major order ``(0,1), (0,2), ..., (n-2,n-1)``;
    each consumes one SplitMix64 draw and is an edge iff ``draw / 2^64 < p``.
    """
    threshold = math.ceil(Fraction(cfg.p) * (1 << 64))
    stream = SplitMix64(cfg.seed)
    rows = [0] * cfg.n
    for u, v in _pairs(cfg.n):
        if stream.next() < threshold:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
    return Graph(cfg.n, tuple(rows))


def graph_from_bits(n: int, bits: int, pairs: Sequence[tuple[int, int]] | None = None) -> Graph:
    """Graph whose edge set is given by ``bits`` over the row-major pair order."""
    pairs = pairs if pairs is not None else _pairs(n)
    rows = [0] * n
    i = 0
    while bits:
        if bits & 1:
            u, v = pairs[i]
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        bits >>= 1
        i += 1
    return Graph(n, tuple(rows))


def labelled_graphs(n: int, start: int = 0, stop: int | None = None) -> Iterator[Graph]:
    """All ``2^C(n,2)`` labelled graphs on ``n`` vertices (or a counter slice)."""
    pairs = _pairs(n)
    total = 1 << len(pairs)
    for bits in range(start, total if stop is None else min(stop, total)):
        yield graph_from_bits(n, bits, pairs)


def event_holds(g: Graph, e: EventSpec, state_budget: int = DEFAULT_STATE_BUDGET) -> bool:
    if e.kind is EventKind.KCOPWIN:
        return is_k_cop_win(g, e.k, state_budget)
    if e.kind is EventKind.KDOM:
        if e.k >= g.n:
            return True
        return delta_k(g, e.k)[0] == 0
    if e.kind is EventKind.UNIVERSAL:
        return has_universal_vertex(g) is not None
    return is_dismantlable(g)


def _check_enumeration(n: int, cap: int) -> None:
    if cap > ENUMERATION_HARD_CAP:
        raise ValueError(f"enumeration cap cannot exceed {ENUMERATION_HARD_CAP}")
    if n < 1 or n > cap:
        raise ValueError(f"enumeration supports 1 <= n <= {cap}, got n={n}")
    if n > ENUMERATION_CAP:
        warnings.warn(
            f"enumerating all {1 << (n * (n - 1) // 2)} labelled graphs on {n} vertices",
            RuntimeWarning,
            stacklevel=3,
        )


def _joint_shard(args: tuple[int, tuple[EventSpec, ...], int, int]) -> Counter:
    n, events, start, stop = args
    out: Counter = Counter()
    for g in labelled_graphs(n, start, stop):
        out[tuple(event_holds(g, e) for e in events)] += 1
    return out


def _shards(total: int, workers: int) -> list[tuple[int, int]]:
    parts = max(1, workers) * 4 if workers > 1 else 1
    step = -(-total // parts)
    return [(a, min(a + step, total)) for a in range(0, total, step)]


def enumerate_joint(
    n: int, events: Iterable[EventSpec], cap: int = ENUMERATION_CAP, workers: int = 1
) -> tuple[Counter, int]:
    """Exact joint counts of ``events`` over all labelled graphs on ``n`` vertices.

    Returns a counter keyed by the tuple of event indicators, and the total
    ``2^C(n,2)``.
    """
    events = tuple(events)
    _check_enumeration(n, cap)
    total = 1 << (n * (n - 1) // 2)
    jobs = [(n, events, a, b) for a, b in _shards(total, workers)]
    merged: Counter = Counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_joint_shard, jobs):
                merged.update(part)
    else:
        for job in jobs:
            merged.update(_joint_shard(job))
    return merged, total


def enumerate_labelled(
    n: int, e: EventSpec, cap: int = ENUMERATION_CAP, workers: int = 1
) -> tuple[int, int]:
    """``(count, 2^C(n,2))``: how many labelled graphs satisfy ``e``."""
    joint, total = enumerate_joint(n, [e], cap, workers)
    return joint[(True,)], total


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("Wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes={successes} out of range for {trials} trials")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    # keep the point inside the band despite rounding at the extremes
    return min(max(centre - half, 0.0), phat), max(min(centre + half, 1.0), phat)


def _trial_shard(args: tuple[SamplerConfig, EventSpec, int, int, int]) -> tuple[int, int, int]:
    cfg, e, start, stop, budget = args
    cache: dict[tuple[int, ...], bool] = {}
    hits = evaluated = failed = 0
    for i in range(start, stop):
        g = sample_gnp(SamplerConfig(cfg.n, cfg.p, derive_seed(cfg.seed, i)))
        try:
            if g.adj not in cache:
                cache[g.adj] = event_holds(g, e, budget)
        except BudgetExceeded:
            failed += 1
            continue
        evaluated += 1
        hits += cache[g.adj]
    return hits, evaluated, failed


def estimate_probability(
    cfg: SamplerConfig,
    e: EventSpec,
    trials: int,
    confidence: float = 0.95,
    workers: int = 1,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> Estimate:
    """Monte Carlo estimate of ``P(e)`` in G(n, p).

    Trial ``i`` samples with seed ``derive_seed(cfg.seed, i)``, so any single
    trial can be replayed on its own. Trials that hit the solver budget are
    counted in ``failed`` and left out of the ratio.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    jobs = [(cfg, e, a, b, state_budget) for a, b in _shards(trials, workers)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_trial_shard, jobs))
    else:
        parts = [_trial_shard(job) for job in jobs]
    hits = sum(p[0] for p in parts)
    evaluated = sum(p[1] for p in parts)
    failed = sum(p[2] for p in parts)
    if evaluated == 0:
        raise BudgetExceeded(f"all {trials} trials exceeded the solver budget")
    low, high = wilson_interval(hits, evaluated, confidence)
    return Estimate(evaluated, hits, hits / evaluated, low, high, failed)
