"""Acceptance suite: one test per criterion, summarised as PASS/FAIL lines at the end of the run.

Every criterion also prints a one-line result of its own (visible with ``-s``).
"""

import functools
import math
import subprocess
import sys
import time
from fractions import Fraction

import networkx as nx
import pytest

from copwin.experiments import (
    EventSpec,
    SamplerConfig,
    enumerate_joint,
    estimate_probability,
    labelled_graphs,
    sample_gnp,
    wilson_interval,
)
from copwin.formulas import (
    eta,
    kdom_first_moment,
    labelled_count_formula,
    pair_domination_bound,
    pair_domination_probability,
)
from copwin.game import MatchEnd, OptimalCops, cop_number, is_k_cop_win, play_match, solve_game
from copwin.graph import Graph, corners, dismantling_order
from copwin.rng import derive_seed
from copwin.strategies import (
    EvasionRobber,
    GreedyContext,
    GreedyRobber,
    dangerous_vertices,
    evasion_certificate,
    greedy_escape_certificate,
)
from test_formulas import brute_eta, brute_pair_domination


def report(number, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")


# -- 1: cop-win equals dismantlable over all small labelled graphs -------------


def _dismantling_agreement(n):
    disagreements = 0
    total = 0
    for g in labelled_graphs(n):
        total += 1
        disagreements += dismantling_order(g).success != is_k_cop_win(g, 1)
    return disagreements, total


def test_criterion_01_cop_win_iff_dismantlable():
    start = time.perf_counter()
    totals = {}
    bad = 0
    for n in (2, 3, 4, 5):
        d, totals[n] = _dismantling_agreement(n)
        bad += d
    elapsed = time.perf_counter() - start
    ok = bad == 0 and totals == {2: 2, 3: 8, 4: 64, 5: 1024} and elapsed < 60
    report(1, ok, f"{sum(totals.values())} graphs, {bad} disagreements, {elapsed:.1f}s")
    assert totals == {2: 2, 3: 8, 4: 64, 5: 1024}
    assert bad == 0
    assert elapsed < 60


@pytest.mark.slow
def test_criterion_01_cop_win_iff_dismantlable_n6():
    start = time.perf_counter()
    bad, total = _dismantling_agreement(6)
    elapsed = time.perf_counter() - start
    report(1, bad == 0 and elapsed < 600, f"n=6: {total} graphs, {bad} disagreements, {elapsed:.1f}s")
    assert total == 32768 and bad == 0
    assert elapsed < 600


# -- 2: deleting a corner preserves cop-win -------------------------------------


def test_criterion_02_corner_deletion_invariance():
    samples = checks = violations = 0
    i = 0
    while samples < 1000:
        n = 2 + i % 7
        g = sample_gnp(SamplerConfig(n, 0.5, derive_seed(2, i)))
        i += 1
        found = corners(g)
        if not found:
            continue
        samples += 1
        before = is_k_cop_win(g, 1)
        for u, _ in found:
            checks += 1
            violations += before != is_k_cop_win(g.delete_vertex(u), 1)
    report(2, violations == 0, f"{samples} samples, {checks} corner deletions, {violations} violations")
    assert violations == 0


# -- 3: known cop numbers ----------------------------------------------------------


def _trees(n):
    for t in nx.nonisomorphic_trees(n):
        yield Graph.from_edges(n, t.edges())


def test_criterion_03_known_cop_numbers():
    cases = [(f"K{n}", Graph.complete(n), 1) for n in range(1, 11)]
    cases += [(f"tree{n}.{j}", t, 1) for n in range(2, 11) for j, t in enumerate(_trees(n))]
    cases += [(f"C{n}", Graph.cycle(n), 2) for n in range(4, 11)]
    cases += [("Petersen", Graph.petersen(), 3)]
    wrong = [(name, cop_number(g), want) for name, g, want in cases if cop_number(g) != want]
    trees = sum(1 for name, _, _ in cases if name.startswith("tree"))
    report(3, not wrong, f"{len(cases)} graphs ({trees} trees), mismatches: {wrong}")
    assert trees == 1 + 1 + 2 + 3 + 6 + 11 + 23 + 47 + 106
    assert not wrong


# -- 4: probability formulas vs incidence-pattern enumeration ---------------------


def test_criterion_04_formula_oracles():
    checked = 0
    for k in range(1, 5):
        for l in range(k):
            assert pair_domination_probability(k, l) == brute_pair_domination(k, l)
            assert eta(k, l) == brute_eta(k, l)
            checked += 1
    bound_ok = all(
        pair_domination_probability(k, l) <= pair_domination_bound(k) for k in range(1, 11) for l in range(k)
    )
    report(4, bound_ok, f"{checked} (k, l) pairs exact; bound holds for k <= 10: {bound_ok}")
    assert bound_ok


# -- 5: algebraic identities -----------------------------------------------------------


def test_criterion_05_algebraic_identities():
    for n in range(1, 61):
        assert kdom_first_moment(n, 1).exact == Fraction(n, 2 ** (n - 1))
    worst = 0.0
    for n in range(1, 101):
        for k in range(1, min(n, 5) + 1):
            diff = labelled_count_formula(n, k) - kdom_first_moment(n, k).log2
            target = math.comb(n, 2)
            rel = abs(diff - target) / max(target, 1)
            worst = max(worst, rel)
            assert math.isclose(diff, target, rel_tol=1e-12, abs_tol=1e-12), (n, k, diff)
    report(5, True, f"first moment exact for n <= 60; worst relative log2 error {worst:.2e}")


# -- 6: enumeration vs Monte Carlo at n = 6 ----------------------------------------------

N6_TOTAL = 32768
N6_EXACT = {
    EventSpec("kcopwin", 1): 15369,
    EventSpec("kdom", 1): 5319,
    EventSpec("kdom", 2): 28265,
    EventSpec("universal"): 5319,
}


def _band(p, trials, confidence):
    """Acceptance band around a known probability: Wilson interval at the expected count."""
    return wilson_interval(round(p * trials), trials, confidence)


def test_criterion_06_enumeration_vs_monte_carlo():
    start = time.perf_counter()
    events = list(N6_EXACT)
    joint, total = enumerate_joint(6, events)
    assert total == N6_TOTAL
    exact = {e: sum(c for key, c in joint.items() if key[i]) for i, e in enumerate(events)}
    assert exact == N6_EXACT
    lines = []
    outside = []
    for j, e in enumerate(events):
        est = estimate_probability(SamplerConfig(6, 0.5, derive_seed(6, j)), e, 100_000)
        p = exact[e] / total
        low, high = _band(p, est.trials, 0.999)
        lines.append(f"{e}: exact {p:.5f} est {est.point:.5f} band [{low:.5f}, {high:.5f}]")
        if not low <= est.point <= high or est.failed:
            outside.append(str(e))
    elapsed = time.perf_counter() - start
    report(6, not outside and elapsed < 300, "; ".join(lines) + f"; {elapsed:.0f}s")
    assert not outside
    assert elapsed < 300


# -- 7 & 8: certificates are sound and their strategies survive ------------------------


def _corpus():
    """Seeded G(n, p) graphs (n 7..12, p in {.3, .5, .7}), plus two frozen positives."""
    for i in range(600):
        n = 7 + i % 6
        p = (0.3, 0.5, 0.7)[(i // 6) % 3]
        yield f"seed{i}", sample_gnp(SamplerConfig(n, p, derive_seed(2024, i)))
    # certificate-positive graphs found by scanning derive_seed(99, i), n = 12
    for index, p in ((15948, 0.65), (17682, 0.6)):
        yield f"pos{index}", sample_gnp(SamplerConfig(12, p, derive_seed(99, index)))


@functools.cache
def _certified():
    rows = []
    for name, g in _corpus():
        for k in (1, 2):
            greedy = greedy_escape_certificate(g, k)
            evasion = evasion_certificate(g, k)
            rows.append((name, g, k, greedy, evasion))
    return rows



def test_criterion_07_certificate_soundness():
    certified = _certified()
    positive = [(name, g, k, gr, ev) for name, g, k, gr, ev in certified if gr.verdict or ev.verdict]
    violations = [(name, k) for name, g, k, _, _ in positive if is_k_cop_win(g, k)]
    greedy_hits = sum(gr.verdict for *_, gr, _ in positive)
    evasion_hits = sum(ev.verdict for *_, ev in positive)
    report(
        7,
        not violations and len(certified) >= 500,
        f"{len(certified)} (graph, k) cases, {greedy_hits} greedy-positive, {evasion_hits} evasion-positive, "
        f"{len(violations)} violations",
    )
    assert len(certified) >= 500
    assert positive, "corpus must contain at least one certificate-positive graph"
    assert not violations


def test_criterion_08_strategy_realization():
    certified = _certified()
    results = []
    for name, g, k, greedy, evasion in certified:
        if greedy.verdict:
            robber = GreedyRobber(GreedyContext.build(g, greedy.S, greedy.v))
            results.append((name, k, "greedy", robber))
        if evasion.verdict:
            robber = EvasionRobber(dangerous_vertices(g, k, evasion.q))
            results.append((name, k, "evasion", robber))
    outcomes = []
    for j, (name, k, kind, robber) in enumerate(results):
        g = next(g for n, g, kk, _, _ in certified if n == name and kk == k)
        trace = play_match(g, k, OptimalCops(solve_game(g, k)), robber, 1000, seed=j)
        outcomes.append((name, k, kind, trace.describe()))
    failed = [o for o in outcomes if o[3] != "Survived(1000)"]
    report(8, bool(outcomes) and not failed, f"{len(outcomes)} matches: {outcomes}")
    assert outcomes
    assert not failed


def test_criterion_08_strategy_realization_large_graphs():
    # evasion never certifies at n <= 12, so it is exercised on a larger sample too
    g = sample_gnp(SamplerConfig(80, 0.5, 11))
    cert = evasion_certificate(g, 1)
    assert cert.verdict and not is_k_cop_win(g, 1)
    robber = EvasionRobber(dangerous_vertices(g, 1, cert.q))
    trace = play_match(g, 1, OptimalCops(solve_game(g, 1)), robber, 1000, seed=11)
    report(8, trace.outcome is MatchEnd.SURVIVED, f"evasion on G(80, 1/2): {trace.describe()}")
    assert trace.describe() == "Survived(1000)"


# -- 9: finite-n snapshot of the cop-win / first-moment ratio ----------------------------

# (n, k): (#k-cop-win, #k-cop-win with a dominating k-set), over all 2^C(n,2) labelled graphs
SNAPSHOT_COUNTS = {
    (4, 1): (35, 23),
    (4, 2): (57, 57),
    (5, 1): (556, 256),
    (5, 2): (943, 883),
    (6, 1): (15369, 5319),
    (6, 2): (30725, 28265),
}
SNAPSHOT = {
    (4, 1): (Fraction(35, 32), Fraction(23, 35)),
    (4, 2): (Fraction(19, 72), Fraction(1)),
    (5, 1): (Fraction(139, 80), Fraction(64, 139)),
    (5, 2): (Fraction(943, 4320), Fraction(883, 943)),
    (6, 1): (Fraction(5123, 2048), Fraction(1773, 5123)),
    (6, 2): (Fraction(6145, 31104), Fraction(5653, 6145)),
}


def test_criterion_09_finite_n_snapshot():
    lines = []
    for n in (4, 5, 6):
        events = [EventSpec("kcopwin", 1), EventSpec("kcopwin", 2), EventSpec("kdom", 1), EventSpec("kdom", 2)]
        joint, total = enumerate_joint(n, events)
        for k in (1, 2):
            copwin = sum(c for key, c in joint.items() if key[k - 1])
            both = sum(c for key, c in joint.items() if key[k - 1] and key[k + 1])
            assert (copwin, both) == SNAPSHOT_COUNTS[(n, k)]
            ratio = Fraction(copwin, total) / kdom_first_moment(n, k).exact
            conditional = Fraction(both, copwin)
            assert (ratio, conditional) == SNAPSHOT[(n, k)]
            lines.append(f"n={n} k={k}: ratio {float(ratio):.4f}, P(dom|cop-win) {float(conditional):.4f}")
    report(9, True, "; ".join(lines))


# -- 10: performance floor ------------------------------------------------------------------


def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def test_criterion_10_performance():
    g20 = sample_gnp(SamplerConfig(20, 0.5, 10))
    g15 = sample_gnp(SamplerConfig(15, 0.5, 10))
    t20 = _timed(lambda: solve_game(g20, 2))
    t15 = _timed(lambda: solve_game(g15, 3))
    suite = [
        EventSpec("kcopwin", 1),
        EventSpec("kcopwin", 2),
        EventSpec("kdom", 1),
        EventSpec("kdom", 2),
        EventSpec("universal"),
        EventSpec("dismantlable"),
    ]
    t5 = _timed(lambda: enumerate_joint(5, suite))
    ok = t20 < 1 and t15 < 30 and t5 < 60
    report(10, ok, f"solve n=20 k=2 {t20:.3f}s; n=15 k=3 {t15:.3f}s; enumerate n=5 suite {t5:.2f}s")
    assert t20 < 1
    assert t15 < 30
    assert t5 < 60


# -- 11: reproducibility ----------------------------------------------------------------------

RERUNS = [
    ["match", "IheA@GUAo", "--k", "1", "--seed", "42", "--max-rounds", "200", "--trace", "--format", "json"],
    ["estimate", "--n", "6", "--event", "kcopwin", "--k", "1", "--trials", "2000", "--seed", "7"],
    ["sweep", "--n-min", "3", "--n-max", "6", "--k", "1", "--mode", "estimate", "--trials", "500", "--seed", "3"],
    ["sweep", "--n-min", "4", "--n-max", "5", "--k", "2"],
    ["certify", "IheA@GUAo", "--k", "1", "--format", "csv"],
]


def _cli(argv):
    proc = subprocess.run([sys.executable, "-m", "copwin.cli", *argv], capture_output=True, check=False)
    return proc.returncode, proc.stdout, proc.stderr


def test_criterion_11_reproducibility():
    identical = 0
    for argv in RERUNS:
        first, second = _cli(argv), _cli(argv)
        assert first[0] == 0, first[2]
        assert first == second, argv
        identical += 1
    # an unseeded run prints its seed; replaying that seed reproduces stdout exactly
    argv = ["estimate", "--n", "5", "--event", "kdom", "--k", "1", "--trials", "1000"]
    code, out, err = _cli(argv)
    seed = err.decode().split()[1]
    replays = [_cli([*argv, "--seed", seed]) for _ in range(2)]
    assert code == 0 and all(r[:2] == (0, out) for r in replays)
    report(11, True, f"{identical + 1} commands byte-identical across reruns")
