import pytest
from hypothesis import strategies as st

from copwin.graph import Graph


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False, help="run slow exhaustive checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@st.composite
def graphs(draw, min_n=1, max_n=9):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    bits = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, b in zip(pairs, bits) if b])


def random_tree(n, rng):
    return Graph.from_edges(n, [(v, rng.randrange(v)) for v in range(1, n)])


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, in criterion order."""
    lines = []
    for outcome in ("passed", "failed", "skipped", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            if outcome == "passed" and rep.when != "call":
                continue
            name = nodeid.split("::")[-1]
            lines.append((name, {"passed": "PASS", "failed": "FAIL", "error": "FAIL"}.get(outcome, "SKIP")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in sorted(set(lines)):
        number = int(name.split("_")[2])
        title = name.split("_", 3)[3].replace("_", " ")
        terminalreporter.write_line(f"{verdict}  criterion {number:2d}: {title}")
