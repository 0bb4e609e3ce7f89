"""Command-line front end.

Every subcommand prints its result to standard output as a human-readable
table (default), JSON or CSV, and can append a self-describing run record to a
JSONL file (``--record PATH`` or the ``COPWIN_RECORD`` environment variable).

Exit codes: 0 success, 1 invalid input, 2 a state or work budget was exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import secrets
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial
from typing import Any, Callable, Sequence, TextIO

from copwin import __version__
from copwin.errors import BudgetExceeded, CopwinError
from copwin.experiments import (
    ENUMERATION_CAP,
    EventKind,
    EventSpec,
    SamplerConfig,
    enumerate_joint,
    estimate_probability,
)
from copwin.formulas import kdom_first_moment, labelled_count_formula, pair_domination_bound
from copwin.game import (
    DEFAULT_STATE_BUDGET,
    DominatingSetCops,
    OptimalCops,
    OptimalRobber,
    cop_number,
    optimal_cop_placement,
    play_match,
    solve_game,
)
from copwin.graph import DEFAULT_WORK_LIMIT, Graph, delta_k, dismantling_order, graph6_decode
from copwin.strategies import (
    GREEDY_WORK_LIMIT,
    EvasionRobber,
    GreedyContext,
    GreedyRobber,
    dangerous_vertices,
    evasion_certificate,
    greedy_escape_certificate,
)

RECORD_ENV = "COPWIN_RECORD"
PLOT_COLUMNS = ("n", "p_kcopwin", "p_kdom", "first_moment", "ratio_copwin_over_first_moment", "ci_low", "ci_high")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BUDGET = 2

Row = dict[str, Any]


class UsageError(Exception):
    """Bad command-line arguments; reported with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2, which we reserve for budgets
        raise UsageError(f"{self.prog}: {message}")


# -- value conversion ------------------------------------------------------------


def _plain(value: Any) -> Any:
    """Convert results to JSON-compatible values with a stable ordering."""
    if isinstance(value, (frozenset, set)):
        return sorted(value)
    if isinstance(value, tuple):
        return [_plain(x) for x in value]
    if isinstance(value, list):
        return [_plain(x) for x in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, Fraction):
        return str(value)
    return value


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return " ".join(_cell(x) for x in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _columns(rows: Sequence[Row]) -> list[str]:
    cols: list[str] = []
    for row in rows:
        cols.extend(k for k in row if k not in cols)
    return cols


def format_rows(rows: Sequence[Row], fmt: str) -> str:
    rows = [_plain(r) for r in rows]
    if fmt == "json":
        return json.dumps(rows[0] if len(rows) == 1 else rows, indent=2) + "\n"
    cols = _columns(rows)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({c: _cell(r.get(c)) for c in cols})
        return buf.getvalue()
    if len(rows) == 1:
        width = max(map(len, cols))
        return "".join(f"{c.ljust(width)}  {_cell(rows[0][c])}\n" for c in cols)
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(line[i]) for line in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines += ["  ".join(x.ljust(w) for x, w in zip(line, widths)).rstrip() for line in cells]
    return "\n".join(lines) + "\n"


def emit_plot_data(rows: Sequence[Row]) -> str:
    """CSV with one row per ``n`` and the fixed plot columns."""
    if not rows:
        raise ValueError("sweep produced no rows")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=PLOT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({c: _cell(r.get(c)) for c in PLOT_COLUMNS})
    return buf.getvalue()


# -- per-graph commands ------------------------------------------------------------


def _cmd_solve(g: Graph, a: argparse.Namespace) -> Row:
    table = solve_game(g, a.k, a.budget)
    won = table.is_cop_win
    return {
        "n": g.n,
        "k": a.k,
        "cop_win": won,
        "positions": table.num_positions,
        "capture_time": table.capture_time(),
        "cop_placement": optimal_cop_placement(table) if won else None,
    }


def _cmd_copnumber(g: Graph, a: argparse.Namespace) -> Row:
    return {"n": g.n, "cop_number": cop_number(g, a.budget)}


def _cmd_dismantle(g: Graph, a: argparse.Namespace) -> Row:
    res = dismantling_order(g)
    return {"n": g.n, "dismantlable": res.success, "order": list(res.order)}


def _cmd_dominate(g: Graph, a: argparse.Namespace) -> Row:
    value, witness = delta_k(g, a.k, a.work_limit)
    return {"n": g.n, "k": a.k, "delta_k": value, "witness": witness, "dominating": value == 0}


def _cmd_certify(g: Graph, a: argparse.Namespace) -> Row:
    greedy = greedy_escape_certificate(g, a.k, a.greedy_work_limit)
    evasion = evasion_certificate(g, a.k, a.q, a.work_limit)
    return {
        "n": g.n,
        "k": a.k,
        "greedy": greedy.verdict,
        "greedy_S": greedy.S,
        "greedy_v": greedy.v,
        "evasion": evasion.verdict,
        "q": evasion.q,
        "dangerous": evasion.dangerous_count,
        "delta_k": evasion.delta_k,
    }


def _cmd_match(g: Graph, a: argparse.Namespace) -> Row:
    table = None
    if "optimal" in (a.cop_strategy, a.robber_strategy):
        table = solve_game(g, a.k, a.budget)
    if a.cop_strategy == "optimal":
        cops = OptimalCops(table)
    else:
        value, witness = delta_k(g, a.k, a.work_limit)
        if value:
            raise ValueError(f"graph has no dominating set of size {a.k}")
        cops = DominatingSetCops(witness)
    if a.robber_strategy == "optimal":
        robber = OptimalRobber(table)
    elif a.robber_strategy == "greedy":
        cert = greedy_escape_certificate(g, a.k, a.greedy_work_limit)
        if not cert.verdict:
            raise ValueError("greedy robber needs a positive greedy escape certificate")
        robber = GreedyRobber(GreedyContext.build(g, cert.S, cert.v))
    else:
        q = a.k + 1 if a.q is None else a.q
        robber = EvasionRobber(dangerous_vertices(g, a.k, q, a.work_limit))
    trace = play_match(g, a.k, cops, robber, a.max_rounds, a.seed)
    row = {
        "n": g.n,
        "k": a.k,
        "outcome": trace.outcome.value,
        "round": trace.round,
        "result": trace.describe(),
        "cop_placement": trace.cop_placement,
        "robber_placement": trace.robber_placement,
    }
    if a.trace:
        row["moves"] = [[list(c), r] for c, r in trace.rounds]
    return row


GRAPH_COMMANDS: dict[str, Callable[[Graph, argparse.Namespace], Row]] = {
    "solve": _cmd_solve,
    "copnumber": _cmd_copnumber,
    "dismantle": _cmd_dismantle,
    "dominate": _cmd_dominate,
    "certify": _cmd_certify,
    "match": _cmd_match,
}


def _run_on_line(line: str, a: argparse.Namespace) -> tuple[Row, int]:
    row: Row = {"graph": line}
    try:
        g = graph6_decode(line)
        row.update(GRAPH_COMMANDS[a.command](g, a))
        return row, EXIT_OK
    except BudgetExceeded as exc:
        row["error"] = f"budget exceeded: {exc}"
        return row, EXIT_BUDGET
    except (ValueError, CopwinError) as exc:
        row["error"] = str(exc)
        return row, EXIT_INVALID


def _graph_lines(a: argparse.Namespace) -> list[str]:
    sources = [x for x in (a.graph_pos, a.graph) if x is not None]
    if a.file is not None:
        sources.append(None)
    if len(sources) != 1:
        raise UsageError("give exactly one graph: positional graph6, --graph or --file")
    if a.file is None:
        return [sources[0]]
    with open(a.file, encoding="ascii") as fh:
        lines = [line.strip().removeprefix(">>graph6<<") for line in fh]
    lines = [x for x in lines if x]
    if not lines:
        raise UsageError(f"{a.file}: no graphs")
    return lines


def _graph_command(a: argparse.Namespace, err: TextIO) -> tuple[list[Row], int]:
    lines = _graph_lines(a)
    work = partial(_run_on_line, a=a)
    if a.workers > 1 and len(lines) > 1:
        with ProcessPoolExecutor(max_workers=a.workers) as pool:
            results = list(pool.map(work, lines))
    else:
        results = [work(line) for line in lines]
    code = max(c for _, c in results)
    if len(lines) == 1:
        row, c = results[0]
        if c != EXIT_OK:
            print(f"error: {row['graph']}: {row['error']}", file=err)
            return [], c
    return [r for r, _ in results], code


# -- experiment commands ------------------------------------------------------------


def _event(a: argparse.Namespace) -> EventSpec:
    return EventSpec(a.event, a.k)


def _cmd_enumerate(a: argparse.Namespace) -> list[Row]:
    e = _event(a)
    joint, total = enumerate_joint(a.n, [e], a.cap, a.workers)
    count = joint[(True,)]
    return [{"n": a.n, "event": str(e), "count": count, "total": total,
             "ratio": Fraction(count, total), "probability": count / total}]


def _cmd_estimate(a: argparse.Namespace) -> list[Row]:
    e = _event(a)
    est = estimate_probability(SamplerConfig(a.n, a.p, a.seed), e, a.trials, a.confidence, a.workers, a.budget)
    return [{"n": a.n, "p": a.p, "event": str(e), "seed": a.seed, "trials": est.trials,
             "successes": est.successes, "point": est.point, "ci_low": est.ci_low,
             "ci_high": est.ci_high, "failed": est.failed}]


def _cmd_formulas(a: argparse.Namespace) -> list[Row]:
    fm = kdom_first_moment(a.n, a.k)
    return [{"n": a.n, "k": a.k, "first_moment": fm.value, "first_moment_exact": fm.exact,
             "first_moment_log2": fm.log2, "labelled_count_log2": labelled_count_formula(a.n, a.k),
             "pair_domination_bound": float(pair_domination_bound(a.k))}]


def _cmd_sweep(a: argparse.Namespace) -> list[Row]:
    if a.n_min > a.n_max:
        raise ValueError(f"empty sweep: n-min {a.n_min} > n-max {a.n_max}")
    if a.mode == "estimate" and a.trials < 1:
        raise ValueError(f"sweep needs at least one trial, got {a.trials}")
    copwin, kdom = EventSpec(EventKind.KCOPWIN, a.k), EventSpec(EventKind.KDOM, a.k)
    rows = []
    for n in range(a.n_min, a.n_max + 1):
        fm = kdom_first_moment(n, a.k).value
        if a.mode == "exact":
            joint, total = enumerate_joint(n, [copwin, kdom], a.cap, a.workers)
            p_cw = sum(c for (cw, _), c in joint.items() if cw) / total
            p_kd = sum(c for (_, kd), c in joint.items() if kd) / total
            low = high = None
        else:
            cfg = SamplerConfig(n, 0.5, a.seed)
            est_cw = estimate_probability(cfg, copwin, a.trials, a.confidence, a.workers, a.budget)
            est_kd = estimate_probability(cfg, kdom, a.trials, a.confidence, a.workers, a.budget)
            p_cw, p_kd, low, high = est_cw.point, est_kd.point, est_cw.ci_low, est_cw.ci_high
        ratio = p_cw / fm if fm > 0 else math.inf
        rows.append({"n": n, "p_kcopwin": p_cw, "p_kdom": p_kd, "first_moment": fm,
                     "ratio_copwin_over_first_moment": ratio, "ci_low": low, "ci_high": high})
    return rows


EXPERIMENT_COMMANDS: dict[str, Callable[[argparse.Namespace], list[Row]]] = {
    "enumerate": _cmd_enumerate,
    "estimate": _cmd_estimate,
    "formulas": _cmd_formulas,
    "sweep": _cmd_sweep,
}
SEEDED = {"match", "estimate", "sweep"}


# -- argument parsing ------------------------------------------------------------


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {value}")
    return value


def _confidence(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {value}")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("human", "json", "csv"), default=None,
                        help="output format (default: human; csv for sweep)")
    common.add_argument("--record", metavar="PATH", default=None,
                        help=f"append a JSONL run record to PATH (default: ${RECORD_ENV} if set)")
    common.add_argument("--workers", type=_positive, default=1, help="worker processes (default 1)")

    graph_in = _Parser(add_help=False)
    graph_in.add_argument("graph_pos", nargs="?", metavar="GRAPH6", help="graph in graph6 format")
    graph_in.add_argument("--graph", help="graph in graph6 format")
    graph_in.add_argument("--file", help="file with one graph6 string per line (batch mode)")

    k_arg = _Parser(add_help=False)
    k_arg.add_argument("--k", type=_positive, default=1, help="number of cops / set size (default 1)")

    budget = _Parser(add_help=False)
    budget.add_argument("--budget", type=_positive, default=DEFAULT_STATE_BUDGET,
                        help=f"solver state budget (default {DEFAULT_STATE_BUDGET})")
    work = _Parser(add_help=False)
    work.add_argument("--work-limit", type=_positive, default=DEFAULT_WORK_LIMIT,
                      help=f"k-set enumeration limit (default {DEFAULT_WORK_LIMIT})")
    work.add_argument("--greedy-work-limit", type=_positive, default=GREEDY_WORK_LIMIT,
                      help=f"greedy certificate work limit (default {GREEDY_WORK_LIMIT})")
    seed = _Parser(add_help=False)
    seed.add_argument("--seed", type=_seed, default=None,
                      help="RNG seed; a fresh one is generated and printed to stderr if omitted")
    event = _Parser(add_help=False)
    event.add_argument("--n", type=_positive, required=True, help="number of vertices")
    event.add_argument("--event", choices=[e.value for e in EventKind], required=True)
    conf = _Parser(add_help=False)
    conf.add_argument("--confidence", type=_confidence, default=0.95, help="Wilson level (default 0.95)")
    cap = _Parser(add_help=False)
    cap.add_argument("--cap", type=_positive, default=ENUMERATION_CAP,
                     help=f"largest n to enumerate (default {ENUMERATION_CAP}; 7 is the hard limit)")

    parser = _Parser(prog="copwin", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text, parents):
        return sub.add_parser(name, help=help_text, description=help_text, parents=[common, *parents])

    add("solve", "decide whether k cops win, with capture time and a winning placement",
        [graph_in, k_arg, budget])
    add("copnumber", "exact cop number", [graph_in, budget])
    add("dismantle", "corner-deletion order and dismantlability", [graph_in])
    add("dominate", "delta_k (vertices left undominated by the best k-set) and a witness",
        [graph_in, k_arg, work])
    p = add("certify", "robber-strategy certificates: greedy escape and evasion", [graph_in, k_arg, work])
    p.add_argument("--q", type=_positive, default=None, help="evasion threshold (default k+1)")
    p = add("match", "play one match between cop and robber strategies", [graph_in, k_arg, budget, work, seed])
    p.add_argument("--cop-strategy", choices=("optimal", "domset"), default="optimal")
    p.add_argument("--robber-strategy", choices=("optimal", "greedy", "evasion"), default="optimal")
    p.add_argument("--max-rounds", type=_nonnegative, default=1000)
    p.add_argument("--q", type=_positive, default=None, help="evasion threshold (default k+1)")
    p.add_argument("--trace", action="store_true", help="include every round's positions")
    add("enumerate", "exact count of labelled graphs with an event", [event, k_arg, cap])
    p = add("estimate", "Monte Carlo estimate of an event's probability in G(n,p)",
            [event, k_arg, seed, conf, budget])
    p.add_argument("--p", type=_probability, default=0.5, help="edge probability (default 0.5)")
    p.add_argument("--trials", type=_positive, default=10_000)
    p = add("formulas", "first moment and labelled-count formulas at p = 1/2", [k_arg])
    p.add_argument("--n", type=_positive, required=True)
    p = add("sweep", "P(k-cop-win), P(k-dom) and first moment over a range of n at p = 1/2 (plot CSV)",
            [k_arg, seed, conf, budget, cap])
    p.add_argument("--n-min", type=_positive, required=True)
    p.add_argument("--n-max", type=_positive, required=True)
    p.add_argument("--mode", choices=("exact", "estimate"), default="exact")
    p.add_argument("--trials", type=_nonnegative, default=10_000)
    return parser


# -- driver ------------------------------------------------------------------------


def _params(a: argparse.Namespace) -> dict[str, Any]:
    skip = {"format", "record", "graph_pos"}
    params = {k: v for k, v in vars(a).items() if k not in skip}
    if a.command in GRAPH_COMMANDS and a.graph_pos is not None:
        params["graph"] = a.graph_pos
    return params


def _append_record(path: str, a: argparse.Namespace, duration: float, rows: list[Row], code: int) -> None:
    record = {
        "command": a.command,
        "params": _params(a),
        "version": __version__,
        "duration_s": duration,
        "exit_code": code,
        "result": _plain(rows),
    }
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_INVALID
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    if a.command in SEEDED and a.seed is None and getattr(a, "mode", "estimate") == "estimate":
        a.seed = secrets.randbits(64)
        print(f"seed: {a.seed}", file=err)

    start = time.perf_counter()
    try:
        if a.command in GRAPH_COMMANDS:
            rows, code = _graph_command(a, err)
        else:
            rows, code = EXPERIMENT_COMMANDS[a.command](a), EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=err)
        return EXIT_BUDGET
    except (ValueError, CopwinError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    duration = time.perf_counter() - start

    if rows:
        fmt = a.format or ("csv" if a.command == "sweep" else "human")
        if a.command == "sweep" and fmt == "csv":
            out.write(emit_plot_data(rows))
        else:
            out.write(format_rows(rows, fmt))
    record = a.record or os.environ.get(RECORD_ENV)
    if record:
        _append_record(record, a, duration, rows, code)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
