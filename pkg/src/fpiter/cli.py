"""Command-line front end.

Exit codes: 0 success, 2 unreadable or malformed input, 3 verification
failure, 4 resource limit.  ``bench`` exits 1 when every entry failed.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from pathlib import Path
from typing import Optional

from . import _kernels as K
from .core import SolverConfig, solve
from .errors import GameError, InvalidSpec, ResourceLimit
from .game import ParityGame, Player
from .generators import GeneratorSpec, generate
from .oracles import brute_solve, reference_solve, verify_positional
from .pgsolver import parse_pgsolver, parse_solution, write_pgsolver, write_solution
from .strategy import extract_strategies, record_run, solve_with_strategies, trace_records

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_VERIFY = 3
EXIT_LIMIT = 4

SOLVERS = ("fpiter", "fpiter-opt", "brute", "reference")
# brute force is only attempted by --check below this size
CHECK_BRUTE_MAX_NODES = 12


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {e.strerror}") from None


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_game(path: str) -> ParityGame:
    try:
        return parse_pgsolver(_read(path))
    except GameError as e:
        raise CliError(EXIT_PARSE, f"{path}: {e}") from None


def run_solver(g: ParityGame, solver: str, strategies: bool, backend=None):
    if solver == "fpiter":
        if strategies:
            return solve_with_strategies(g, backend=backend)
        return solve(g, SolverConfig.baseline(), backend=backend)
    if solver == "fpiter-opt":
        result = solve(g, SolverConfig.optimized(), backend=backend)
        if strategies:
            # the optimised loop records no decisions; a recording run supplies them
            rec, stacks, _ = record_run(g, backend=backend)
            t0 = time.perf_counter()
            result.strategy_even, result.strategy_odd = extract_strategies(g, stacks, (rec.w_even, rec.w_odd))
            result.stats.wall_time += rec.stats.wall_time + time.perf_counter() - t0
            result.stats.solver_variant += "+strategies"
        return result
    t0 = time.perf_counter()
    result = brute_solve(g) if solver == "brute" else reference_solve(g)
    result.stats.wall_time = time.perf_counter() - t0
    if not strategies:
        result.strategy_even, result.strategy_odd = {}, {}
    return result


def check_solution(g: ParityGame, winner: list, strategy: dict) -> list[str]:
    """Problems with a claimed solution, first offending node first."""
    if len(winner) != g.n:
        return [f"solution lists {len(winner)} nodes but the game has {g.n}"]
    ref = reference_solve(g)
    for v in range(g.n):
        if winner[v] != ref.winner(v):
            return [f"node {v}: solution claims {Player(winner[v]).name.lower()}, "
                    f"but {ref.winner(v).name.lower()} wins it"]
    problems = []
    for player in Player:
        region = {v for v in range(g.n) if winner[v] == player}
        sigma = {v: w for v, w in strategy.items() if v in region and g.owner[v] == int(player)}
        if not sigma:
            continue
        verdict = verify_positional(g, player, sigma, region)
        if not verdict:
            problems.append(f"{player.name.lower()} strategy: {verdict.reason}")
    return problems


def cmd_solve(args) -> int:
    g = _load_game(args.game)
    result = run_solver(g, args.solver, args.strategies, args.backend)
    text = write_solution(result)
    if args.check:
        sol = parse_solution(text)
        problems = check_solution(g, sol.winner, sol.strategy)
        if not problems and g.n <= CHECK_BRUTE_MAX_NODES:
            try:
                brute = brute_solve(g)
            except ResourceLimit:
                brute = None
            if brute is not None and brute.w_even != result.w_even:
                problems.append("regions disagree with brute-force enumeration")
        if problems:
            for p in problems:
                print(p, file=sys.stderr)
            return EXIT_VERIFY
    _write(args.output, text)
    if args.stats:
        stats = result.stats.to_json()
        stats.update(nodes=g.n, edges=g.e, index=g.index)
        Path(args.stats).write_text(json.dumps(stats, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _load_game(args.game)
    try:
        sol = parse_solution(_read(args.solution))
    except GameError as e:
        raise CliError(EXIT_PARSE, f"{args.solution}: {e}") from None
    problems = check_solution(g, sol.winner, sol.strategy)
    if problems:
        for p in problems:
            print(p)
        return EXIT_VERIFY
    print(f"ok: {g.n} nodes, regions and strategies verified")
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        spec = GeneratorSpec.parse([args.family, *args.params])
        g = generate(spec)
    except InvalidSpec as e:
        raise CliError(EXIT_PARSE, str(e)) from None
    _write(args.output, write_pgsolver(g))
    return EXIT_OK


def bench_entry(spec: GeneratorSpec, solver: str, repeat: int, backend=None) -> dict:
    g = generate(spec)
    times = []
    outer = None
    for _ in range(repeat):
        result = run_solver(g, solver, False, backend)
        times.append(result.stats.wall_time * 1000.0)
        outer = result.stats.outer_iterations if solver.startswith("fpiter") else None
    return {"family": spec.family, "params": list(spec.params), "nodes": g.n, "edges": g.e,
            "index": g.index, "solver_variant": solver, "outer_iterations": outer,
            "wall_time_ms": statistics.median(times)}


def cmd_bench(args) -> int:
    if args.repeat < 1:
        raise CliError(EXIT_PARSE, "--repeat must be at least 1")
    records = []
    failures = 0
    for line in _read(args.specs).splitlines():
        words = line.split("#", 1)[0].split()
        if not words:
            continue
        try:
            spec = GeneratorSpec.parse(words)
            records.append(bench_entry(spec, args.solver, args.repeat, args.backend))
        except (InvalidSpec, ResourceLimit) as e:
            failures += 1
            records.append({"spec": " ".join(words), "error": f"{type(e).__name__}: {e}"})
    _write(args.out, json.dumps(records, indent=2) + "\n")
    return EXIT_FAIL if records and failures == len(records) else EXIT_OK


def cmd_trace(args) -> int:
    g = _load_game(args.game)
    result, stacks, events = record_run(g, backend=args.backend, snapshot_budget=args.budget)
    lines = trace_records(events, result.stats.final_count, result.stats)
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fpiter", description="Parity games by fixpoint iteration.")
    sub = parser.add_subparsers(dest="command", required=True)

    def backend_opt(p):
        p.add_argument("--backend", choices=K.BACKENDS, default=None,
                       help="kernel backend (default: numba when available)")

    p = sub.add_parser("solve", help="solve a PGSolver game")
    p.add_argument("game")
    p.add_argument("-o", "--output", help="solution file (default: stdout)")
    p.add_argument("--solver", choices=SOLVERS, default="fpiter")
    p.add_argument("--strategies", action="store_true", help="also extract positional strategies")
    p.add_argument("--stats", metavar="PATH", help="write solver statistics as JSON")
    p.add_argument("--check", action="store_true", help="verify the result before writing it")
    backend_opt(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution file against a game")
    p.add_argument("game")
    p.add_argument("solution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="write a generated game in PGSolver format")
    p.add_argument("family", choices=("ladder", "jurdzinski", "random"))
    p.add_argument("params", nargs="*",
                   help="ladder N | jurdzinski N WIDTH | random N D MIN_DEG MAX_DEG SEED")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="time solvers on a list of generator specs")
    p.add_argument("specs", help="file with one spec per line, e.g. 'ladder 8'")
    p.add_argument("--solver", choices=SOLVERS, default="fpiter")
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--out", help="JSON output (default: stdout)")
    backend_opt(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("trace", help="dump recorded strategy decisions as JSON lines")
    p.add_argument("game")
    p.add_argument("--out")
    p.add_argument("--budget", type=int, default=None, help="maximum number of logged evaluations")
    backend_opt(p)
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except ResourceLimit as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
