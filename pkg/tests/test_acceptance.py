"""Acceptance criteria, one test each.

The corpus-wide criteria share a single sweep over the exhaustive corpus and
the seeded random games; each check keeps its own timer.  Every test logs a
PASS/FAIL line that is printed in the terminal summary.
"""

import time
from collections import defaultdict

import numpy as np
import pytest

from fpiter import ExtractionStuck, SolverConfig, Timestamp, brute_solve, reference_solve, solve
from fpiter import solve_with_snapshots, solve_with_strategies
from fpiter.core import iteration_bound, run_driver
from fpiter.generators import jurdzinski, ladder
from fpiter.oracles import PayoffTable, verify_positional
from fpiter.strategy import record_run

from conftest import E, O
from corpus import corpus_size, exhaustive_games, random_corpus

FIVE_MIN = 300.0


def log(acceptance_log, name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    acceptance_log.append(line)
    print(line)


class Sweep:
    def __init__(self):
        self.time = defaultdict(float)
        self.fail = defaultdict(list)
        self.games = 0
        self.solves = 0

    def timed(self, key, fn, *args):
        t0 = time.perf_counter()
        try:
            return fn(*args)
        finally:
            self.time[key] += time.perf_counter() - t0

    def bad(self, key, g, msg):
        if len(self.fail[key]) < 5:
            self.fail[key].append(f"{g.node_tuples()}: {msg}")
        else:
            self.fail[key].append(None)

    def check_regions(self, g):
        r = solve(g)
        b, z = brute_solve(g), reference_solve(g)
        if not (r.w_even == b.w_even == z.w_even):
            self.bad(2, g, f"fpiter {list(r.w_even)} brute {list(b.w_even)} ref {list(z.w_even)}")
        return z.w_even

    def check_payoff(self, g, w_even):
        table = PayoffTable(g)
        full = [g.n] * g.d
        for v in range(g.n):
            if table.even_wins(v, full) != (v in w_even):
                self.bad(4, g, f"node {v}")

    def check_strategies(self, g):
        try:
            r = solve_with_strategies(g)
        except ExtractionStuck as e:
            self.bad(5, g, f"stuck: {e}")
            return
        for p, region, sigma in ((E, r.w_even, r.strategy_even), (O, r.w_odd, r.strategy_odd)):
            verdict = verify_positional(g, p, sigma, region)
            if not verdict:
                self.bad(5, g, f"{p.name}: {verdict.reason}")

    def check_variants(self, g, w_even):
        outer = {}
        for name, cfg in SolverConfig.variants().items():
            r = solve(g, cfg)
            self.check_accounting(g, r.stats.outer_iterations)
            outer[name] = r.stats.outer_iterations
            if r.w_even != w_even:
                self.bad(6, g, f"{name} regions differ")
        if outer["all"] > outer["baseline"]:
            self.bad(6, g, f"optimized {outer['all']} > baseline {outer['baseline']}")
        a = run_driver(g, SolverConfig(log_snapshots=True))
        b = run_driver(g, SolverConfig(log_snapshots=True, cache_modal_parts=True))
        same = a.stamps == b.stamps and all(np.array_equal(s.bank[0], t.bank[0])
                                            for s, t in zip(a.snapshots, b.snapshots))
        if not same:
            self.bad(6, g, "cached X_0 trace differs")
        for out in (a, b):
            if any(not y > x for x, y in zip(out.stamps, out.stamps[1:])):
                self.bad(9, g, "count did not increase")
            self.check_accounting(g, out.outer)

    def check_accounting(self, g, outer):
        self.solves += 1
        if outer > iteration_bound(g):
            self.bad(9, g, f"{outer} evaluations > (n+1)^d")

    def run(self, games):
        for g in games:
            self.games += 1
            w = self.timed(2, self.check_regions, g)
            self.timed(4, self.check_payoff, g, w)
            self.timed(5, self.check_strategies, g)
            self.timed(6, self.check_variants, g, w)


def _games():
    yield from exhaustive_games()
    yield from random_corpus(1000, max_nodes=8, max_d=4, seed=2024)


@pytest.fixture(scope="module")
def sweep():
    s = Sweep()
    t0 = time.perf_counter()
    s.run(_games())
    # decoding and building the games counts towards the region check
    s.time[2] += time.perf_counter() - t0 - sum(s.time.values())
    return s


def _corpus_result(acceptance_log, sweep, key, name, limit=None):
    fails = sweep.fail[key]
    elapsed = sweep.time[key]
    ok = not fails and (limit is None or elapsed < limit)
    shown = [f for f in fails if f is not None]
    detail = f"{sweep.games} games, {len(fails)} mismatches, {elapsed:.1f} s"
    log(acceptance_log, name, ok, detail)
    assert not fails, shown
    if limit is not None:
        assert elapsed < limit


def test_c1_example_golden_trace(e1, acceptance_log):
    t0 = time.perf_counter()
    r = solve(e1)
    _, snaps = solve_with_snapshots(e1)
    first = snaps[0]
    _, stacks, _ = record_run(e1)
    seq = [(list(d.stamp), d.target) for d in stacks[0]]
    want = [([0, 0, 0, 0, 1], 2), ([0, 0, 1, 1, 1], 1), ([0, 1, 0, 0, 1], 2)]
    idx = [seq.index(w) if w in seq else -1 for w in want]
    sigma = solve_with_strategies(e1).strategy_even
    elapsed = time.perf_counter() - t0
    checks = {
        "regions": r.w_even == {0, 1, 2, 3, 4},
        "first evaluation": first.stamp == Timestamp([0, 0, 0, 0, 1]) and first.x(0) == {0, 1, 3, 4},
        "decisions 2,1,2": min(idx) >= 0 and idx == sorted(idx),
        "sigma(0)=1": sigma.get(0) == 1,
        "under 1 s": elapsed < 1.0,
    }
    bad = [k for k, ok in checks.items() if not ok]
    log(acceptance_log, "1 E1 golden trace", not bad, f"{elapsed * 1000:.0f} ms" + (f", failed {bad}" if bad else ""))
    assert not bad


def test_c2_region_oracles(sweep, acceptance_log):
    assert corpus_size() == 557406
    _corpus_result(acceptance_log, sweep, 2, "2 regions agree with brute force and Zielonka", FIVE_MIN)


def test_c3_snapshot_payoff_conformance(acceptance_log):
    t0 = time.perf_counter()
    cfg = SolverConfig(full_iteration_mode=True)
    mismatches = checked = 0
    for g in random_corpus(200, max_nodes=4, max_d=3, seed=31):
        table = PayoffTable(g)
        _, snaps = solve_with_snapshots(g, cfg)
        for s in snaps:
            for v in range(g.n):
                h = int(g.priority[v])
                checked += 1
                if bool(s.bank[h, v]) != table.even_wins(v, s.stamp):
                    mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < FIVE_MIN
    log(acceptance_log, "3 snapshots match the credit game", ok,
        f"200 games, {checked} checks, {mismatches} mismatches, {elapsed:.1f} s")
    assert ok


def test_c4_full_credit_payoff(sweep, acceptance_log):
    _corpus_result(acceptance_log, sweep, 4, "4 full-credit game winner equals parity winner")


def test_c5_strategy_soundness(sweep, acceptance_log):
    _corpus_result(acceptance_log, sweep, 5, "5 extracted strategies verify")


def test_c6_variant_equivalence(sweep, acceptance_log):
    _corpus_result(acceptance_log, sweep, 6, "6 variants agree, cached X_0 trace bit-exact")


def test_c7_generator_shapes(acceptance_log):
    want = {("ladder", 8): (40, 85, 27), ("ladder", 10): (50, 107, 33), ("ladder", 12): (60, 129, 39),
            ("ladder", 14): (70, 151, 45), ("jurdzinski", 5): (51, 121, 13),
            ("jurdzinski", 6): (60, 143, 15), ("jurdzinski", 7): (69, 165, 17)}
    got = {}
    for (fam, n) in want:
        g = ladder(n) if fam == "ladder" else jurdzinski(n, 3)
        got[(fam, n)] = (g.n, g.e, g.index)
    bad = {k: v for k, v in got.items() if v != want[k]}
    log(acceptance_log, "7 generator shapes", not bad, "7 fixtures" + (f", wrong {bad}" if bad else ""))
    assert not bad


def test_c8_ladder_blowup(acceptance_log):
    outer, times = {}, {}
    for n in (8, 10, 12):
        t0 = time.perf_counter()
        outer[n] = solve(ladder(n)).stats.outer_iterations
        times[n] = time.perf_counter() - t0
    ok = all(outer[n + 2] >= 2 * outer[n] for n in (8, 10)) and max(times.values()) < 600
    detail = ", ".join(f"n={n}: {outer[n]} ({times[n]:.2f} s)" for n in outer)
    log(acceptance_log, "8 baseline outer iterations at least double", ok, detail)
    assert ok


def test_c9_accounting(sweep, acceptance_log):
    fails = sweep.fail[9]
    log(acceptance_log, "9 strictly increasing count, (n+1)^d bound", not fails,
        f"{sweep.solves} runs, {len(fails)} violations")
    assert not fails, [f for f in fails if f is not None]
