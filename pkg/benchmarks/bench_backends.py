"""Numba kernels against the pure-numpy fallback.

Times the baseline and optimized solvers on generated games with both
backends and checks that they return the same regions and outer iteration
counts.  The first numba call per kernel is a warm-up and is not timed.

    python benchmarks/bench_backends.py
    python benchmarks/bench_backends.py --repeat 5 --json out.json
"""

import argparse
import json
import statistics
import time

from fpiter import GeneratorSpec, SolverConfig, generate, solve

SPECS = ["ladder 2", "ladder 4", "ladder 6", "jurdzinski 3 3", "jurdzinski 5 3",
         "random 50 6 1 3 1", "random 200 8 2 4 2"]


def time_solve(g, cfg, backend, repeat):
    times = []
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = solve(g, cfg, backend)
        times.append(time.perf_counter() - t0)
    return statistics.median(times) * 1000.0, result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", help="also write the rows as JSON")
    parser.add_argument("specs", nargs="*", default=SPECS, help="generator specs, quoted")
    args = parser.parse_args(argv)

    warm = generate(GeneratorSpec.parse("ladder 1".split()))
    for cfg in SolverConfig.variants().values():
        solve(warm, cfg, "numba")

    rows = []
    print(f"{'spec':22} {'variant':10} {'outer':>8} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for text in args.specs:
        g = generate(GeneratorSpec.parse(text.split()))
        for name in ("baseline", "all"):
            cfg = SolverConfig.variants()[name]
            t_nb, r_nb = time_solve(g, cfg, "numba", args.repeat)
            t_np, r_np = time_solve(g, cfg, "numpy", args.repeat)
            assert r_nb.w_even == r_np.w_even
            assert r_nb.stats.outer_iterations == r_np.stats.outer_iterations
            row = {"spec": text, "variant": name, "outer": r_nb.stats.outer_iterations,
                   "numba_ms": t_nb, "numpy_ms": t_np, "speedup": t_np / max(t_nb, 1e-9)}
            rows.append(row)
            print(f"{text:22} {name:10} {row['outer']:>8} {t_nb:>10.2f} {t_np:>10.2f} {row['speedup']:>7.1f}x")
    if args.json:
        with open(args.json, "w") as f:
            json.dump(rows, f, indent=2)


if __name__ == "__main__":
    main()
