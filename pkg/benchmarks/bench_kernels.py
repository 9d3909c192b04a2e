"""Compiled vs pure-Python kernels on recorded workloads.

Records every ``orbit`` / ``has_cycle`` call made while minimizing and
building characteristic samples for a few family languages, then replays
the calls on each backend.

    python3 benchmarks/bench_kernels.py [--repeat N] [--family counter -k 3]
"""
import argparse
import time

from hdcw import _orbit_py, kernels
from hdcw.canonical import idealized_learn
from hdcw.families import FamilySpec, make
from hdcw.oracle import build_oracle
from hdcw.samples import charsample


def record(specs):
    calls = []
    orbit, has_cycle = kernels.orbit, kernels.has_cycle

    def rec_orbit(start, maps, cap=None, plus=False, impl=None):
        calls.append(("orbit", (start, maps, cap, plus)))
        return orbit(start, maps, cap, plus, impl)

    def rec_cycle(rows, colmap, loc, impl=None):
        calls.append(("has_cycle", (rows, colmap, loc)))
        return has_cycle(rows, colmap, loc, impl)

    kernels.orbit, kernels.has_cycle = rec_orbit, rec_cycle
    try:
        for spec in specs:
            o = build_oracle(make(spec))
            idealized_learn(o)
            charsample(o)
    finally:
        kernels.orbit, kernels.has_cycle = orbit, has_cycle
    return calls


def replay(calls, impl, repeat):
    totals = {"orbit": 0.0, "has_cycle": 0.0}
    for _ in range(repeat):
        for name, args in calls:
            t = time.perf_counter()
            if name == "orbit":
                kernels.orbit(*args, impl=impl)
            else:
                kernels.has_cycle(*args, impl=impl)
            totals[name] += time.perf_counter() - t
    return {k: v / repeat for k, v in totals.items()}


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--family", default="counter")
    p.add_argument("-k", type=int, default=3)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    specs = [FamilySpec(args.family, args.k), FamilySpec("astart")]
    calls = record(specs)
    n_orbit = sum(1 for c in calls if c[0] == "orbit")
    print("workload: %s, %d orbit calls, %d has_cycle calls" % (
        ", ".join(s.name for s in specs), n_orbit, len(calls) - n_orbit))
    if kernels._compiled is None:
        print("compiled extension not available; only the fallback is timed")
    backends = [("python", _orbit_py)] + ([("cython", kernels._compiled)] if kernels._compiled else [])
    results = {}
    for name, impl in backends:
        results[name] = replay(calls, impl, args.repeat)
        r = results[name]
        print("%-7s orbit %8.3f ms   has_cycle %8.3f ms" % (name, 1e3 * r["orbit"], 1e3 * r["has_cycle"]))
    if len(results) == 2:
        for kind in ("orbit", "has_cycle"):
            print("speedup %-9s %.1fx" % (kind, results["python"][kind] / max(results["cython"][kind], 1e-9)))


if __name__ == "__main__":
    main()
