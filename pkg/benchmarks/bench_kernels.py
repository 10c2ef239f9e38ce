#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure-Python fallback.

Times the two hot paths behind the library: the CHSH objective (and the
simplex search built on it) and the Dykstra feasibility loop.  Run from
the repository root:

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from chshlab._kernels import available_backends, load_backend
from chshlab.chsh import chsh_operator
from chshlab.entanglement import CanonicalAngles, canonical_setting


def _timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        n = fn()
        best = min(best, (time.perf_counter() - t0) / n)
    return best


def bench_backend(impl, repeat):
    angles = CanonicalAngles(theta=1.2, phi=0.9)
    s = np.ascontiguousarray(chsh_operator(canonical_setting(angles)).real.ravel())
    rng = np.random.default_rng(7)
    xs = rng.uniform(0.0, 2 * np.pi, size=(2000, 6))

    def objective():
        for x in xs:
            impl.chsh_objective(s, 0.3, x)
        return len(xs)

    def maximize():
        for x in xs[:20]:
            impl.maximize_chsh(s, 0.3, x)
        return 20

    m = np.array([1.0, 0.0, 0.0, 0.75])
    n = np.array([1.0, 0.75, 0.0, 0.0])  # incompatible pair: full plateau run
    x0 = (m + n) / 2 - np.array([0.5, 0.0, 0.0, 0.0])

    def dykstra():
        for _ in range(20):
            impl.dykstra_feasibility(m, n, x0, 1e-9, 200_000)
        return 20

    return {
        "chsh_objective": _timeit(objective, repeat),
        "maximize_chsh": _timeit(maximize, repeat),
        "dykstra_feasibility": _timeit(dykstra, repeat),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    results = {name: bench_backend(load_backend(name), args.repeat) for name in backends}

    width = max(len(k) for k in next(iter(results.values())))
    header = f"{'kernel':<{width}}" + "".join(f"  {b:>14}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>9}"
    print(header)
    for kernel in results[backends[0]]:
        row = f"{kernel:<{width}}"
        for b in backends:
            row += f"  {results[b][kernel] * 1e6:>12.2f}us"
        if len(backends) == 2:
            ratio = results["python"][kernel] / results["compiled"][kernel]
            row += f"  {ratio:>8.1f}x"
        print(row)
    if len(backends) == 1:
        print("\ncompiled extension not built; showing pure-Python timings only")


if __name__ == "__main__":
    main()
