"""Time the numba and numpy kernel backends against each other.

    python3 benchmarks/bench_kernels.py [--spins 20] [--reads 200] [--repeat 3]

Both backends must give identical results; the script checks that before
reporting timings.
"""

import argparse
import itertools
import time

import numpy as np

from parity_anneal import _kernels
from parity_anneal.embedding import build_original, embed_problem, place_plaquette
from parity_anneal.ising import IsingHamiltonian, all_energies
from parity_anneal.parity import quadratize, single_plaquette
from parity_anneal.pegasus import generate_pegasus
from parity_anneal.sampler import SAParams, simulated_anneal


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spins", type=int, default=20, help="size of the enumeration benchmark")
    ap.add_argument("--reads", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    n = args.spins
    dense = IsingHamiltonian(n, {k: rng.normal() for r in (1, 2) for k in itertools.combinations(range(n), r)})

    g = generate_pegasus(3)
    _, t = build_original(g)
    c = single_plaquette("square")
    problem = embed_problem(quadratize(c), place_plaquette(g, t, c))
    params = SAParams(num_reads=args.reads)

    jobs = {
        f"enumerate 2^{n} energies": lambda: all_energies(dense),
        f"anneal {args.reads} reads x {params.num_temps * params.sweeps_per_temp} sweeps": lambda: simulated_anneal(
            problem.hamiltonian, params, 0, problem.nodes
        ).samples,
    }
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    results = {}
    for name in backends:
        _kernels.set_backend(name)
        for job, fn in jobs.items():
            fn()  # compile / warm caches
            results[name, job] = best_of(fn, args.repeat)

    print(f"{'job':<40} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for job in jobs:
        row = [results[b, job][0] for b in backends]
        speed = f"{row[0] / row[-1]:8.1f}x" if len(row) > 1 else "       -"
        print(f"{job:<40} " + " ".join(f"{v:9.3f}s" for v in row) + f"  {speed}")
        if len(backends) > 1:
            a, b = (results[x, job][1] for x in backends)
            if not np.array_equal(a, b):
                raise SystemExit(f"backends disagree on {job!r}")


if __name__ == "__main__":
    main()
