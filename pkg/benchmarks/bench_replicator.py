"""Compare the compiled and pure-Python replicator integrators.

Usage: python benchmarks/bench_replicator.py [--sizes 3 5 8] [--horizon 200] [--repeat 3]
"""

import argparse
import time

import numpy as np

from coevolve import _replicator_py

try:
    from coevolve import _replicator
except ImportError:  # extension not built
    _replicator = None


def run(impl, b, x0, horizon, repeat):
    best = float("inf")
    steps = 0
    for _ in range(repeat):
        t0 = time.perf_counter()
        times, _ = impl.integrate(b, x0, horizon)
        best = min(best, time.perf_counter() - t0)
        steps = len(times)
    return best, steps


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--sizes", type=int, nargs="+", default=[3, 5, 8, 12])
    p.add_argument("--horizon", type=float, default=200.0)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'types':>5} {'steps':>7} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8} {'max diff':>9}")
    for n in args.sizes:
        b = rng.normal(size=(n, n))
        b = b - b.T  # zero-sum: long oscillating trajectories
        x0 = rng.dirichlet(np.ones(n))
        tp, steps = run(_replicator_py, b, x0, args.horizon, args.repeat)
        if _replicator is None:
            print(f"{n:>5} {steps:>7} {tp:>11.4f} {'n/a':>11} {'n/a':>8} {'n/a':>9}")
            continue
        tc, _ = run(_replicator, b, x0, args.horizon, args.repeat)
        diff = np.abs(_replicator_py.integrate(b, x0, args.horizon)[1][-1]
                      - _replicator.integrate(b, x0, args.horizon)[1][-1]).max()
        print(f"{n:>5} {steps:>7} {tp:>11.4f} {tc:>11.4f} {tp / tc:>7.1f}x {diff:>9.1e}")


if __name__ == "__main__":
    main()
