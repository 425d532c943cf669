"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Times the optimizer's grid phase (19 x 19 probabilities x the unique
epsilon rows at N = 1e9), a batch of single-point evaluations, and
exhaustive GF(2^16) multiplication.
"""

import argparse
import math
import time

import numpy as np

from finitekey import _pykernels, kernels
from finitekey.chsh import ChannelObservation
from finitekey.core import binary_entropy
from finitekey.optimize import OptimizationProblem, _grid


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads():
    problem = OptimizationProblem(10 ** 9, ChannelObservation(qber=0.02))
    pa, pb, rows = _grid(problem)
    eps_rows = np.array([eps for eps, _ in rows])
    c, h = problem.observation.chsh, binary_entropy(0.02)
    grid_args = (problem.n_signals, pa, pb, eps_rows, c, 1.2, h, 1e-10, False)
    points = [(10 ** 9, 0.9 + 0.09 * k / 999, 0.95, 3e-6, 3e-6, 4e-6 - 1e-10,
               c, 1.2, h, 1e-10, False) for k in range(1000)]
    modulus = (1 << 16) | 0b101011
    rs = list(range(1 << 16))
    xs = [0x1D2C] * len(rs)
    evals = len(pa) * len(pb) * len(rows)
    return [
        (f"rate_grid ({evals} points)",
         lambda b: b.rate_grid(*grid_args)),
        ("rate_point x1000",
         lambda b: [b.rate_point(*p) for p in points]),
        ("gf2_mulmod_many GF(2^16) x65536",
         lambda b: b.gf2_mulmod_many(rs, xs, modulus, 16)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if kernels.compiled_backend is None:
        raise SystemExit("compiled extension not built; nothing to compare")
    print(f"{'workload':36} {'cython':>10} {'python':>10} {'speedup':>8}")
    for name, fn in workloads():
        t_c = best_of(lambda: fn(kernels.compiled_backend), args.repeat)
        t_p = best_of(lambda: fn(_pykernels), args.repeat)
        speedup = t_p / t_c if t_c > 0 else math.inf
        print(f"{name:36} {t_c * 1e3:9.2f}ms {t_p * 1e3:9.2f}ms {speedup:7.1f}x")


if __name__ == "__main__":
    main()
