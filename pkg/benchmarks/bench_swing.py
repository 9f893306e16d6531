"""Benchmark the swing-integration kernels: compiled extension vs pure numpy.

Usage: python3 benchmarks/bench_swing.py [--repeat N]
"""

import argparse
import time

import numpy as np

from coifreq.sim import _swing_py

try:
    from coifreq.sim import _swing_cy
except ImportError:
    _swing_cy = None


def make_case(n_machines, n_steps, seed=0):
    rng = np.random.default_rng(seed)
    coupling = np.abs(rng.normal(size=(n_machines, n_machines))) * 5e4
    coupling = coupling + coupling.T
    np.fill_diagonal(coupling, 0.0)
    return dict(
        df0=np.zeros(n_machines),
        delta0=np.zeros(n_machines),
        p=rng.normal(scale=200.0, size=n_machines),
        m=rng.uniform(3000.0, 9000.0, size=n_machines),
        d=np.full(n_machines, 20.0),
        coupling=coupling,
        dt=0.001,
        n_steps=n_steps,
    )


def run(kernel, case, repeat):
    args = (
        case["df0"], case["delta0"], case["p"], case["m"],
        case["d"], case["coupling"], case["dt"], case["n_steps"],
    )
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = kernel.integrate_swing(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    cases = [(3, 1_500), (3, 100_000), (10, 100_000), (30, 100_000)]
    print(f"{'machines':>9} {'steps':>8} {'numpy (s)':>10} {'compiled (s)':>13} {'speedup':>8}")
    for n, steps in cases:
        case = make_case(n, steps)
        t_py, out_py = run(_swing_py, case, args.repeat)
        if _swing_cy is None:
            print(f"{n:>9} {steps:>8} {t_py:>10.4f} {'unavailable':>13} {'-':>8}")
            continue
        t_cy, out_cy = run(_swing_cy, case, args.repeat)
        max_dev = float(np.max(np.abs(np.asarray(out_cy[0]) - out_py[0])))
        print(
            f"{n:>9} {steps:>8} {t_py:>10.4f} {t_cy:>13.4f} {t_py / t_cy:>7.1f}x"
            f"   (max |df| deviation {max_dev:.2e} Hz)"
        )


if __name__ == "__main__":
    main()
