"""Time the grid kernel with and without numba.

    python3 benchmarks/bench_grid.py --res 200 400 --horizon 10

Each resolution runs both backends on x_{n+1} = A/x_n + B/x_{n-1}, checks that
the crash-step matrices agree cell by cell and prints the best of ``--repeat``
timings.  The numba column excludes the first (compiling) call.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from forbiddenset.algebra.textformat import parse_definition
from forbiddenset.enumeration import grid_classify
from forbiddenset.enumeration._kernels import have_numba

EQUATION = """\
order: 2
params: A = 1, B = 1
numerator: A*x1 + B*x0
denominator: x0*x1
"""


def best_time(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--res", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--horizon", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    de = parse_definition(EQUATION).equation()
    region = (-5.0, 5.0, -5.0, 5.0)
    jit = have_numba()
    if jit:
        grid_classify(de, region, 8, 2, backend="numba")  # compile outside the timing
    print(f"{'res':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8}  same")
    for res in args.res:
        t_np, r_np = best_time(lambda: grid_classify(de, region, res, args.horizon, backend="numpy"), args.repeat)
        if jit:
            t_nb, r_nb = best_time(lambda: grid_classify(de, region, res, args.horizon, backend="numba"), args.repeat)
            same = np.array_equal(r_np.crash_steps, r_nb.crash_steps)
            print(f"{res:>6} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f}  {same}")
        else:
            print(f"{res:>6} {t_np:>10.4f} {'n/a':>10} {'n/a':>8}  -")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
