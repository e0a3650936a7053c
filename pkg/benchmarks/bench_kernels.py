"""Compare the numba kernels with their numpy fallbacks.

Kernel timings call both variants in-process on identical inputs. End-to-end
timings run an eigenvalue search in a fresh interpreter per backend, with
``SLQ_DISABLE_NUMBA=1`` selecting the fallback, and report the warm time
(first call excluded, so JIT compilation is not counted).

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys
import timeit
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent

_END_TO_END = """
import json, time
from slq import BACKEND, eigenvalues_on_interval, load_problem
c = load_problem({path!r}).coeffs
eigenvalues_on_interval(c, (0, 1), 2)
t0 = time.perf_counter()
for _ in range({repeat}):
    eigenvalues_on_interval(c, (0, 1), 5)
print(json.dumps({{"backend": BACKEND, "seconds": (time.perf_counter() - t0) / {repeat}}}))
"""


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_kernels(repeat):
    from slq import kernels
    from slq.coeffs import CoefficientSet
    from slq.spectral import _scan_mesh, default_scan

    if not kernels.HAVE_NUMBA:
        print("numba unavailable; kernel comparison skipped")
        return []
    c = CoefficientSet.from_strings("1 + x^2", "sin(x)", "x", "0", jumps=((0.5, 10.0),))
    lo, hi, step = default_scan((0, 1), 5)
    lams = np.arange(lo, hi, step)
    stage, hs = _scan_mesh(c, (0, 1), float(np.max(np.abs(lams))))
    y0 = np.array([0.0, 1.0], dtype=np.complex128)

    rng = np.random.default_rng(0)
    a = rng.normal(size=(7, 2, 2)) + 1j * rng.normal(size=(7, 2, 2))
    g = np.zeros((7, 2), dtype=np.complex128)
    y = np.array([1.0 + 0.5j, -0.3j])

    rows = []
    for name, nb, npy, args, n in [
        ("propagate_batch", kernels.propagate_batch_numba, kernels.propagate_batch_numpy,
         (stage, hs, lams, y0), 1),
        ("dopri_step x1000", kernels.dopri_step_numba, kernels.dopri_step_numpy,
         (a, g, y, 0.01, 1e-10, 1e-12), 1000),
    ]:
        nb(*args)  # compile
        t_nb = _best(lambda: [nb(*args) for _ in range(n)], repeat)
        t_np = _best(lambda: [npy(*args) for _ in range(n)], repeat)
        rows.append((name, t_nb, t_np))
    print(f"scan grid: {lams.size} lambda values x {hs.size} RK4 steps")
    return rows


def bench_end_to_end(repeat):
    rows = []
    for name in ("free.slq", "delta.slq"):
        times = {}
        for disable in ("0", "1"):
            env = dict(os.environ, SLQ_DISABLE_NUMBA=disable)
            code = _END_TO_END.format(path=str(ROOT / "problems" / name), repeat=repeat)
            out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                 text=True, check=True).stdout
            res = json.loads(out.strip().splitlines()[-1])
            times[res["backend"]] = res["seconds"]
        rows.append((f"5 eigenvalues, {name}", times.get("numba", float("nan")), times["numpy"]))
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    rows = bench_kernels(args.repeat) + bench_end_to_end(args.repeat)
    print(f"{'benchmark':<32}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, t_nb, t_np in rows:
        print(f"{name:<32}{t_nb:>12.4g}{t_np:>12.4g}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
