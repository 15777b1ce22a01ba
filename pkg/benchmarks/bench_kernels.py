"""Time the numba and numpy kernel backends on identical inputs.

    python benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from teleportsim import _kernels
from teleportsim.qubit_math import haar_random_states


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10**6)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    psi = haar_random_states(args.n, rng)
    a, b = psi[:, 0].copy(), psi[:, 1].copy()
    u = rng.random((3, args.n))
    rho = np.einsum("ni,nj->nij", psi, psi.conj())
    basis = (np.arange(args.n) % 3).astype(np.int8)

    cases = {
        "teleport_batch": lambda be: _kernels.teleport_batch(a, b, u[0], u[1], u[2], True, 0.917, 0.85, backend=be),
        "measure_batch": lambda be: _kernels.measure_batch(rho, basis, u[0], backend=be),
        "classical_fidelity": lambda be: _kernels.classical_fidelity(a, b, u[0], backend=be),
        "fidelity_batch": lambda be: _kernels.fidelity_batch(psi, rho, backend=be),
    }
    backends = [be for be in ("numpy", "numba") if be in _kernels.IMPLEMENTATIONS]
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<20}" + "".join(f"{be:>12}" for be in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases.items():
        for be in backends:
            fn(be)  # warm-up; triggers JIT compilation
        t = [best_of(lambda: fn(be), args.repeat) for be in backends]
        row = f"{name:<20}" + "".join(f"{x * 1e3:>10.1f}ms" for x in t)
        if len(t) == 2:
            row += f"{t[0] / t[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
