"""Benchmark the compiled kernels against the pure-Python fallback.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

import ppoincare as pp
from ppoincare import _kernels_py

try:
    from ppoincare import _kernels
except ImportError:
    _kernels = None

from ppoincare.eig2d import _QB, _QW


def timeit(fn, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_shoot(mod):
    seg_x = np.array([0.0, 1.0])
    seg_g = np.array([1.0])
    seg_n = np.array([4000], dtype=np.int64)
    return timeit(lambda: mod.shoot1d(3.0, 30.0, seg_x, seg_g, seg_n, 1.0, 0.0, 16))


def bench_assembly(mod, msh, u, p=3.0):
    tris = np.ascontiguousarray(msh.tris, dtype=np.int32)
    areas = np.ascontiguousarray(msh.areas)
    gphi = np.ascontiguousarray(msh.hat_gradients())

    def run():
        mod.tri_energy_grad(u, tris, gphi, areas, p)
        mod.tri_lp_shift(u, tris, _QB, _QW, areas, 0.1, p)

    return timeit(run)


def main():
    rows = []
    t_py = bench_shoot(_kernels_py)
    rows.append(("shoot1d (4000 steps)", t_py, bench_shoot(_kernels) if _kernels else None))

    msh = pp.mesh(pp.ConvexPolygon.rectangle(0.0, 0.0, 1.0, 1.0), 0.02)
    rng = np.random.default_rng(0)
    u = rng.normal(size=len(msh.nodes))
    t_py = bench_assembly(_kernels_py, msh, u)
    rows.append(
        (
            f"assembly ({len(msh.tris)} tris)",
            t_py,
            bench_assembly(_kernels, msh, u) if _kernels else None,
        )
    )

    print(f"{'kernel':<28} {'python':>10} {'compiled':>10} {'speedup':>9}")
    for name, tp, tc in rows:
        if tc is None:
            print(f"{name:<28} {tp * 1e3:>8.2f}ms {'n/a':>10} {'n/a':>9}")
        else:
            print(f"{name:<28} {tp * 1e3:>8.2f}ms {tc * 1e3:>8.2f}ms {tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
