"""Timing comparison of the compiled and pure-NumPy kernel backends.

Runs the two hot kernels (site sampling and potential rasterization) on a
range of problem sizes, checks that both backends agree bit for bit, and
prints the speedups. Usage: python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from breatherkit import _kernels_py

try:
    from breatherkit import _kernels_cy
except ImportError:
    _kernels_cy = None

CASES = [
    # (d, L, n, R) : grid sizes from desk scale to the dense limit and beyond
    (1, 4, 8, 4),
    (1, 32, 16, 8),
    (2, 4, 4, 4),
    (2, 8, 8, 8),
    (2, 16, 8, 8),
    (3, 4, 4, 4),
]


def timed(fn, *args, repeats):
    best = np.inf
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return result, best


def main():
    if _kernels_cy is None:
        print("compiled kernels not built; nothing to compare "
              "(pip install -e . with Cython and a C compiler)")
        return

    rng = np.random.default_rng(0)
    header = (f"{'case':>18} {'points':>9} | {'sample py':>10} {'sample c':>10} "
              f"{'x':>6} | {'field py':>10} {'field c':>10} {'x':>6}")
    print(header)
    print("-" * len(header))
    for d, L, n, r in CASES:
        sites = (2 * L) ** d
        points = (2 * L * n) ** d
        repeats = max(3, min(50, 3 * 10**6 // max(points, 1)))

        u_py, t_spy = timed(_kernels_py.site_uniforms, 7, 1, d, L,
                            repeats=repeats)
        u_cy, t_scy = timed(_kernels_cy.site_uniforms, 7, 1, d, L,
                            repeats=repeats)
        assert np.array_equal(u_py, u_cy), "backends disagree"

        scales = rng.random(sites)
        mask = (rng.random(r**d) < 0.4).astype(np.uint8)
        if not mask.any():
            mask[0] = 1
        f_py, t_fpy = timed(_kernels_py.field_values, scales, mask, d, L, n, r,
                            repeats=repeats)
        f_cy, t_fcy = timed(_kernels_cy.field_values, scales, mask, d, L, n, r,
                            repeats=repeats)
        assert np.array_equal(f_py, f_cy), "backends disagree"

        label = f"d={d} L={L} n={n} R={r}"
        print(f"{label:>18} {points:>9} | {t_spy * 1e3:>8.3f}ms "
              f"{t_scy * 1e3:>8.3f}ms {t_spy / t_scy:>5.1f}x | "
              f"{t_fpy * 1e3:>8.3f}ms {t_fcy * 1e3:>8.3f}ms "
              f"{t_fpy / t_fcy:>5.1f}x")


if __name__ == "__main__":
    main()
