"""Benchmark: compiled Mellin-Barnes kernel vs the numpy fallback.

Run:  python benchmarks/bench_kernels.py

Covers the two hot paths behind every Meijer-G / Fox-H evaluation: complex
log-gamma over contour nodes, and the fused univariate line sum. The Monte
Carlo engine is not benchmarked here because it runs on numpy's C-level
Philox generators in both configurations.
"""

import time

import numpy as np

from mmwrelay import _mbpure

try:
    from mmwrelay import _mbkernel
except ImportError:
    _mbkernel = None


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    backends = [("pure-python", _mbpure)] + ([("compiled", _mbkernel)] if _mbkernel else [])

    print(f"{'kernel':<34}" + "".join(f"{name:>16}" for name, _ in backends) + f"{'speedup':>10}")
    for n in (4_096, 262_144):
        z = rng.normal(size=n) + 1j * rng.normal(scale=20.0, size=n)
        times = [timeit(mod.clgamma, z) for _, mod in backends]
        row = f"clgamma n={n:<24}" + "".join(f"{t*1e3:>14.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)
    for count in (512, 4096):
        t = np.linspace(-17, 17, count)
        w = np.full(count, 34 / count)
        args = (-10.25, t, w, [0.0, 21.0, 21.0], [-1.0, 1.0, 1.0], [], [], -0.7)
        times = [timeit(mod.mb_line_sum, *args) for _, mod in backends]
        row = f"mb_line_sum 3-gamma N={count:<11}" + "".join(f"{t_*1e3:>14.2f}ms" for t_ in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    if _mbkernel is not None:
        z = rng.normal(size=4096) + 1j * rng.normal(scale=20.0, size=4096)
        a, b = _mbpure.clgamma(z), _mbkernel.clgamma(z)
        rel = np.max(np.abs(np.exp(a) - np.exp(b)) / np.abs(np.exp(a)))
        print(f"\nbackend agreement (exp(clgamma), worst relative): {rel:.2e}")


if __name__ == "__main__":
    main()
