"""Benchmark: compiled extension vs numpy fallback for the hot kernels.

Run with `python benchmarks/bench_kernels.py`.  Both backends implement
identical arithmetic (see tests/test_kernels.py), so this only measures
speed: the phase-space substep that dominates the classical decay-mode
solve, and the Langevin particle sweep.
"""

import time

import numpy as np

try:
    from zenodec._kernels import _core
except ImportError:
    _core = None
from zenodec._kernels import _fallback


def time_fn(fn, *args, repeats=5):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_fp(backend, n_sub=2000):
    rng = np.random.default_rng(0)
    w = rng.uniform(0.0, 1.0, size=(160, 110))
    scratch, out = np.empty_like(w), np.empty_like(w)
    vel = np.ascontiguousarray(np.linspace(-4, 4, 160))

    def run():
        cur, nxt = w.copy(), out
        for _ in range(n_sub):
            backend.fp_substep(cur, scratch, nxt, vel, 0.01, 0.05, 5e-4, 1.0)
            cur, nxt = nxt, cur

    return time_fn(run, repeats=3)


def bench_langevin(backend, n_particles=50000, steps=512):
    rng = np.random.default_rng(0)
    noise = rng.standard_normal((steps, n_particles))
    x0 = rng.uniform(-0.5, 0.5, n_particles)
    p0 = np.zeros(n_particles)

    def run():
        x, p = x0.copy(), p0.copy()
        alive = np.ones(n_particles, dtype=np.uint8)
        surv = np.empty(steps, dtype=np.int64)
        for lo in range(0, steps, 64):
            backend.langevin_chunk(x, p, alive, noise[lo:lo + 64], 1e-4, 1.0,
                                   0.063, 0.5, surv[lo:lo + 64])

    return time_fn(run, repeats=3)


def main():
    rows = []
    for label, bench in [("fp_substep x2000 (160x110 grid)", bench_fp),
                         ("langevin 50k particles x512 steps", bench_langevin)]:
        t_fallback = bench(_fallback)
        t_core = bench(_core) if _core is not None else np.nan
        rows.append((label, t_core, t_fallback))

    print(f"{'kernel':<36} {'compiled':>10} {'fallback':>10} {'speedup':>9}")
    for label, t_core, t_fallback in rows:
        if np.isnan(t_core):
            print(f"{label:<36} {'absent':>10} {t_fallback:>9.3f}s {'-':>9}")
        else:
            print(f"{label:<36} {t_core:>9.3f}s {t_fallback:>9.3f}s "
                  f"{t_fallback / t_core:>8.1f}x")


if __name__ == "__main__":
    main()
