"""Timing comparison of the compiled and pure-numpy propagation kernels.

Run with `python3 bench/bench_kernels.py`.  Each kernel is exercised on the
shapes the integrators actually use (stacks of 4x4 Hermitians, step-unitary
chains, batched Lindblad updates) and on a larger 10-dimensional stack for
the spin-phonon model.
"""

from __future__ import annotations

import time

import numpy as np

from darkpath import _kernels_py

try:
    from darkpath import _kernels
except ImportError:
    _kernels = None

BACKENDS = [("python", _kernels_py)]
if _kernels is not None:
    BACKENDS.append(("compiled", _kernels))


def _herm_stack(rng, m, d):
    a = rng.standard_normal((m, d, d)) + 1j * rng.standard_normal((m, d, d))
    return (a + a.conj().transpose(0, 2, 1)) / 2.0


def _time(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(2024)
    cases = []

    for d, m in ((4, 8192), (10, 2048)):
        h = _herm_stack(rng, m, d)
        cases.append((f"expi_herm  m={m:5d} d={d:2d}",
                      lambda mod, h=h: mod.expi_herm(h, -1.0e-6)))

    us = _kernels_py.expi_herm(_herm_stack(rng, 8192, 4), 1.0)
    cases.append(("chain      m= 8192 d= 4", lambda mod: mod.chain(us)))
    psi = np.array([1.0, 0, 0, 0], dtype=complex)
    cases.append(("chain_states  8192 d= 4",
                  lambda mod: mod.chain_states(us, psi)))
    cases.append(("chain_prefix  8192 d= 4",
                  lambda mod: mod.chain_prefix(us, 2)))

    rhos = np.zeros((16, 4, 4), dtype=complex)
    for k in range(16):
        rhos[k, k // 4, k % 4] = 1.0
    eh = np.eye(16) + 1e-4 * rng.standard_normal((16, 16))
    cases.append(("lindblad  4096x16 d= 4",
                  lambda mod: mod.lindblad_run(us[:4096], eh, rhos, 4096)))

    print(f"{'kernel':28s}" + "".join(f"{name:>12s}" for name, _ in BACKENDS)
          + ("     speedup" if len(BACKENDS) == 2 else ""))
    for label, call in cases:
        times = [_time(lambda mod=mod: call(mod)) for _, mod in BACKENDS]
        row = f"{label:28s}" + "".join(f"{t * 1e3:10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)

    if _kernels is None:
        print("\ncompiled backend unavailable; showing python timings only")


if __name__ == "__main__":
    main()
