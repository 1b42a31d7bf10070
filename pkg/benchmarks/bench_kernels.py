"""Timing comparison of the compiled kernels against the numpy fallback.

Run as ``python benchmarks/bench_kernels.py``.  Both backends produce
bitwise identical results (asserted below before timing), so the only
difference is speed.
"""

from __future__ import annotations

import math
import timeit

import numpy as np

from bellsim import _kernels_py

try:
    from bellsim import _kernels
except ImportError:
    _kernels = None


def _best(fn, repeats: int = 5, number: int = 3) -> float:
    return min(timeit.repeat(fn, repeat=repeats, number=number)) / number


def main() -> None:
    rng = np.random.default_rng(7)
    n = 1_000_000
    u = rng.random(n)
    t1, t2, t3 = 0.125, 0.5, 0.875

    thetas = rng.uniform(0.0, math.pi, n)
    breakpoints = np.sort(rng.uniform(0.1, math.pi - 0.1, 15))

    weights = rng.random(256)
    cum_weights = np.cumsum(weights / weights.sum())
    cum_weights[-1] = 1.0
    atom_signs = rng.choice(np.array([-1, 1], dtype=np.int8), size=256)

    cases = [
        ("outcome_counts (1e6 draws)", lambda k: k.outcome_counts(u, t1, t2, t3)),
        (
            "piecewise_signs (1e6 angles, 16 intervals)",
            lambda k: k.piecewise_signs(breakpoints, 1, thetas),
        ),
        (
            "indexed_sign_sum (1e6 draws, 256 atoms)",
            lambda k: k.indexed_sign_sum(u, cum_weights, atom_signs),
        ),
    ]

    if _kernels is None:
        print("compiled extension not available; nothing to compare")
        return

    print(f"{'kernel':<45} {'numpy':>10} {'cython':>10} {'speedup':>9}")
    for name, call in cases:
        ref = call(_kernels_py)
        got = call(_kernels)
        assert np.array_equal(np.asarray(ref), np.asarray(got)), name
        t_py = _best(lambda: call(_kernels_py))
        t_cy = _best(lambda: call(_kernels))
        print(f"{name:<45} {t_py * 1e3:>8.2f}ms {t_cy * 1e3:>8.2f}ms {t_py / t_cy:>8.2f}x")


if __name__ == "__main__":
    main()
