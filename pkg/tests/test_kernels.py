"""Backend-parity and contract tests for the sampling/evaluation kernels.

The two backends (compiled extension, numpy fallback) must be bitwise
interchangeable: everything downstream assumes results do not depend on
which one loaded.
"""

import bisect
import os
import subprocess
import sys

import numpy as np
import pytest

from bellsim import _kernels_py

try:
    from bellsim import _kernels
except ImportError:
    _kernels = None

BACKENDS = [pytest.param(_kernels_py, id="numpy")]
if _kernels is not None:
    BACKENDS.append(pytest.param(_kernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def _random_inputs(seed):
    rng = np.random.default_rng(seed)
    u = rng.random(10000)
    breakpoints = np.sort(rng.uniform(0.05, np.pi - 0.05, 9))
    thetas = rng.uniform(0.0, np.pi, 5000)
    weights = rng.random(17)
    cum = np.cumsum(weights / weights.sum())
    cum[-1] = 1.0
    signs = rng.choice(np.array([-1, 1], dtype=np.int8), size=17)
    return u, breakpoints, thetas, cum, signs


class TestOutcomeCounts:
    def test_counts_sum_to_n(self, backend):
        u, *_ = _random_inputs(0)
        counts = backend.outcome_counts(u, 0.2, 0.5, 0.8)
        assert counts.dtype == np.int64
        assert counts.sum() == u.size

    def test_matches_loop_oracle(self, backend):
        u, *_ = _random_inputs(1)
        t1, t2, t3 = 0.125, 0.5, 0.875
        expected = [0, 0, 0, 0]
        for x in u:
            if x < t1:
                expected[0] += 1
            elif x < t2:
                expected[1] += 1
            elif x < t3:
                expected[2] += 1
            else:
                expected[3] += 1
        assert list(backend.outcome_counts(u, t1, t2, t3)) == expected

    def test_tie_goes_right(self, backend):
        # a draw exactly equal to a threshold belongs to the next bin
        u = np.array([0.25, 0.5, 0.75])
        counts = backend.outcome_counts(u, 0.25, 0.5, 0.75)
        assert list(counts) == [0, 1, 1, 1]

    def test_degenerate_thresholds(self, backend):
        # zero-probability outcome: t1 == 0 means bin 0 never fires
        u = np.array([0.0, 0.1, 0.9])
        counts = backend.outcome_counts(u, 0.0, 0.5, 1.0)
        assert list(counts) == [0, 2, 1, 0]


class TestPiecewiseSigns:
    def test_matches_bisect_oracle(self, backend):
        _, bps, thetas, *_ = _random_inputs(2)
        for first in (1, -1):
            out = backend.piecewise_signs(bps, first, thetas)
            assert out.dtype == np.int8
            for th, got in zip(thetas, out):
                idx = bisect.bisect_right(list(bps), th)
                want = first if idx % 2 == 0 else -first
                assert got == want

    def test_breakpoint_belongs_to_next_interval(self, backend):
        bps = np.array([1.0, 2.0])
        out = backend.piecewise_signs(bps, 1, np.array([0.999, 1.0, 1.999, 2.0]))
        assert list(out) == [1, -1, -1, 1]

    def test_no_breakpoints_constant(self, backend):
        out = backend.piecewise_signs(
            np.array([], dtype=np.float64), -1, np.linspace(0.0, 3.0, 7)
        )
        assert np.all(out == -1)


class TestIndexedSignSum:
    def test_matches_loop_oracle(self, backend):
        u, _, _, cum, signs = _random_inputs(3)
        expected = 0
        for x in u:
            idx = min(bisect.bisect_right(list(cum), x), len(cum) - 1)
            expected += int(signs[idx])
        assert backend.indexed_sign_sum(u, cum, signs) == expected

    def test_single_atom(self, backend):
        u = np.array([0.0, 0.5, 0.999999])
        cum = np.array([1.0])
        signs = np.array([-1], dtype=np.int8)
        assert backend.indexed_sign_sum(u, cum, signs) == -3

    def test_draw_at_cumulative_edge_clamps(self, backend):
        # u exactly at the final cumulative weight must clamp to the last atom
        u = np.array([1.0 - 1e-16, 0.5])
        cum = np.array([0.5, 1.0 - 1e-16])
        signs = np.array([1, -1], dtype=np.int8)
        assert backend.indexed_sign_sum(u, cum, signs) == -2


@pytest.mark.skipif(_kernels is None, reason="compiled extension not built")
class TestBackendParity:
    def test_bitwise_identical(self):
        for seed in range(5):
            u, bps, thetas, cum, signs = _random_inputs(seed)
            assert np.array_equal(
                _kernels.outcome_counts(u, 0.1, 0.4, 0.9),
                _kernels_py.outcome_counts(u, 0.1, 0.4, 0.9),
            )
            for first in (1, -1):
                assert np.array_equal(
                    _kernels.piecewise_signs(bps, first, thetas),
                    _kernels_py.piecewise_signs(bps, first, thetas),
                )
            assert _kernels.indexed_sign_sum(u, cum, signs) == (
                _kernels_py.indexed_sign_sum(u, cum, signs)
            )


class TestBackendSelection:
    def test_backend_reported(self):
        from bellsim import kernels

        assert kernels.BACKEND in ("cython", "numpy")

    def test_env_override_forces_fallback(self):
        env = dict(os.environ, BELLSIM_PURE_PYTHON="1")
        out = subprocess.run(
            [sys.executable, "-c", "from bellsim import kernels; print(kernels.BACKEND)"],
            capture_output=True,
            text=True,
            env=env,
            check=True,
        )
        assert out.stdout.strip() == "numpy"
