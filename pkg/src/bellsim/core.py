"""Shared domain types for two-analyzer polarization correlation experiments.

A linear polarization analyzer at angle ``theta`` and one at ``theta + pi``
select the same pair of transmission axes, so analyzer settings live on a
circle of circumference pi and every setting has a canonical representative
in ``[0, pi)``.  Measurement outcomes are plain integers in ``{+1, -1}``.

A correlation function ``C(alpha, beta)`` maps a pair of analyzer settings to
the expectation of the outcome product.  Any physically meaningful ``C`` must
satisfy two structural constraints:

C1 (periodicity)
    ``C(alpha + pi, beta) == C(alpha, beta) == C(alpha, beta + pi)``.

C2 (symmetry)
    ``C(alpha, beta) == C(beta, alpha)``.

:func:`check_constraints` probes both on a deterministic grid and returns the
worst violations, so that exact evaluators can be held to ~1e-9 while Monte
Carlo estimators get a statistically honest tolerance.

Randomness is funneled through :class:`RandomStream`, a thin wrapper over a
counter-based generator: the same seed always reproduces the same draws, and
streams can be split into independent children for per-setting or per-worker
use without any coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

PERIOD = math.pi

CORRELATION_KINDS = ("quantum", "lhv-exact", "lhv-estimated", "measured")


def normalize_angle(theta: float) -> float:
    """Reduce a single analyzer angle to its representative in ``[0, pi)``.

    Parameters
    ----------
    theta : float
        Angle in radians.  Must be finite.

    Returns
    -------
    float
        ``theta mod pi``, guaranteed to lie in ``[0, pi)``.
    """
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"analyzer angle must be finite, got {theta!r}")
    reduced = math.fmod(theta, PERIOD)
    if reduced < 0.0:
        reduced += PERIOD
    # fmod can land exactly on PERIOD after the negative correction
    if reduced >= PERIOD:
        reduced -= PERIOD
    return reduced


def normalize_angles(thetas) -> np.ndarray:
    """Vectorized :func:`normalize_angle`; returns a float64 array."""
    arr = np.asarray(thetas, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("analyzer angles must be finite")
    reduced = np.mod(arr, PERIOD)
    # np.mod(-1e-18, pi) rounds up to pi itself; fold that edge back to 0
    return np.where(reduced >= PERIOD, 0.0, reduced)


@dataclass(frozen=True)
class ConstraintReport:
    """Worst-case C1 / C2 violations observed on a probe grid."""

    c1_max_violation: float
    c2_max_violation: float
    tol: float
    passed: bool

    def __str__(self) -> str:
        status = "ok" if self.passed else "VIOLATED"
        return (
            f"constraints {status}: C1 max {self.c1_max_violation:.3e}, "
            f"C2 max {self.c2_max_violation:.3e} (tol {self.tol:.3e})"
        )


@dataclass(frozen=True)
class CorrelationFunction:
    """A correlation evaluator together with its provenance.

    Parameters
    ----------
    fn : callable
        Vectorized evaluator: accepts broadcastable float arrays
        ``(alpha, beta)`` and returns the correlation with the broadcast
        shape.  The evaluator is responsible for its own periodicity; it is
        called with raw (unnormalized) angles so that C1 checks are honest.
    kind : str
        One of ``"quantum"``, ``"lhv-exact"``, ``"lhv-estimated"``,
        ``"measured"``.
    description : str
        Human-readable label used in reports and CLI output.
    """

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    kind: str
    description: str = ""

    def __post_init__(self) -> None:
        if self.kind not in CORRELATION_KINDS:
            raise ValueError(
                f"kind must be one of {CORRELATION_KINDS}, got {self.kind!r}"
            )
        if not callable(self.fn):
            raise TypeError("fn must be callable")

    def __call__(self, alpha, beta):
        a = np.asarray(alpha, dtype=np.float64)
        b = np.asarray(beta, dtype=np.float64)
        out = np.asarray(self.fn(a, b), dtype=np.float64)
        if a.ndim == 0 and b.ndim == 0:
            return float(out)
        return out


def check_constraints(
    corr: CorrelationFunction | Callable,
    grid_size: int = 16,
    tol: float = 1e-9,
) -> ConstraintReport:
    """Probe C1 (period-pi shifts) and C2 (argument swap) on a uniform grid.

    Parameters
    ----------
    corr : CorrelationFunction or callable
        Correlation to probe.  Must accept array arguments.
    grid_size : int
        Number of grid points per axis in ``[0, pi)``; the probe evaluates
        ``grid_size ** 2`` setting pairs plus shifted/swapped copies.
    tol : float
        Maximum violation accepted for a pass.  Use ~1e-9 for exact
        evaluators and a multiple of the standard error for Monte Carlo ones.
    """
    if grid_size < 2:
        raise ValueError(f"grid_size must be at least 2, got {grid_size}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    grid = np.linspace(0.0, PERIOD, grid_size, endpoint=False)
    alpha, beta = np.meshgrid(grid, grid, indexing="ij")
    base = corr(alpha, beta)
    shift_a = np.max(np.abs(corr(alpha + PERIOD, beta) - base))
    shift_b = np.max(np.abs(corr(alpha, beta + PERIOD) - base))
    c1 = float(max(shift_a, shift_b))
    c2 = float(np.max(np.abs(corr(beta, alpha) - base)))
    return ConstraintReport(
        c1_max_violation=c1,
        c2_max_violation=c2,
        tol=float(tol),
        passed=(c1 <= tol and c2 <= tol),
    )


class RandomStream:
    """Deterministic uniform random stream over a counter-based generator.

    The same ``seed`` combined with the same sequence of draw sizes yields
    bitwise identical output on every platform.  :meth:`split` derives
    independent child streams without consuming draws from the parent, so
    parallel or per-setting substreams stay reproducible.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit seed.
    """

    def __init__(self, seed: int) -> None:
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self.position = 0
        self._n_splits = 0
        self._gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))

    def uniforms(self, n: int) -> np.ndarray:
        """Draw ``n`` float64 uniforms on ``[0, 1)`` and advance the stream."""
        n = int(n)
        if n < 0:
            raise ValueError(f"draw count must be non-negative, got {n}")
        out = self._gen.random(n)
        self.position += n
        return out

    def split(self, n: int) -> list["RandomStream"]:
        """Derive ``n`` independent child streams.

        Children are keyed by ``(seed, split_counter, child_index)``; calling
        ``split`` again produces a fresh, non-overlapping batch.
        """
        n = int(n)
        if n < 1:
            raise ValueError(f"number of children must be positive, got {n}")
        children = []
        for j in range(n):
            ss = np.random.SeedSequence((self.seed, self._n_splits, j))
            child_seed = int(ss.generate_state(1, np.uint64)[0])
            children.append(RandomStream(child_seed))
        self._n_splits += 1
        return children

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, position={self.position})"


def derive_setting_seed(seed: int, alpha: float, beta: float) -> int:
    """Derive the per-setting seed used for one ``(alpha, beta)`` estimate.

    The derivation hashes the master seed together with the bit patterns of
    the normalized angles, so each grid cell of a simulation gets its own
    reproducible stream and reordering the grid cannot change any estimate.
    Settings share a stream exactly when they normalize to the same float;
    representations off by a period (``alpha + pi``) usually normalize to a
    value one rounding step away and then get an independent stream.
    """
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    a_bits = int(np.float64(normalize_angle(alpha)).view(np.uint64))
    b_bits = int(np.float64(normalize_angle(beta)).view(np.uint64))
    ss = np.random.SeedSequence((seed, a_bits, b_bits))
    return int(ss.generate_state(1, np.uint64)[0])
