"""Entangled photon-pair statistics for two linear polarization analyzers.

For the maximally entangled pair state shared between analyzers at angles
``alpha`` and ``beta``, the joint outcome distribution depends only on the
relative angle and the correlation is

    C(alpha, beta) = -cos(2 (alpha - beta)).

With ``c = cos(2 (alpha - beta))`` the four joint outcome probabilities are

    p(+,+) = p(-,-) = (1 - c) / 4
    p(+,-) = p(-,+) = (1 + c) / 4

so both marginals are unbiased and perfectly anti-correlated outcomes occur
whenever the analyzers are parallel.  Monte Carlo estimation samples the four
outcomes by inverse CDF from one uniform per pair event, accumulating the
outcome product in integers so the estimate is bitwise reproducible for a
given seed, independent of chunking and of the kernel backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import CorrelationFunction, RandomStream, derive_setting_seed

# Fixed inverse-CDF outcome order: (+,+), (+,-), (-,+), (-,-).
_OUTCOMES = ((1, 1), (1, -1), (-1, 1), (-1, -1))

_DEFAULT_CHUNK = 1 << 20


def singlet_correlation(alpha, beta):
    """Exact pair correlation ``-cos(2 (alpha - beta))``.

    Accepts scalars or broadcastable arrays; scalar inputs return a float.
    """
    out = -np.cos(2.0 * (np.asarray(alpha, dtype=np.float64) - beta))
    if out.ndim == 0:
        return float(out)
    return out


def singlet_correlation_function() -> CorrelationFunction:
    """The exact quantum correlation packaged with its provenance."""
    return CorrelationFunction(
        fn=lambda a, b: -np.cos(2.0 * (a - b)),
        kind="quantum",
        description="entangled pair, exact",
    )


def joint_probability(a: int, b: int, alpha: float, beta: float) -> float:
    """Probability of the joint outcome ``(a, b)`` at settings (alpha, beta).

    Parameters
    ----------
    a, b : int
        Outcomes, each +1 or -1.
    alpha, beta : float
        Analyzer angles in radians.
    """
    if a not in (1, -1) or b not in (1, -1):
        raise ValueError(f"outcomes must be +1 or -1, got ({a!r}, {b!r})")
    c = math.cos(2.0 * (float(alpha) - float(beta)))
    return (1.0 - a * b * c) / 4.0


def _thresholds(alpha: float, beta: float) -> tuple[float, float, float]:
    # Cumulative CDF cut points for the fixed outcome order.
    c = math.cos(2.0 * (float(alpha) - float(beta)))
    p_pp = (1.0 - c) / 4.0
    p_pm = (1.0 + c) / 4.0
    return p_pp, p_pp + p_pm, p_pp + p_pm + p_pm


def sample_pair(alpha: float, beta: float, stream: RandomStream) -> tuple[int, int]:
    """Draw one joint outcome ``(a, b)`` using a single uniform."""
    t1, t2, t3 = _thresholds(alpha, beta)
    u = float(stream.uniforms(1)[0])
    if u < t1:
        return _OUTCOMES[0]
    if u < t2:
        return _OUTCOMES[1]
    if u < t3:
        return _OUTCOMES[2]
    return _OUTCOMES[3]


@dataclass(frozen=True)
class MeasuredCorrelation:
    """One Monte Carlo correlation estimate and its provenance."""

    alpha: float
    beta: float
    estimate: float
    standard_error: float
    n_runs: int
    seed: int

    def __str__(self) -> str:
        return (
            f"C({self.alpha:.6f}, {self.beta:.6f}) = {self.estimate:.6f} "
            f"+/- {self.standard_error:.6f} (n={self.n_runs})"
        )


def estimate_correlation(
    alpha: float,
    beta: float,
    n_runs: int,
    seed: int,
    chunk_size: int = _DEFAULT_CHUNK,
) -> MeasuredCorrelation:
    """Monte Carlo estimate of the pair correlation at one setting pair.

    One uniform is drawn per pair event and the outcome products are
    accumulated as integers, so the estimate depends only on ``seed`` and
    ``n_runs``: chunk size and kernel backend cannot change the result.

    Parameters
    ----------
    alpha, beta : float
        Analyzer angles in radians.
    n_runs : int
        Number of pair events; must be positive.
    seed : int
        Unsigned 64-bit stream seed.
    chunk_size : int
        Number of events sampled per kernel call.

    Returns
    -------
    MeasuredCorrelation
        Estimate with the binomial-style standard error
        ``sqrt((1 - estimate**2) / n_runs)``.
    """
    n_runs = int(n_runs)
    if n_runs < 1:
        raise ValueError(f"n_runs must be positive, got {n_runs}")
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be positive, got {chunk_size}")
    t1, t2, t3 = _thresholds(alpha, beta)
    stream = RandomStream(seed)
    product_sum = 0
    remaining = n_runs
    while remaining > 0:
        m = min(remaining, chunk_size)
        counts = kernels.outcome_counts(stream.uniforms(m), t1, t2, t3)
        product_sum += int(counts[0] - counts[1] - counts[2] + counts[3])
        remaining -= m
    estimate = product_sum / n_runs
    variance = max(1.0 - estimate * estimate, 0.0)
    return MeasuredCorrelation(
        alpha=float(alpha),
        beta=float(beta),
        estimate=estimate,
        standard_error=math.sqrt(variance / n_runs),
        n_runs=n_runs,
        seed=int(seed),
    )


def measured_correlation_function(n_runs: int, seed: int) -> CorrelationFunction:
    """Monte Carlo correlation as a function of the settings.

    Each setting pair gets its own substream derived from ``seed`` and the
    normalized angles, so evaluations are independent of call order and
    repeated evaluation at the same settings returns the same estimate.  The
    structural constraints C1/C2 hold statistically: probe them with a
    tolerance of a few standard errors, not an exact one.
    """

    def fn(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
        a, b = np.broadcast_arrays(
            np.asarray(alpha, dtype=np.float64), np.asarray(beta, dtype=np.float64)
        )
        out = np.empty(a.shape, dtype=np.float64)
        flat_a, flat_b, flat_out = a.ravel(), b.ravel(), out.ravel()
        for i in range(flat_a.size):
            row_seed = derive_setting_seed(seed, flat_a[i], flat_b[i])
            flat_out[i] = estimate_correlation(
                flat_a[i], flat_b[i], n_runs, row_seed
            ).estimate
        return out

    return CorrelationFunction(
        fn=fn,
        kind="measured",
        description=f"entangled pair, Monte Carlo (n={int(n_runs)}, seed={int(seed)})",
    )
